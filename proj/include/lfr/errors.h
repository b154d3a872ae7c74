#ifndef LFR_ERRORS_H_
#define LFR_ERRORS_H_

#include <stdexcept>
#include <string>

namespace lfr {

// A file could not be read, or a dataset member is missing or inconsistent.
class LoadError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A file exists but its contents are malformed.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition (shapes, parameter ranges).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the mathematical domain of a formula.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Disparity cannot be estimated from this light field (e.g. a single view).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lfr

#endif  // LFR_ERRORS_H_
