#ifndef LFR_SR_SOLVER_H_
#define LFR_SR_SOLVER_H_

#include <functional>
#include <span>
#include <vector>

#include "lfr/image_grid.h"
#include "lfr/light_field.h"
#include "lfr/operators.h"
#include "lfr/optics.h"

namespace lfr {

// Defaults: lambda_b 5, lambda_btv 0.2, step 0.1, 10 iterations; BTV over
// shifts in [-2, 2]^2 with decay 0.6.
//
// lambda_btv and sign_epsilon are expressed for samples in code units
// [0, intensity_scale] while images are stored in [0, 1]. Minimizing
// E(S x) / S^2 in [0, 1] units gives the same iterates as descending in
// code units, and only the BTV term changes: its weight becomes
// lambda_btv / S and its epsilon sign_epsilon / S. intensity_scale = 1
// evaluates every term directly on [0, 1] samples.
struct SolverParams {
  double lambda_b = 5.0;
  double lambda_btv = 0.2;
  double step_size = 0.1;
  int noi = 10;
  int btv_window = 2;       // P
  double btv_alpha = 0.6;   // geometric decay per unit shift
  double sign_epsilon = 1e-3;
  double intensity_scale = 255.0;
  bool backtracking = false;

  double effective_btv_weight() const { return lambda_btv / intensity_scale; }
  double effective_epsilon() const { return sign_epsilon / intensity_scale; }
};

void validate(const SolverParams& params);

// Bilateral total variation with the smoothed absolute value
// sqrt(t^2 + eps^2). Shifted samples are clamped to the image.
double btv_value(const ImageGrid& x, int window, double alpha, double eps);
ImageGrid btv_gradient(const ImageGrid& x, int window, double alpha,
                       double eps);

// Masked multi-view SR objective
//   sum_k |(1 - w_k) .* (y_k - D H F_k x)|^2
//     + lambda_b |w_b .* (x - x_b)|^2 + lambda_btv' J_btv(x)
// with lambda_btv' and the BTV epsilon scaled as described on SolverParams
// where w_k is the HR weight map warped (nearest) by F_k and decimated by D.
// Keeps references to its inputs; they must outlive the problem.
class SrProblem {
 public:
  SrProblem(std::span<const ImageGrid> views, const DisparityMap& dmap_hr,
            const ImageGrid& bokeh, const WeightMap& weights,
            const DegradationSpec& spec, const SolverParams& params);

  double objective(const ImageGrid& x) const;
  ImageGrid gradient(const ImageGrid& x) const;

  double data_term(const ImageGrid& x) const;
  double bokeh_term(const ImageGrid& x) const;
  // J_btv at the effective epsilon, unweighted.
  double btv_term(const ImageGrid& x) const;

  // (1 - w_k)^2 on the LR grid of view k.
  const ImageGrid& data_mask_sq(int k) const { return data_mask_sq_[k]; }

 private:
  void check_shape(const ImageGrid& x) const;

  std::span<const ImageGrid> views_;
  const DisparityMap& dmap_hr_;
  const ImageGrid& bokeh_;
  const DegradationSpec& spec_;
  const SolverParams& params_;
  std::vector<double> weight_sq_;          // w_b^2 on the HR grid
  std::vector<ImageGrid> data_mask_sq_;
};

double objective(const ImageGrid& x, const LightField& lf,
                 const DisparityMap& dmap_hr, const ImageGrid& bokeh,
                 const WeightMap& weights, const DegradationSpec& spec,
                 const SolverParams& params);

ImageGrid gradient(const ImageGrid& x, const LightField& lf,
                   const DisparityMap& dmap_hr, const ImageGrid& bokeh,
                   const WeightMap& weights, const DegradationSpec& spec,
                   const SolverParams& params);

struct SrResult {
  ImageGrid output;
  std::vector<double> objective_trace;  // noi + 1 entries, trace[0] at x_b
};

// Called after each completed iteration with its 1-based index.
using IterationCallback = std::function<void(int)>;

// Gradient descent from x = x_b with iterates clamped to [0, 1]. With
// backtracking the step is halved (at most 8 times) until the objective
// does not increase; if no trial step qualifies the iterate is kept.
SrResult super_resolve(const LightField& lf, const DisparityMap& dmap_hr,
                       const ImageGrid& bokeh, const WeightMap& weights,
                       const DegradationSpec& spec, const SolverParams& params,
                       const IterationCallback& on_iteration = {});

}  // namespace lfr

#endif  // LFR_SR_SOLVER_H_
