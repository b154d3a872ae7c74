#ifndef LFR_DISPARITY_H_
#define LFR_DISPARITY_H_

#include "lfr/light_field.h"

namespace lfr {

enum class MatchingCost { kAbsoluteDifference, kTruncatedAbsoluteDifference };

struct DisparityEstimationParams {
  int num_hypotheses = 33;
  double d_lo = 0.0;
  double d_hi = 4.0;
  int window = 7;  // odd side of the cost aggregation window
  MatchingCost cost = MatchingCost::kTruncatedAbsoluteDifference;
  double truncation = 0.1;  // in sample units (full scale 1)
  int median_window = 3;    // odd, 0 disables smoothing

  double hypothesis(int j) const {
    const double d = d_lo + (d_hi - d_lo) * j / (num_hypotheses - 1);
    return d > d_hi ? d_hi : d;
  }
  // Quantization error bound (d_hi - d_lo) / (n - 1).
  double step() const { return (d_hi - d_lo) / (num_hypotheses - 1); }
};

// Throws ContractError on invalid parameters.
void validate(const DisparityEstimationParams& params);

// Plane sweep over n fronto-parallel hypotheses: every non-reference view
// is warped toward the reference by (-u d, -v d) with clamped bilinear
// sampling, per-pixel costs are summed over views and box-aggregated over
// the window, and the argmin label (ties -> smaller disparity) is median
// filtered. Throws EstimationError for single-view light fields.
DisparityMap plane_sweep_disparity(const LightField& lf,
                                   const DisparityEstimationParams& params);

// Nearest-neighbour replication by s with values multiplied by s, so the
// map stays in pixel units of the upsampled grid.
DisparityMap upsample_disparity(const DisparityMap& dmap, int s);

}  // namespace lfr

#endif  // LFR_DISPARITY_H_
