#ifndef LFR_PIPELINE_H_
#define LFR_PIPELINE_H_

#include <filesystem>
#include <limits>
#include <ostream>
#include <variant>
#include <vector>

#include "lfr/bokeh.h"
#include "lfr/disparity.h"
#include "lfr/image_grid.h"
#include "lfr/light_field.h"
#include "lfr/operators.h"
#include "lfr/optics.h"
#include "lfr/sr_solver.h"

namespace lfr {

struct EstimateDisparity {
  DisparityEstimationParams params;
};

// Either run the plane sweep or use an externally supplied map (LR
// reference resolution, LR pixel units).
using DisparitySource = std::variant<EstimateDisparity, DisparityMap>;

struct StageTimings {
  double disparity = 0.0;
  double bokeh = 0.0;
  double sr = 0.0;
  double total = 0.0;
};

struct RefocusResult {
  ImageGrid output;        // x_hat, sr_factor x the reference size
  ImageGrid bokeh_image;   // x_b
  WeightMap weight_map;    // w_b at HR
  DisparityMap disparity;  // LR reference disparity actually used
  std::vector<double> objective_trace;
  StageTimings timings;    // seconds
};

// disparity -> CoC radii -> bokeh at LR -> bicubic to HR (x_b) ->
// HR disparity -> weight map from the HR radii -> SR. Focus disparity in
// refocus_params is in LR pixel units. spec.view_offsets is taken from lf
// when empty.
RefocusResult refocus(const LightField& lf, const RefocusParams& refocus_params,
                      const SolverParams& solver_params,
                      const DegradationSpec& spec,
                      const DisparitySource& disparity_source,
                      const BokehRenderConfig& bokeh_cfg = {},
                      const IterationCallback& on_iteration = {});

// Bokeh-only render of the reference view at native resolution.
ImageGrid bokeh_preview(const LightField& lf, const DisparityMap& dmap,
                        const RefocusParams& params,
                        const BokehRenderConfig& bokeh_cfg = {});

// Catmull-Rom upsampling of the reference view; the baseline the SR
// output is compared against.
ImageGrid bicubic_baseline(const LightField& lf, int sr_factor);

inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

// PSNR over pixels with mask weight < threshold, all channels, peak 1.
// Returns kPsnrIdentical when the MSE is zero; EvaluationError when no
// pixel is selected.
double psnr_masked(const ImageGrid& a, const ImageGrid& b, const WeightMap& mask,
                   double threshold = 0.5);

struct TimingRow {
  double k = 0.0;
  int noi = 0;
  StageTimings timings;
};

// Runs refocus for every (K, NoI) pair. Disparity does not depend on focus
// settings, so it is resolved once and its cost is charged to every row.
// With repeats > 1 each cell keeps the run with the smallest total.
std::vector<TimingRow> run_timing_profile(
    const LightField& lf, const RefocusParams& base_refocus,
    const SolverParams& base_solver, int sr_factor,
    const DisparitySource& disparity_source, const std::vector<double>& k_values,
    const std::vector<int>& noi_values, int repeats = 1);

// Header row then one row per cell, seconds with 3 decimals.
void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows);

void write_weight_map(const std::filesystem::path& path, const WeightMap& wmap);
WeightMap load_weight_map(const std::filesystem::path& path);

// disparity.pfm, weights.pfm, bokeh.png, trace.csv and timings.csv.
void save_intermediates(const std::filesystem::path& directory,
                        const RefocusResult& result, int bit_depth);

}  // namespace lfr

#endif  // LFR_PIPELINE_H_
