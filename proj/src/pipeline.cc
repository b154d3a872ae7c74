#include "lfr/pipeline.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lfr/errors.h"
#include "lfr/pfm_io.h"
#include "lfr/png_io.h"

namespace lfr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

DisparityMap resolve_disparity(const LightField& lf,
                               const DisparitySource& source) {
  if (const auto* est = std::get_if<EstimateDisparity>(&source)) {
    return plane_sweep_disparity(lf, est->params);
  }
  const auto& dmap = std::get<DisparityMap>(source);
  const ImageGrid& ref = lf.reference();
  if (dmap.height != ref.height() || dmap.width != ref.width()) {
    throw ContractError("external disparity map is " +
                        std::to_string(dmap.height) + "x" +
                        std::to_string(dmap.width) + ", reference view is " +
                        std::to_string(ref.height()) + "x" +
                        std::to_string(ref.width()));
  }
  return dmap;
}

std::string format_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", s);
  return buf;
}

}  // namespace

ImageGrid bokeh_preview(const LightField& lf, const DisparityMap& dmap,
                        const RefocusParams& params,
                        const BokehRenderConfig& bokeh_cfg) {
  return render_bokeh(lf.reference(), coc_radius_map(dmap, params), bokeh_cfg);
}

ImageGrid bicubic_baseline(const LightField& lf, int sr_factor) {
  return upsample_bicubic(lf.reference(), sr_factor);
}

RefocusResult refocus(const LightField& lf, const RefocusParams& refocus_params,
                      const SolverParams& solver_params,
                      const DegradationSpec& spec,
                      const DisparitySource& disparity_source,
                      const BokehRenderConfig& bokeh_cfg,
                      const IterationCallback& on_iteration) {
  validate(refocus_params);
  validate(solver_params);
  const int s = spec.sr_factor;
  if (s < 1) throw ContractError("sr_factor must be >= 1");
  DegradationSpec degradation = spec;
  if (degradation.view_offsets.empty()) degradation.view_offsets = lf.offsets;

  RefocusResult result;
  const auto start = Clock::now();

  auto t = Clock::now();
  result.disparity = resolve_disparity(lf, disparity_source);
  result.timings.disparity = seconds_since(t);

  t = Clock::now();
  const CocRadiusMap lr_radii = coc_radius_map(result.disparity, refocus_params);
  result.bokeh_image = upsample_bokeh(render_bokeh(lf.reference(), lr_radii, bokeh_cfg), s);
  result.timings.bokeh = seconds_since(t);

  t = Clock::now();
  const DisparityMap hr_disparity = upsample_disparity(result.disparity, s);
  RefocusParams hr_params = refocus_params;
  hr_params.focus_disparity *= s;
  result.weight_map = weight_map(coc_radius_map(hr_disparity, hr_params), hr_params);
  SrResult sr = super_resolve(lf, hr_disparity, result.bokeh_image,
                              result.weight_map, degradation, solver_params,
                              on_iteration);
  result.output = std::move(sr.output);
  result.objective_trace = std::move(sr.objective_trace);
  result.timings.sr = seconds_since(t);

  result.timings.total = seconds_since(start);
  return result;
}

double psnr_masked(const ImageGrid& a, const ImageGrid& b, const WeightMap& mask,
                   double threshold) {
  if (!a.same_shape(b)) throw ContractError("psnr_masked: image shapes differ");
  if (mask.height != a.height() || mask.width != a.width()) {
    throw ContractError("psnr_masked: mask does not match the images");
  }
  const int c = a.channels();
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!(mask.at(y, x) < threshold)) continue;
      for (int ch = 0; ch < c; ++ch) {
        const double d = a.at(y, x, ch) - b.at(y, x, ch);
        sum_sq += d * d;
      }
      count += c;
    }
  }
  if (count == 0) {
    throw EvaluationError("focus mask selects no pixels at threshold " +
                          std::to_string(threshold));
  }
  const double mse = sum_sq / static_cast<double>(count);
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(1.0 / mse);
}

std::vector<TimingRow> run_timing_profile(
    const LightField& lf, const RefocusParams& base_refocus,
    const SolverParams& base_solver, int sr_factor,
    const DisparitySource& disparity_source, const std::vector<double>& k_values,
    const std::vector<int>& noi_values, int repeats) {
  const auto t = Clock::now();
  const DisparityMap dmap = resolve_disparity(lf, disparity_source);
  const double disparity_time = seconds_since(t);
  const DegradationSpec spec = DegradationSpec::for_light_field(lf, sr_factor);

  std::vector<TimingRow> rows;
  for (double k : k_values) {
    for (int noi : noi_values) {
      RefocusParams rp = base_refocus;
      rp.bokeh_intensity = k;
      SolverParams sp = base_solver;
      sp.noi = noi;
      TimingRow row{k, noi, {}};
      row.timings.total = std::numeric_limits<double>::infinity();
      for (int r = 0; r < std::max(repeats, 1); ++r) {
        const RefocusResult result = refocus(lf, rp, sp, spec, dmap);
        StageTimings timings = result.timings;
        timings.disparity = disparity_time;
        timings.total = disparity_time + timings.bokeh + timings.sr;
        if (timings.total < row.timings.total) row.timings = timings;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "k,noi,disparity_s,bokeh_s,sr_s,total_s\n";
  for (const auto& row : rows) {
    out << row.k << "," << row.noi << "," << format_seconds(row.timings.disparity)
        << "," << format_seconds(row.timings.bokeh) << ","
        << format_seconds(row.timings.sr) << ","
        << format_seconds(row.timings.total) << "\n";
  }
}

void write_weight_map(const std::filesystem::path& path, const WeightMap& wmap) {
  FloatRaster raster{wmap.height, wmap.width, {}};
  raster.values.assign(wmap.weights.begin(), wmap.weights.end());
  write_pfm(path, raster);
}

WeightMap load_weight_map(const std::filesystem::path& path) {
  const FloatRaster raster = read_pfm(path);
  WeightMap wmap{raster.height, raster.width, {}};
  wmap.weights.assign(raster.values.begin(), raster.values.end());
  for (double w : wmap.weights) {
    if (!(w >= 0.0 && w <= 1.0)) {
      throw ParseError(path.string() + ": weight outside [0, 1]");
    }
  }
  return wmap;
}

void save_intermediates(const std::filesystem::path& directory,
                        const RefocusResult& result, int bit_depth) {
  std::filesystem::create_directories(directory);
  write_disparity(directory / "disparity.pfm", result.disparity);
  write_weight_map(directory / "weights.pfm", result.weight_map);
  write_png(directory / "bokeh.png", result.bokeh_image, bit_depth);

  std::ofstream trace(directory / "trace.csv");
  trace << "iteration,objective\n";
  char buf[64];
  for (std::size_t i = 0; i < result.objective_trace.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, result.objective_trace[i]);
    trace << buf;
  }
  std::ofstream timings(directory / "timings.csv");
  timings << "disparity_s,bokeh_s,sr_s,total_s\n"
          << format_seconds(result.timings.disparity) << ","
          << format_seconds(result.timings.bokeh) << ","
          << format_seconds(result.timings.sr) << ","
          << format_seconds(result.timings.total) << "\n";
}

}  // namespace lfr
