// Command-line front end: synth, disparity, refocus, eval, profile, serve.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lfr/disparity.h"
#include "lfr/light_field.h"
#include "lfr/pipeline.h"
#include "lfr/png_io.h"
#include "lfr/service.h"
#include "lfr/synthetic.h"

namespace fs = std::filesystem;

namespace {

std::pair<int, int> parse_grid(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw CLI::ValidationError("--grid", "expected RxC");
  return {std::stoi(text.substr(0, x)), std::stoi(text.substr(x + 1))};
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw CLI::ValidationError("--range", "expected LO:HI");
  }
  return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

template <typename T>
std::vector<T> parse_list(const std::string& text) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if constexpr (std::is_integral_v<T>) {
      out.push_back(std::stoi(item));
    } else {
      out.push_back(std::stod(item));
    }
  }
  return out;
}

lfr::DisparityEstimationParams estimation_for(const lfr::LightFieldMeta& meta) {
  lfr::DisparityEstimationParams params;
  if (meta.disparity_range) {
    params.d_lo = meta.disparity_range->first;
    params.d_hi = meta.disparity_range->second;
  }
  return params;
}

double median(std::vector<double> values) {
  auto mid = values.begin() + values.size() / 2;
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective light-field refocusing: bokeh rendering plus "
               "multi-view super-resolution"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Render a synthetic light field");
  std::string synth_out, grid_text = "3x3", planes_text = "2.5@0.3,0.3,0.7,0.7/1.5";
  int hr_size = 128, synth_scale = 2;
  double noise = 0.005;
  std::uint64_t seed = 1;
  synth->add_option("--out", synth_out, "Output dataset directory")->required();
  synth->add_option("--hr-size", hr_size, "HR frame side in pixels");
  synth->add_option("--grid", grid_text, "View grid RxC");
  synth->add_option("--scale", synth_scale, "Decimation factor");
  synth->add_option("--planes", planes_text,
                    "Planes front to back: D[@x0,y0,x1,y1] separated by '/'");
  synth->add_option("--noise", noise, "Gaussian noise sigma");
  synth->add_option("--seed", seed, "Texture and noise seed");

  // disparity
  auto* disp = app.add_subcommand("disparity", "Estimate reference disparity");
  std::string disp_in, disp_out, range_text;
  int num_hypotheses = 33, window = 7;
  disp->add_option("--input", disp_in, "Dataset directory")->required();
  disp->add_option("--out", disp_out, "Output PFM")->required();
  disp->add_option("--n", num_hypotheses, "Number of disparity hypotheses");
  disp->add_option("--range", range_text, "Sweep range LO:HI");
  disp->add_option("--window", window, "Odd matching window");

  // refocus
  auto* ref = app.add_subcommand("refocus", "Refocus and super-resolve");
  std::string ref_in, ref_disp, ref_out, intermediates;
  lfr::RefocusParams rp;
  lfr::SolverParams sp;
  int ref_scale = 2;
  ref->add_option("--input", ref_in, "Dataset directory")->required();
  ref->add_option("--disparity", ref_disp, "External disparity PFM");
  ref->add_option("--df", rp.focus_disparity, "Focus disparity")->required();
  ref->add_option("--k", rp.bokeh_intensity, "Bokeh intensity K");
  ref->add_option("--scale", ref_scale, "SR factor");
  ref->add_option("--noi", sp.noi, "Number of iterations");
  ref->add_option("--step", sp.step_size, "Step size");
  ref->add_option("--lambda-b", sp.lambda_b, "Bokeh regularizer weight");
  ref->add_option("--lambda-btv", sp.lambda_btv, "BTV weight");
  ref->add_option("--a", rp.sigmoid_decay, "Sigmoid decay");
  ref->add_option("--b", rp.sigmoid_threshold, "Sigmoid threshold");
  ref->add_option("--out", ref_out, "Output PNG")->required();
  ref->add_option("--save-intermediates", intermediates,
                  "Directory for disparity, weights, bokeh, trace, timings");
  ref->add_flag("--backtracking", sp.backtracking, "Backtracking line search");

  // eval
  auto* eval = app.add_subcommand("eval", "Masked PSNR of a result");
  std::string eval_result, eval_gt, eval_weights;
  double threshold = 0.5;
  eval->add_option("--result", eval_result, "Result PNG")->required();
  eval->add_option("--gt", eval_gt, "Ground-truth PNG")->required();
  eval->add_option("--weights", eval_weights, "Weight map PFM")->required();
  eval->add_option("--threshold", threshold, "Focus threshold on the weights");

  // profile
  auto* prof = app.add_subcommand("profile", "Stage timings over K and NoI");
  std::string prof_in, prof_out, k_list = "1,2,3", noi_list = "5,10,20";
  std::optional<double> prof_df;
  int prof_scale = 2, repeats = 1;
  prof->add_option("--input", prof_in, "Dataset directory")->required();
  prof->add_option("--k-list", k_list, "Comma-separated K values");
  prof->add_option("--noi-list", noi_list, "Comma-separated NoI values");
  prof->add_option("--out", prof_out, "Output CSV")->required();
  prof->add_option("--df", prof_df, "Focus disparity (default: median)");
  prof->add_option("--scale", prof_scale, "SR factor");
  prof->add_option("--repeats", repeats, "Runs per cell, fastest kept");

  // serve
  auto* serve = app.add_subcommand("serve", "Run the refocusing HTTP service");
  std::string serve_in, serve_disp, host = "127.0.0.1";
  int port = 8080;
  serve->add_option("--input", serve_in, "Dataset directory")->required();
  serve->add_option("--disparity", serve_disp, "External disparity PFM");
  serve->add_option("--port", port, "TCP port");
  serve->add_option("--host", host, "Bind address");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      lfr::SyntheticSceneSpec spec;
      std::tie(spec.rows, spec.cols) = parse_grid(grid_text);
      spec.hr_size = hr_size;
      spec.sr_factor = synth_scale;
      spec.layers = lfr::parse_plane_spec(planes_text);
      spec.noise_sigma = noise;
      spec.seed = seed;
      const auto scene = lfr::synthesize_light_field(spec);

      double lo = spec.layers.front().disparity, hi = lo;
      for (const auto& l : spec.layers) {
        lo = std::min(lo, l.disparity);
        hi = std::max(hi, l.disparity);
      }
      lfr::LightFieldMeta meta{spec.rows, spec.cols, spec.offset_step,
                               std::make_pair(std::floor(lo) - 1.0, std::ceil(hi) + 1.0)};
      lfr::write_light_field(synth_out, scene.lf, meta);
      lfr::write_png(fs::path(synth_out) / "gt.png", scene.hr_reference, 16);
      lfr::write_disparity(fs::path(synth_out) / "gt_disparity.pfm", scene.gt_disparity);
      lfr::write_disparity(fs::path(synth_out) / "gt_disparity_hr.pfm",
                           scene.gt_disparity_hr);
      std::cout << "wrote " << scene.lf.view_count() << " views to " << synth_out << "\n";
    } else if (*disp) {
      lfr::LightFieldMeta meta;
      const auto lf = lfr::load_light_field(disp_in, &meta);
      auto params = estimation_for(meta);
      params.num_hypotheses = num_hypotheses;
      params.window = window;
      if (!range_text.empty()) std::tie(params.d_lo, params.d_hi) = parse_range(range_text);
      const auto dmap = lfr::plane_sweep_disparity(lf, params);
      lfr::write_disparity(disp_out, dmap);
      std::cout << "disparity range [" << dmap.d_min << ", " << dmap.d_max << "]\n";
    } else if (*ref) {
      lfr::LightFieldMeta meta;
      const auto lf = lfr::load_light_field(ref_in, &meta);
      lfr::DisparitySource source = lfr::EstimateDisparity{estimation_for(meta)};
      if (!ref_disp.empty()) source = lfr::load_disparity(ref_disp);
      const auto result = lfr::refocus(
          lf, rp, sp, lfr::DegradationSpec::for_light_field(lf, ref_scale), source);
      lfr::write_png(ref_out, result.output, lf.bit_depth);
      if (!intermediates.empty()) {
        lfr::save_intermediates(intermediates, result, lf.bit_depth);
      }
      std::printf("objective %.6g -> %.6g over %d iterations, %.3f s\n",
                  result.objective_trace.front(), result.objective_trace.back(),
                  sp.noi, result.timings.total);
    } else if (*eval) {
      const auto result = lfr::read_png(eval_result).image;
      const auto gt = lfr::read_png(eval_gt).image;
      const auto weights = lfr::load_weight_map(eval_weights);
      const double psnr = lfr::psnr_masked(result, gt, weights, threshold);
      if (std::isinf(psnr)) {
        std::cout << "psnr_db=inf\n";
      } else {
        std::printf("psnr_db=%.4f\n", psnr);
      }
    } else if (*prof) {
      lfr::LightFieldMeta meta;
      const auto lf = lfr::load_light_field(prof_in, &meta);
      const auto dmap = lfr::plane_sweep_disparity(lf, estimation_for(meta));
      lfr::RefocusParams base;
      base.focus_disparity = prof_df.value_or(median(dmap.values));
      const auto rows = lfr::run_timing_profile(
          lf, base, lfr::SolverParams{}, prof_scale, lfr::EstimateDisparity{estimation_for(meta)},
          parse_list<double>(k_list), parse_list<int>(noi_list), repeats);
      std::ofstream out(prof_out);
      lfr::write_timing_csv(out, rows);
      lfr::write_timing_csv(std::cout, rows);
    } else if (*serve) {
      lfr::ServiceOptions options;
      options.dataset_dir = serve_in;
      if (!serve_disp.empty()) options.disparity_path = serve_disp;
      lfr::RefocusService service(options);
      const int bound = service.start(host, port);
      std::cout << "serving " << serve_in << " on http://" << host << ":" << bound
                << std::endl;
      service.wait();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
