// Acceptance gate. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "lfr/bokeh.h"
#include "lfr/disparity.h"
#include "lfr/operators.h"
#include "lfr/optics.h"
#include "lfr/pipeline.h"
#include "lfr/sr_solver.h"
#include "lfr/synthetic.h"
#include "test_util.h"

namespace lfr {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), pattern, a, b, c, d);
  return buf;
}

double adjoint_gap(const ImageGrid& x, const ImageGrid& ax, const ImageGrid& y,
                   const ImageGrid& aty) {
  return std::abs(dot(ax, y) - dot(x, aty)) /
         (std::sqrt(dot(ax, ax) * dot(y, y)) + 1e-300);
}

DisparityMap map_from(const ImageGrid& g) {
  return make_disparity_map(g.height(), g.width(), {g.data().begin(), g.data().end()});
}

// Two-plane HR disparity: a centred square at 5 px over a background at 3 px.
DisparityMap two_plane_hr(int n) {
  std::vector<double> v(static_cast<std::size_t>(n) * n, 3.0);
  for (int y = n / 4; y < 3 * n / 4; ++y) {
    for (int x = n / 4; x < 3 * n / 4; ++x) v[y * n + x] = 5.0;
  }
  return make_disparity_map(n, n, std::move(v));
}

Outcome operator_adjointness() {
  const int n = 32, s = 2;
  DegradationSpec spec;
  spec.sr_factor = s;
  spec.blur_sigma = 0.5 * s;
  spec.view_offsets = grid_offsets(3, 3, 1.0);
  double worst = 0.0;
  unsigned seed = 100;
  for (const DisparityMap& d : {constant_disparity(n, n, 3.0), two_plane_hr(n)}) {
    for (const ViewOffset off : spec.view_offsets) {
      const ImageGrid x = test::random_image(n, n, 1, seed++);
      const ImageGrid y = test::random_image(n, n, 1, seed++);
      const ImageGrid ylr = test::random_image(n / s, n / s, 1, seed++);
      worst = std::max(worst, adjoint_gap(x, warp_forward(x, d, off), y,
                                          warp_adjoint(y, d, off)));
      worst = std::max(worst, adjoint_gap(x, degrade(x, d, off, spec), ylr,
                                          degrade_adjoint(ylr, d, off, spec)));
    }
  }
  const ImageGrid x = test::random_image(n, n, 1, seed++);
  const ImageGrid y = test::random_image(n, n, 1, seed++);
  const ImageGrid ylr = test::random_image(n / s, n / s, 1, seed++);
  worst = std::max(worst, adjoint_gap(x, blur(x, spec.blur_sigma), y,
                                      blur_adjoint(y, spec.blur_sigma)));
  worst = std::max(worst, adjoint_gap(x, downsample(x, s), ylr, downsample_adjoint(ylr, s)));
  return {worst < 1e-10, fmt("max relative gap %.2e over F, H, D, DHF (limit 1e-10)", worst)};
}

Outcome gradient_check() {
  // Shipped defaults, including the 8-bit interpretation of the BTV weight.
  const unsigned seed = 1;
  DegradationSpec spec;
  spec.sr_factor = 2;
  spec.blur_sigma = 1.0;
  spec.view_offsets = {{0.0, 0.0}, {1.0, 0.0}};
  const DisparityMap d = map_from(test::random_image(12, 12, 1, seed, 0.0, 4.0));
  const std::vector<ImageGrid> views{test::random_image(6, 6, 1, seed + 1),
                                     test::random_image(6, 6, 1, seed + 2)};
  const ImageGrid xb = test::random_image(12, 12, 1, seed + 3);
  const ImageGrid wg = test::random_image(12, 12, 1, seed + 4);
  const WeightMap w{12, 12, {wg.data().begin(), wg.data().end()}};
  const ImageGrid x = test::random_image(12, 12, 1, seed + 5);
  const SolverParams params;
  const SrProblem problem(views, d, xb, w, spec, params);
  const ImageGrid g = problem.gradient(x);

  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  const double h = 1e-4;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t i = pick(rng);
    ImageGrid xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    const double fd = (problem.objective(xp) - problem.objective(xm)) / (2 * h);
    const double an = g.data()[i];
    worst = std::max(worst, std::abs(fd - an) / std::max({std::abs(fd), std::abs(an), 1e-8}));
  }
  return {worst < 1e-4,
          fmt("max relative FD error %.2e at 50 coordinates, h=1e-4 (limit 1e-4)", worst)};
}

Outcome bokeh_oracle() {
  const int n = 21, c = 10;
  ImageGrid imp(n, n, 1);
  imp.at(c, c) = 1.0;
  const CocRadiusMap r3{n, n, std::vector<double>(n * n, 3.0), 3.0, 3.0};
  const ImageGrid out = render_bokeh(imp, r3, {});
  ImageGrid disk(n, n, 1);
  const auto offsets = test::disk_offsets(3.0);
  for (const auto& [dx, dy] : offsets) disk.at(c + dy, c + dx) = 1.0 / 29.0;
  const double disk_err = max_abs_diff(out, disk);

  const ImageGrid rnd = test::random_image(40, 40, 1, 5, 0.0, 6.0);
  CocRadiusMap rr{40, 40, {rnd.data().begin(), rnd.data().end()}, 0.0, 0.0};
  rr.r_min = *std::min_element(rr.radii.begin(), rr.radii.end());
  rr.r_max = *std::max_element(rr.radii.begin(), rr.radii.end());
  const ImageGrid flat(40, 40, 3, 0.42);
  const double const_err = max_abs_diff(render_bokeh(flat, rr, {}), flat);

  const ImageGrid small = test::random_image(40, 40, 1, 6, 0.0, 0.4999);
  CocRadiusMap rs{40, 40, {small.data().begin(), small.data().end()}, 0.0, 0.4999};
  const ImageGrid img = test::random_image(40, 40, 3, 7);
  const double id_err = max_abs_diff(render_bokeh(img, rs, {}), img);

  const bool pass = offsets.size() == 29 && disk_err <= 1e-12 && const_err <= 1e-9 &&
                    id_err <= 1e-9;
  return {pass, fmt("disk error %.1e (limit 1e-12), constant %.1e, identity %.1e "
                    "(limit 1e-9)",
                    disk_err, const_err, id_err)};
}

Outcome end_to_end_gain() {
  const auto scene = synthesize_light_field(test::two_plane_scene());
  RefocusParams rp;
  rp.focus_disparity = 1.5;  // background plane
  const RefocusResult r = refocus(scene.lf, rp, SolverParams{},
                                  DegradationSpec::for_light_field(scene.lf, 2),
                                  EstimateDisparity{});
  const double sr = psnr_masked(r.output, scene.hr_reference, r.weight_map);
  const double bicubic =
      psnr_masked(bicubic_baseline(scene.lf, 2), scene.hr_reference, r.weight_map);
  const double first = r.objective_trace.front();
  const double last = r.objective_trace.back();
  const bool pass = sr - bicubic >= 1.0 && last < first;
  return {pass, fmt("focused PSNR %.2f dB vs bicubic %.2f dB (gain %.2f, need 1.00); ",
                    sr, bicubic, sr - bicubic) +
                    fmt("objective %.4g -> %.4g", first, last)};
}

Outcome weight_invariances() {
  const auto scene = synthesize_light_field(test::two_plane_scene());
  double worst = 0.0;
  std::vector<DisparityMap> maps{scene.gt_disparity,
                                 map_from(test::random_image(32, 32, 1, 9, -1.0, 4.0))};
  for (const auto& d : maps) {
    for (double df : {0.0, 1.5, 2.1}) {
      for (double k : {0.5, 1.0, 2.0, 3.7}) {
        RefocusParams p;
        p.focus_disparity = df;
        p.bokeh_intensity = k;
        RefocusParams p2 = p;
        p2.bokeh_intensity = 2 * k;
        const CocRadiusMap r1 = coc_radius_map(d, p);
        if (!(r1.r_max > r1.r_min)) continue;
        const WeightMap a = weight_map(r1, p);
        const WeightMap b = weight_map(coc_radius_map(d, p2), p2);
        for (std::size_t i = 0; i < a.weights.size(); ++i) {
          worst = std::max(worst, std::abs(a.weights[i] - b.weights[i]));
        }
      }
    }
  }
  // Radii 0, 0.3 and 1 give eta = 0, b and 1.
  RefocusParams p;
  p.bokeh_intensity = 1.0;
  const DisparityMap d = make_disparity_map(1, 3, {0.0, 0.3, 1.0});
  const double mid = weight_map(coc_radius_map(d, p), p).at(0, 1);
  const bool pass = worst <= 1e-12 && std::abs(mid - 0.5) <= 1e-12;
  return {pass, fmt("max |w(K) - w(2K)| %.1e (limit 1e-12); w(eta=b) = %.15f", worst, mid)};
}

Outcome disparity_recovery() {
  SyntheticSceneSpec spec;
  spec.hr_size = 128;
  spec.sr_factor = 2;
  spec.noise_sigma = 0.005;
  spec.layers = {PlaneLayer{2.0, std::nullopt, std::nullopt}};
  const auto scene = synthesize_light_field(spec);
  const DisparityEstimationParams params;
  const DisparityMap est = plane_sweep_disparity(scene.lf, params);
  // Interior: the matching window and every candidate shift stay in frame.
  const int border = params.window / 2 + static_cast<int>(std::ceil(params.d_hi));
  int hit = 0, total = 0;
  for (int y = border; y < est.height - border; ++y) {
    for (int x = border; x < est.width - border; ++x) {
      ++total;
      hit += std::abs(est.at(y, x) - 2.0) <= 0.5;
    }
  }
  const double frac = static_cast<double>(hit) / total;
  return {frac >= 0.95, fmt("%.2f%% of %.0f interior pixels within 0.5 px (need 95%%)",
                            100 * frac, static_cast<double>(total))};
}

Outcome timing_shape() {
  const auto scene = synthesize_light_field(test::two_plane_scene());
  RefocusParams rp;
  rp.focus_disparity = 1.5;
  const DisparityMap dmap = plane_sweep_disparity(scene.lf, {});
  const auto noi_rows =
      run_timing_profile(scene.lf, rp, {}, 2, dmap, {2.0}, {10, 20}, 3);
  const auto k_rows = run_timing_profile(scene.lf, rp, {}, 2, dmap, {1.0, 3.0}, {10}, 3);
  const double noi_ratio = noi_rows[1].timings.total / noi_rows[0].timings.total;
  const double k_ratio = k_rows[1].timings.total / k_rows[0].timings.total;
  return {noi_ratio > k_ratio,
          fmt("total time ratio noi 20/10 = %.2f, K 3/1 = %.2f", noi_ratio, k_ratio)};
}

Outcome disparity_robustness() {
  const auto scene = synthesize_light_field(test::two_plane_scene());
  RefocusParams rp;
  rp.focus_disparity = 1.5;
  const auto spec = DegradationSpec::for_light_field(scene.lf, 2);
  const RefocusResult clean = refocus(scene.lf, rp, {}, spec, scene.gt_disparity);

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> jitter(-0.25, 0.25);
  std::vector<double> noisy = scene.gt_disparity.values;
  for (double& v : noisy) v += jitter(rng);
  const RefocusResult perturbed =
      refocus(scene.lf, rp, {}, spec,
              make_disparity_map(scene.gt_disparity.height, scene.gt_disparity.width, noisy));

  // Both outputs are scored on the same focused region.
  const double a = psnr_masked(clean.output, scene.hr_reference, clean.weight_map);
  const double b = psnr_masked(perturbed.output, scene.hr_reference, clean.weight_map);
  return {std::abs(a - b) < 1.0,
          fmt("focused PSNR %.2f dB with exact disparity, %.2f dB with +/-0.25 px noise "
              "(change %.2f, limit 1.00)",
              a, b, std::abs(a - b))};
}

struct Criterion {
  const char* id;
  const char* name;
  double time_limit_s;  // <= 0: no limit
  std::function<Outcome()> run;
};

}  // namespace
}  // namespace lfr

int main() {
  using namespace lfr;
  const std::vector<Criterion> criteria = {
      {"AC1", "operator adjointness", 1.0, operator_adjointness},
      {"AC2", "gradient vs finite differences", 10.0, gradient_check},
      {"AC3", "bokeh filter oracle", 1.0, bokeh_oracle},
      {"AC4", "end-to-end SR gain", 60.0, end_to_end_gain},
      {"AC5", "weight-map invariances", 0.0, weight_invariances},
      {"AC6", "disparity recovery", 30.0, disparity_recovery},
      {"AC7", "timing shape", 0.0, timing_shape},
      {"AC8", "robustness to disparity error", 0.0, disparity_robustness},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    bool pass = outcome.pass;
    std::string timing = fmt("%.2f s", elapsed);
    if (c.time_limit_s > 0.0) {
      timing += fmt(" (limit %.0f s)", c.time_limit_s);
      pass = pass && elapsed < c.time_limit_s;
    }
    failures += !pass;
    std::printf("%s %s %s: %s; %s\n", c.id, pass ? "PASS" : "FAIL", c.name,
                outcome.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
