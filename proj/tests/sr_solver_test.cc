#include <algorithm>
#include <cmath>
#include <random>

#include "gtest/gtest.h"

#include "lfr/errors.h"
#include "lfr/operators.h"
#include "lfr/sr_solver.h"
#include "test_util.h"

namespace lfr {
namespace {

WeightMap uniform_weights(int h, int w, double value) {
  return WeightMap{h, w, std::vector<double>(static_cast<std::size_t>(h) * w, value)};
}

WeightMap random_weights(int h, int w, unsigned seed) {
  const ImageGrid g = test::random_image(h, w, 1, seed);
  return WeightMap{h, w, {g.data().begin(), g.data().end()}};
}

DisparityMap random_disparity(int h, int w, unsigned seed, double lo, double hi) {
  const ImageGrid g = test::random_image(h, w, 1, seed, lo, hi);
  return make_disparity_map(h, w, {g.data().begin(), g.data().end()});
}

// Views rendered exactly by the forward model from x.
std::vector<ImageGrid> render_views(const ImageGrid& x, const DisparityMap& dmap_hr,
                                    const DegradationSpec& spec) {
  std::vector<ImageGrid> views;
  for (const auto& off : spec.view_offsets) views.push_back(degrade(x, dmap_hr, off, spec));
  return views;
}

// Small random instance: 12x12 HR, s = 2, two views.
struct Instance {
  DegradationSpec spec;
  DisparityMap dmap;
  std::vector<ImageGrid> views;
  ImageGrid bokeh;
  WeightMap weights;
  ImageGrid x;
};

Instance random_instance(unsigned seed, int channels = 1) {
  Instance in;
  in.spec.sr_factor = 2;
  in.spec.blur_sigma = 1.0;
  in.spec.view_offsets = {{0.0, 0.0}, {1.0, -0.5}};
  in.dmap = random_disparity(12, 12, seed, 0.0, 3.0);
  in.views = {test::random_image(6, 6, channels, seed + 1),
              test::random_image(6, 6, channels, seed + 2)};
  in.bokeh = test::random_image(12, 12, channels, seed + 3);
  in.weights = random_weights(12, 12, seed + 4);
  in.x = test::random_image(12, 12, channels, seed + 5);
  return in;
}

TEST(Btv, ConstantImageCostsEpsilonPerPair) {
  const ImageGrid flat(7, 5, 2, 0.4);
  double coeff_sum = 0.0;
  for (int m = -2; m <= 2; ++m) {
    for (int l = -2; l <= 2; ++l) {
      if (l != 0 || m != 0) coeff_sum += std::pow(0.6, std::abs(l) + std::abs(m));
    }
  }
  EXPECT_NEAR(coeff_sum, 2.92 * 2.92 - 1.0, 1e-12);
  EXPECT_NEAR(btv_value(flat, 2, 0.6, 1e-3), 7 * 5 * 2 * 1e-3 * coeff_sum, 1e-12);
  const ImageGrid g = btv_gradient(flat, 2, 0.6, 1e-3);
  for (double v : g.data()) EXPECT_EQ(v, 0.0);
}

TEST(Btv, StepEdgeCostOnSingleRow) {
  // One row [0, 1]: with clamped shifts only horizontal pairs that straddle
  // the edge differ, each contributing |t| = 1 (up to epsilon).
  ImageGrid row(1, 2, 1);
  row.at(0, 1) = 1.0;
  double expected = 0.0;
  for (int m = -1; m <= 1; ++m) {
    for (int l = -1; l <= 1; ++l) {
      if (l == 0 && m == 0) continue;
      const double coeff = std::pow(0.5, std::abs(l) + std::abs(m));
      for (int x = 0; x < 2; ++x) {
        const int q = std::clamp(x + l, 0, 1);
        expected += coeff * (q == x ? 0.0 : 1.0);
      }
    }
  }
  EXPECT_NEAR(btv_value(row, 1, 0.5, 1e-9), expected, 1e-8);
}

TEST(Objective, ExactFitIsZero) {
  DegradationSpec spec;
  spec.sr_factor = 2;
  spec.blur_sigma = 1.0;
  spec.view_offsets = {{0, 0}, {1, 0}, {0, 1}};
  const ImageGrid x = test::random_image(16, 16, 3, 1);
  const auto dmap = random_disparity(16, 16, 2, 0.0, 2.0);
  const auto views = render_views(x, dmap, spec);
  SolverParams params;
  params.lambda_btv = 0.0;
  const SrProblem problem(views, dmap, x, random_weights(16, 16, 3), spec, params);
  EXPECT_EQ(problem.objective(x), 0.0);
  const ImageGrid g = problem.gradient(x);
  for (double v : g.data()) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(Objective, ConstantImageLeavesOnlyBtvFloor) {
  DegradationSpec spec;
  spec.sr_factor = 2;
  spec.view_offsets = {{0, 0}};
  const ImageGrid x(8, 8, 1, 0.5);
  const auto dmap = constant_disparity(8, 8, 1.0);
  const auto views = render_views(x, dmap, spec);
  SolverParams params;
  params.lambda_b = 0.0;
  params.intensity_scale = 1.0;
  const SrProblem problem(views, dmap, x, uniform_weights(8, 8, 0.0), spec, params);
  EXPECT_NEAR(problem.objective(x), 0.2 * 64 * 1e-3 * (2.92 * 2.92 - 1.0), 1e-12);
}

TEST(Objective, SingleViewIdentityIsLeastSquares) {
  DegradationSpec spec;
  spec.sr_factor = 1;
  spec.blur_sigma = 0.0;
  spec.view_offsets = {{0, 0}};
  const ImageGrid x = test::random_image(9, 9, 1, 4);
  const std::vector<ImageGrid> views{test::random_image(9, 9, 1, 5)};
  SolverParams params;
  params.lambda_b = 0.0;
  params.lambda_btv = 0.0;
  const auto dmap = constant_disparity(9, 9, 0.0);
  const SrProblem problem(views, dmap, x, uniform_weights(9, 9, 0.0), spec, params);
  double expected = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = views[0].data()[i] - x.data()[i];
    expected += r * r;
  }
  EXPECT_NEAR(problem.objective(x), expected, 1e-12);
}

// Worst relative error between the analytic gradient and central
// differences over 50 random coordinates.
double worst_fd_error(const SrProblem& problem, const ImageGrid& x, unsigned seed) {
  const ImageGrid g = problem.gradient(x);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  const double h = 1e-4;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t i = pick(rng);
    ImageGrid xp = x, xm = x;
    xp.data()[i] += h;
    xm.data()[i] -= h;
    const double fd = (problem.objective(xp) - problem.objective(xm)) / (2 * h);
    const double an = g.data()[i];
    worst = std::max(worst, std::abs(fd - an) /
                                std::max({std::abs(fd), std::abs(an), 1e-8}));
  }
  return worst;
}

TEST(Gradient, QuadraticTermsMatchCentralDifferences) {
  for (unsigned seed : {1u, 20u, 300u}) {
    for (int channels : {1, 3}) {
      Instance in = random_instance(seed, channels);
      SolverParams params;
      params.lambda_btv = 0.0;
      const SrProblem problem(in.views, in.dmap, in.bokeh, in.weights, in.spec, params);
      EXPECT_LT(worst_fd_error(problem, in.x, seed), 1e-6) << seed;
    }
  }
}

TEST(Gradient, BtvDominatedObjectiveMatchesCentralDifferences) {
  // A wide smoothing epsilon keeps the step h far below the curvature scale
  // of the smoothed absolute value, so the difference quotient is accurate.
  for (unsigned seed : {1u, 20u, 300u}) {
    for (int channels : {1, 3}) {
      Instance in = random_instance(seed, channels);
      SolverParams params;
      params.intensity_scale = 1.0;
      params.lambda_btv = 2.0;
      params.sign_epsilon = 0.1;
      const SrProblem problem(in.views, in.dmap, in.bokeh, in.weights, in.spec, params);
      EXPECT_LT(worst_fd_error(problem, in.x, seed), 1e-4) << seed;
    }
  }
}

TEST(Gradient, BtvGradientMatchesCentralDifferencesOfBtvValue) {
  const ImageGrid x = test::random_image(9, 7, 2, 31);
  const ImageGrid g = btv_gradient(x, 2, 0.6, 0.05);
  for (std::size_t i = 0; i < x.size(); i += 5) {
    ImageGrid xp = x, xm = x;
    xp.data()[i] += 1e-5;
    xm.data()[i] -= 1e-5;
    const double fd = (btv_value(xp, 2, 0.6, 0.05) - btv_value(xm, 2, 0.6, 0.05)) / 2e-5;
    EXPECT_NEAR(g.data()[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(Gradient, BokehTermHasClosedForm) {
  Instance in = random_instance(7);
  // Views equal to the prediction zero the data residual.
  in.views = render_views(in.x, in.dmap, in.spec);
  SolverParams params;
  params.lambda_btv = 0.0;
  params.lambda_b = 3.0;
  const SrProblem problem(in.views, in.dmap, in.bokeh, in.weights, in.spec, params);
  const ImageGrid g = problem.gradient(in.x);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = in.weights.weights[i];
    ASSERT_NEAR(g.data()[i], 2 * 3.0 * w * w * (in.x.data()[i] - in.bokeh.data()[i]),
                1e-12);
  }
}

TEST(Gradient, FullyBokehPixelsFeelNoDataPull) {
  const int n = 24;
  DegradationSpec spec;
  spec.sr_factor = 2;
  spec.blur_sigma = 1.0;
  spec.view_offsets = {{0, 0}};
  WeightMap w = uniform_weights(n, n, 0.0);
  for (int y = 4; y < 20; ++y) {
    for (int x = 4; x < 20; ++x) w.weights[y * n + x] = 1.0;
  }
  const auto dmap = constant_disparity(n, n, 0.0);
  const std::vector<ImageGrid> views{test::random_image(12, 12, 1, 8)};
  const ImageGrid xb = test::random_image(n, n, 1, 9);
  SolverParams params;
  params.lambda_btv = 0.0;
  const SrProblem problem(views, dmap, xb, w, spec, params);
  const ImageGrid g = problem.gradient(xb);
  // Blur radius 2 plus one LR step keeps these HR pixels out of any
  // unmasked LR footprint.
  for (int y = 7; y < 17; ++y) {
    for (int x = 7; x < 17; ++x) ASSERT_EQ(g.at(y, x), 0.0) << y << "," << x;
  }
  SrResult r = super_resolve(make_light_field(views, 1, 1, 1.0), dmap, xb, w, spec, params);
  for (int y = 7; y < 17; ++y) {
    for (int x = 7; x < 17; ++x) ASSERT_EQ(r.output.at(y, x), xb.at(y, x));
  }
}

TEST(Gradient, LrMaskIsWarpedHrWeight) {
  Instance in = random_instance(11);
  const SrProblem problem(in.views, in.dmap, in.bokeh, in.weights, in.spec, SolverParams{});
  for (int k = 0; k < 2; ++k) {
    const auto off = in.spec.view_offsets[k];
    const ImageGrid& m = problem.data_mask_sq(k);
    for (int y = 0; y < 6; ++y) {
      for (int x = 0; x < 6; ++x) {
        const int hy = 2 * y, hx = 2 * x;
        const double d = in.dmap.at(hy, hx);
        const int sy = std::clamp(static_cast<int>(std::lround(hy + off.v * d)), 0, 11);
        const int sx = std::clamp(static_cast<int>(std::lround(hx + off.u * d)), 0, 11);
        const double w = in.weights.at(sy, sx);
        ASSERT_NEAR(m.at(y, x), (1 - w) * (1 - w), 1e-15);
      }
    }
  }
}

TEST(IntensityScale, EquivalentToCodeUnitObjective) {
  const double s = 255.0;
  Instance in = random_instance(13);
  SolverParams scaled;
  const SrProblem unit(in.views, in.dmap, in.bokeh, in.weights, in.spec, scaled);

  auto times = [&](const ImageGrid& img) {
    ImageGrid out = img;
    for (double& v : out.data()) v *= s;
    return out;
  };
  std::vector<ImageGrid> views_code{times(in.views[0]), times(in.views[1])};
  const ImageGrid bokeh_code = times(in.bokeh);
  SolverParams literal;
  literal.intensity_scale = 1.0;
  const SrProblem code(views_code, in.dmap, bokeh_code, in.weights, in.spec, literal);

  const double e_unit = unit.objective(in.x);
  const double e_code = code.objective(times(in.x)) / (s * s);
  EXPECT_NEAR(e_unit / e_code, 1.0, 1e-12);
}

TEST(Solver, DegenerateAllBokehSceneIsAFixedPoint) {
  Instance in = random_instance(17);
  SolverParams params;
  params.lambda_btv = 0.0;
  const auto lf = make_light_field(in.views, 1, 2, 1.0);
  const SrResult r = super_resolve(lf, in.dmap, in.bokeh, uniform_weights(12, 12, 1.0),
                                   in.spec, params);
  EXPECT_EQ(max_abs_diff(r.output, in.bokeh), 0.0);
  ASSERT_EQ(r.objective_trace.size(), 11u);
  for (double v : r.objective_trace) EXPECT_EQ(v, 0.0);
}

TEST(Solver, TraceLengthCallbackAndRange) {
  Instance in = random_instance(19);
  SolverParams params;
  params.noi = 7;
  params.step_size = 5.0;
  std::vector<int> seen;
  const auto lf = make_light_field(in.views, 1, 2, 1.0);
  const SrResult r = super_resolve(lf, in.dmap, in.bokeh, in.weights, in.spec, params,
                                   [&](int t) { seen.push_back(t); });
  EXPECT_EQ(r.objective_trace.size(), 8u);
  EXPECT_EQ(seen, (std::vector<int>{1, 2, 3, 4, 5, 6, 7}));
  for (double v : r.output.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Solver, BacktrackingNeverIncreasesObjective) {
  SyntheticSceneSpec spec = test::two_plane_scene();
  spec.hr_size = 48;
  const auto scene = synthesize_light_field(spec);
  const auto dspec = DegradationSpec::for_light_field(scene.lf, 2);
  const WeightMap w = random_weights(48, 48, 21);
  ImageGrid xb = test::random_image(48, 48, 1, 22);
  for (double scale : {1.0, 255.0}) {
    SolverParams params;
    params.backtracking = true;
    params.step_size = 2.0;
    params.noi = 8;
    params.intensity_scale = scale;
    const SrResult r = super_resolve(scene.lf, scene.gt_disparity_hr, xb, w, dspec, params);
    for (std::size_t t = 1; t < r.objective_trace.size(); ++t) {
      EXPECT_LE(r.objective_trace[t], r.objective_trace[t - 1]);
    }
    EXPECT_LT(r.objective_trace.back(), r.objective_trace.front());
  }
}

TEST(Solver, IsDeterministic) {
  Instance in = random_instance(23, 3);
  const auto lf = make_light_field(in.views, 1, 2, 1.0);
  const SrResult a = super_resolve(lf, in.dmap, in.bokeh, in.weights, in.spec, {});
  const SrResult b = super_resolve(lf, in.dmap, in.bokeh, in.weights, in.spec, {});
  EXPECT_EQ(max_abs_diff(a.output, b.output), 0.0);
  EXPECT_EQ(a.objective_trace, b.objective_trace);
}

TEST(Solver, ContractViolations) {
  Instance in = random_instance(29);
  SolverParams params;
  EXPECT_THROW(SrProblem(in.views, in.dmap, ImageGrid(10, 12, 1), in.weights, in.spec,
                         params),
               ContractError);
  DegradationSpec one_offset = in.spec;
  one_offset.view_offsets.pop_back();
  EXPECT_THROW(SrProblem(in.views, in.dmap, in.bokeh, in.weights, one_offset, params),
               ContractError);
  const SrProblem ok(in.views, in.dmap, in.bokeh, in.weights, in.spec, params);
  EXPECT_THROW(ok.objective(ImageGrid(12, 12, 3)), ContractError);
  params.noi = 0;
  EXPECT_THROW(validate(params), ContractError);
  params = {};
  params.step_size = 0.0;
  EXPECT_THROW(validate(params), ContractError);
}

}  // namespace
}  // namespace lfr
