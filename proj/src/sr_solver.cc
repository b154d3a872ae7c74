#include "lfr/sr_solver.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "lfr/errors.h"

namespace lfr {

namespace {

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

template <typename Visit>
void for_each_btv_pair(const ImageGrid& x, int window, double alpha,
                       Visit&& visit) {
  const int h = x.height();
  const int w = x.width();
  for (int m = -window; m <= window; ++m) {
    for (int l = -window; l <= window; ++l) {
      if (l == 0 && m == 0) continue;
      const double coeff = std::pow(alpha, std::abs(l) + std::abs(m));
      for (int y = 0; y < h; ++y) {
        const int qy = clamp_index(y + m, h);
        for (int xx = 0; xx < w; ++xx) {
          visit(coeff, y, xx, qy, clamp_index(xx + l, w));
        }
      }
    }
  }
}

}  // namespace

void validate(const SolverParams& p) {
  if (!(p.lambda_b >= 0.0) || !(p.lambda_btv >= 0.0)) {
    throw ContractError("regularization weights must be >= 0");
  }
  if (!(p.step_size > 0.0)) throw ContractError("step size must be > 0");
  if (p.noi < 1) throw ContractError("noi must be >= 1");
  if (p.btv_window < 1) throw ContractError("BTV window must be >= 1");
  if (!(p.btv_alpha > 0.0 && p.btv_alpha < 1.0)) {
    throw ContractError("BTV alpha must lie in (0, 1)");
  }
  if (!(p.sign_epsilon > 0.0)) throw ContractError("sign epsilon must be > 0");
  if (!(p.intensity_scale > 0.0)) throw ContractError("intensity scale must be > 0");
}

double btv_value(const ImageGrid& x, int window, double alpha, double eps) {
  const int c = x.channels();
  const double eps_sq = eps * eps;
  double total = 0.0;
  for_each_btv_pair(x, window, alpha,
                    [&](double coeff, int y, int xx, int qy, int qx) {
                      double s = 0.0;
                      for (int ch = 0; ch < c; ++ch) {
                        const double t = x.at(y, xx, ch) - x.at(qy, qx, ch);
                        s += std::sqrt(t * t + eps_sq);
                      }
                      total += coeff * s;
                    });
  return total;
}

ImageGrid btv_gradient(const ImageGrid& x, int window, double alpha,
                       double eps) {
  const int c = x.channels();
  const double eps_sq = eps * eps;
  ImageGrid g(x.height(), x.width(), c);
  for_each_btv_pair(x, window, alpha,
                    [&](double coeff, int y, int xx, int qy, int qx) {
                      for (int ch = 0; ch < c; ++ch) {
                        const double t = x.at(y, xx, ch) - x.at(qy, qx, ch);
                        const double sgn = coeff * t / std::sqrt(t * t + eps_sq);
                        g.at(y, xx, ch) += sgn;
                        g.at(qy, qx, ch) -= sgn;
                      }
                    });
  return g;
}

SrProblem::SrProblem(std::span<const ImageGrid> views,
                     const DisparityMap& dmap_hr, const ImageGrid& bokeh,
                     const WeightMap& weights, const DegradationSpec& spec,
                     const SolverParams& params)
    : views_(views),
      dmap_hr_(dmap_hr),
      bokeh_(bokeh),
      spec_(spec),
      params_(params) {
  validate(params);
  if (views.empty()) throw ContractError("SR needs at least one view");
  if (spec.view_offsets.size() != views.size()) {
    throw ContractError("degradation spec has " +
                        std::to_string(spec.view_offsets.size()) +
                        " offsets for " + std::to_string(views.size()) +
                        " views");
  }
  const int s = spec.sr_factor;
  const ImageGrid& first = views.front();
  if (bokeh.height() != first.height() * s || bokeh.width() != first.width() * s ||
      bokeh.channels() != first.channels()) {
    throw ContractError("bokeh image must be sr_factor x the view size");
  }
  if (dmap_hr.height != bokeh.height() || dmap_hr.width != bokeh.width() ||
      weights.height != bokeh.height() || weights.width != bokeh.width()) {
    throw ContractError("disparity and weight maps must be at HR resolution");
  }
  for (const auto& v : views) {
    if (!v.same_shape(first)) throw ContractError("views differ in shape");
  }

  weight_sq_.resize(weights.weights.size());
  ImageGrid weight_img(weights.height, weights.width, 1);
  for (std::size_t p = 0; p < weights.weights.size(); ++p) {
    weight_sq_[p] = weights.weights[p] * weights.weights[p];
    weight_img.data()[p] = weights.weights[p];
  }
  for (std::size_t k = 0; k < views.size(); ++k) {
    ImageGrid lr = downsample(
        warp_nearest(weight_img, dmap_hr, spec.view_offsets[k]), s);
    for (double& v : lr.data()) v = (1.0 - v) * (1.0 - v);
    data_mask_sq_.push_back(std::move(lr));
  }
}

void SrProblem::check_shape(const ImageGrid& x) const {
  if (!x.same_shape(bokeh_)) {
    throw ContractError("estimate shape does not match the bokeh image");
  }
}

double SrProblem::data_term(const ImageGrid& x) const {
  check_shape(x);
  const int c = x.channels();
  double total = 0.0;
  for (std::size_t k = 0; k < views_.size(); ++k) {
    const ImageGrid predicted = degrade(x, dmap_hr_, spec_.view_offsets[k], spec_);
    auto pred = predicted.data();
    auto obs = views_[k].data();
    auto mask = data_mask_sq_[k].data();
    for (std::size_t i = 0; i < pred.size(); ++i) {
      const double r = obs[i] - pred[i];
      total += mask[i / c] * r * r;
    }
  }
  return total;
}

double SrProblem::bokeh_term(const ImageGrid& x) const {
  check_shape(x);
  const int c = x.channels();
  auto xs = x.data();
  auto xb = bokeh_.data();
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = xs[i] - xb[i];
    total += weight_sq_[i / c] * r * r;
  }
  return total;
}

double SrProblem::btv_term(const ImageGrid& x) const {
  check_shape(x);
  return btv_value(x, params_.btv_window, params_.btv_alpha,
                   params_.effective_epsilon());
}

double SrProblem::objective(const ImageGrid& x) const {
  double value = data_term(x) + params_.lambda_b * bokeh_term(x);
  if (params_.lambda_btv > 0.0) {
    value += params_.effective_btv_weight() * btv_term(x);
  }
  return value;
}

ImageGrid SrProblem::gradient(const ImageGrid& x) const {
  check_shape(x);
  const int c = x.channels();
  ImageGrid g(x.height(), x.width(), c);
  auto gs = g.data();

  // Views are accumulated in index order so the sum is reproducible.
  for (std::size_t k = 0; k < views_.size(); ++k) {
    ImageGrid residual = degrade(x, dmap_hr_, spec_.view_offsets[k], spec_);
    auto r = residual.data();
    auto obs = views_[k].data();
    auto mask = data_mask_sq_[k].data();
    for (std::size_t i = 0; i < r.size(); ++i) {
      r[i] = 2.0 * mask[i / c] * (r[i] - obs[i]);
    }
    const ImageGrid back =
        degrade_adjoint(residual, dmap_hr_, spec_.view_offsets[k], spec_);
    auto b = back.data();
    for (std::size_t i = 0; i < gs.size(); ++i) gs[i] += b[i];
  }

  auto xs = x.data();
  auto xb = bokeh_.data();
  for (std::size_t i = 0; i < gs.size(); ++i) {
    gs[i] += 2.0 * params_.lambda_b * weight_sq_[i / c] * (xs[i] - xb[i]);
  }

  if (params_.lambda_btv > 0.0) {
    const ImageGrid gb = btv_gradient(x, params_.btv_window, params_.btv_alpha,
                                      params_.effective_epsilon());
    auto gbs = gb.data();
    const double weight = params_.effective_btv_weight();
    for (std::size_t i = 0; i < gs.size(); ++i) gs[i] += weight * gbs[i];
  }
  return g;
}

double objective(const ImageGrid& x, const LightField& lf,
                 const DisparityMap& dmap_hr, const ImageGrid& bokeh,
                 const WeightMap& weights, const DegradationSpec& spec,
                 const SolverParams& params) {
  return SrProblem(lf.views, dmap_hr, bokeh, weights, spec, params).objective(x);
}

ImageGrid gradient(const ImageGrid& x, const LightField& lf,
                   const DisparityMap& dmap_hr, const ImageGrid& bokeh,
                   const WeightMap& weights, const DegradationSpec& spec,
                   const SolverParams& params) {
  return SrProblem(lf.views, dmap_hr, bokeh, weights, spec, params).gradient(x);
}

SrResult super_resolve(const LightField& lf, const DisparityMap& dmap_hr,
                       const ImageGrid& bokeh, const WeightMap& weights,
                       const DegradationSpec& spec, const SolverParams& params,
                       const IterationCallback& on_iteration) {
  const SrProblem problem(lf.views, dmap_hr, bokeh, weights, spec, params);

  SrResult result;
  result.output = bokeh;
  double current = problem.objective(result.output);
  result.objective_trace.reserve(params.noi + 1);
  result.objective_trace.push_back(current);

  auto take_step = [&](const ImageGrid& g, double beta) {
    ImageGrid next = result.output;
    auto ns = next.data();
    auto gs = g.data();
    for (std::size_t i = 0; i < ns.size(); ++i) {
      ns[i] = std::clamp(ns[i] - beta * gs[i], 0.0, 1.0);
    }
    return next;
  };

  constexpr int kMaxHalvings = 8;
  for (int t = 1; t <= params.noi; ++t) {
    const ImageGrid g = problem.gradient(result.output);
    if (!params.backtracking) {
      result.output = take_step(g, params.step_size);
      current = problem.objective(result.output);
    } else {
      double beta = params.step_size;
      for (int halving = 0; halving <= kMaxHalvings; ++halving, beta *= 0.5) {
        ImageGrid candidate = take_step(g, beta);
        const double value = problem.objective(candidate);
        if (value <= current) {
          result.output = std::move(candidate);
          current = value;
          break;
        }
      }
    }
    result.objective_trace.push_back(current);
    if (on_iteration) on_iteration(t);
  }
  return result;
}

}  // namespace lfr
