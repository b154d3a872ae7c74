#include "lfr/disparity.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lfr/errors.h"
#include "lfr/operators.h"

namespace lfr {

namespace {

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// Separable box sum with clamp-to-edge extension.
std::vector<double> box_sum(const std::vector<double>& in, int h, int w,
                            int radius) {
  if (radius == 0) return in;
  std::vector<double> tmp(in.size(), 0.0);
  std::vector<double> out(in.size(), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int t = -radius; t <= radius; ++t) s += in[y * w + clamp_index(x + t, w)];
      tmp[y * w + x] = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0.0;
      for (int t = -radius; t <= radius; ++t) s += tmp[clamp_index(y + t, h) * w + x];
      out[y * w + x] = s;
    }
  }
  return out;
}

std::vector<int> median_filter(const std::vector<int>& labels, int h, int w,
                               int window) {
  if (window <= 1) return labels;
  const int r = window / 2;
  std::vector<int> out(labels.size());
  std::vector<int> neighbourhood;
  neighbourhood.reserve(static_cast<std::size_t>(window) * window);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      neighbourhood.clear();
      for (int dy = -r; dy <= r; ++dy) {
        for (int dx = -r; dx <= r; ++dx) {
          neighbourhood.push_back(
              labels[clamp_index(y + dy, h) * w + clamp_index(x + dx, w)]);
        }
      }
      auto mid = neighbourhood.begin() + neighbourhood.size() / 2;
      std::nth_element(neighbourhood.begin(), mid, neighbourhood.end());
      out[y * w + x] = *mid;
    }
  }
  return out;
}

}  // namespace

void validate(const DisparityEstimationParams& params) {
  if (params.num_hypotheses < 2) throw ContractError("need at least 2 hypotheses");
  if (!(params.d_lo < params.d_hi)) throw ContractError("need d_lo < d_hi");
  if (params.window < 1 || params.window % 2 == 0) {
    throw ContractError("matching window must be odd and >= 1");
  }
  if (params.cost == MatchingCost::kTruncatedAbsoluteDifference &&
      !(params.truncation > 0.0)) {
    throw ContractError("truncation must be > 0");
  }
  if (params.median_window < 0 ||
      (params.median_window > 0 && params.median_window % 2 == 0)) {
    throw ContractError("median window must be 0 or odd");
  }
}

DisparityMap plane_sweep_disparity(const LightField& lf,
                                   const DisparityEstimationParams& params) {
  if (lf.view_count() < 2) {
    throw EstimationError(
        "disparity cannot be estimated from a single view; load an external "
        "map with load_disparity instead");
  }
  validate(params);

  const ImageGrid& ref = lf.reference();
  const int h = ref.height();
  const int w = ref.width();
  const int c = ref.channels();
  const std::size_t pixels = static_cast<std::size_t>(h) * w;
  const double tau = params.cost == MatchingCost::kTruncatedAbsoluteDifference
                         ? params.truncation
                         : std::numeric_limits<double>::infinity();

  std::vector<double> best_cost(pixels, std::numeric_limits<double>::infinity());
  std::vector<int> best_label(pixels, 0);
  std::vector<double> cost(pixels);

  for (int j = 0; j < params.num_hypotheses; ++j) {
    const double d = params.hypothesis(j);
    std::fill(cost.begin(), cost.end(), 0.0);
    for (int k = 0; k < lf.view_count(); ++k) {
      if (k == lf.reference_index) continue;
      const ViewOffset off = lf.offsets[k];
      auto view = lf.views[k].data();
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          const auto st = bilinear_stencil(x - off.u * d, y - off.v * d, w, h);
          double e = 0.0;
          for (int ch = 0; ch < c; ++ch) {
            double v = 0.0;
            for (int i = 0; i < 4; ++i) v += st.weight[i] * view[st.index[i] * c + ch];
            e += std::min(std::abs(v - ref.at(y, x, ch)), tau);
          }
          cost[y * w + x] += e / c;
        }
      }
    }
    const auto aggregated = box_sum(cost, h, w, params.window / 2);
    for (std::size_t p = 0; p < pixels; ++p) {
      if (aggregated[p] < best_cost[p]) {
        best_cost[p] = aggregated[p];
        best_label[p] = j;
      }
    }
  }

  const auto labels = median_filter(best_label, h, w, params.median_window);
  std::vector<double> values(pixels);
  for (std::size_t p = 0; p < pixels; ++p) values[p] = params.hypothesis(labels[p]);
  return make_disparity_map(h, w, std::move(values));
}

DisparityMap upsample_disparity(const DisparityMap& dmap, int s) {
  if (s < 1) throw ContractError("upsample factor must be >= 1");
  if (s == 1) return dmap;
  const int h = dmap.height * s;
  const int w = dmap.width * s;
  std::vector<double> values(static_cast<std::size_t>(h) * w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      values[static_cast<std::size_t>(y) * w + x] = s * dmap.at(y / s, x / s);
    }
  }
  return make_disparity_map(h, w, std::move(values));
}

}  // namespace lfr
