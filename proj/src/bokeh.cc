#include "lfr/bokeh.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lfr/errors.h"

namespace lfr {

namespace {

double catmull_rom(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

ImageGrid resample_axis(const ImageGrid& in, int s, bool horizontal) {
  const int h = horizontal ? in.height() : in.height() * s;
  const int w = horizontal ? in.width() * s : in.width();
  const int c = in.channels();
  const int n = horizontal ? in.width() : in.height();
  ImageGrid out(h, w, c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int pos = horizontal ? x : y;
      const int base = pos / s;
      const double frac = static_cast<double>(pos - base * s) / s;
      for (int t = -1; t <= 2; ++t) {
        const double k = catmull_rom(frac - t);
        const int q = clamp_index(base + t, n);
        for (int ch = 0; ch < c; ++ch) {
          out.at(y, x, ch) += k * (horizontal ? in.at(y, q, ch) : in.at(q, x, ch));
        }
      }
    }
  }
  return out;
}

}  // namespace

void validate(const BokehRenderConfig& cfg) {
  if (!(cfg.radius_floor > 0.0)) throw ContractError("radius_floor must be > 0");
  if (cfg.upsample_factor < 1) throw ContractError("upsample_factor must be >= 1");
}

ImageGrid render_bokeh(const ImageGrid& reference, const CocRadiusMap& rmap,
                       const BokehRenderConfig& cfg) {
  validate(cfg);
  if (rmap.height != reference.height() || rmap.width != reference.width()) {
    throw ContractError("render_bokeh: radius map does not match the image");
  }
  const int h = reference.height();
  const int w = reference.width();
  const int c = reference.channels();
  const std::size_t pixels = static_cast<std::size_t>(h) * w;

  std::vector<double> radius_sq(pixels);
  std::vector<double> weight(pixels);
  double r_max = cfg.radius_floor;
  for (std::size_t p = 0; p < pixels; ++p) {
    const double r = std::max(rmap.radii[p], cfg.radius_floor);
    radius_sq[p] = r * r;
    weight[p] = 1.0 / (std::numbers::pi * r * r);
    r_max = std::max(r_max, r);
  }
  const double r_max_sq = r_max * r_max;
  const int reach = static_cast<int>(std::floor(r_max));

  ImageGrid out(h, w, c);
  std::vector<double> acc(c);
  for (int qy = 0; qy < h; ++qy) {
    for (int qx = 0; qx < w; ++qx) {
      std::fill(acc.begin(), acc.end(), 0.0);
      double weight_sum = 0.0;
      const int y_lo = std::max(0, qy - reach);
      const int y_hi = std::min(h - 1, qy + reach);
      const int x_lo = std::max(0, qx - reach);
      const int x_hi = std::min(w - 1, qx + reach);
      for (int py = y_lo; py <= y_hi; ++py) {
        const int dy = py - qy;
        for (int px = x_lo; px <= x_hi; ++px) {
          const int dx = px - qx;
          const double dist_sq = dx * dx + dy * dy;
          const std::size_t p = static_cast<std::size_t>(py) * w + px;
          if (dist_sq > r_max_sq || dist_sq > radius_sq[p]) continue;
          weight_sum += weight[p];
          for (int ch = 0; ch < c; ++ch) acc[ch] += weight[p] * reference.at(py, px, ch);
        }
      }
      for (int ch = 0; ch < c; ++ch) {
        out.at(qy, qx, ch) = cfg.normalize ? acc[ch] / weight_sum : acc[ch];
      }
    }
  }
  return out;
}

ImageGrid upsample_bicubic(const ImageGrid& img, int s) {
  if (s < 1) throw ContractError("upsample factor must be >= 1");
  if (s == 1) return img;
  ImageGrid out = resample_axis(resample_axis(img, s, true), s, false);
  for (double& v : out.data()) v = std::clamp(v, 0.0, 1.0);
  return out;
}

ImageGrid upsample_bokeh(const ImageGrid& rendered, int s) {
  return upsample_bicubic(rendered, s);
}

}  // namespace lfr
