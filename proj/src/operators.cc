#include "lfr/operators.h"

#include <string>

#include "lfr/errors.h"

namespace lfr {

namespace {

void check_warp_shapes(const ImageGrid& img, const DisparityMap& dmap,
                       const char* op) {
  if (img.height() != dmap.height || img.width() != dmap.width) {
    throw ContractError(std::string(op) + ": disparity map is " +
                        std::to_string(dmap.height) + "x" +
                        std::to_string(dmap.width) + ", image is " +
                        std::to_string(img.height()) + "x" +
                        std::to_string(img.width()));
  }
}

int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// One 1-D pass along rows (horizontal) or columns, forward or transposed.
ImageGrid convolve_axis(const ImageGrid& in, const std::vector<double>& taps,
                        bool horizontal, bool transpose) {
  const int radius = static_cast<int>(taps.size() / 2);
  const int h = in.height();
  const int w = in.width();
  const int c = in.channels();
  ImageGrid out(h, w, c);
  const int n = horizontal ? w : h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int pos = horizontal ? x : y;
      for (int t = -radius; t <= radius; ++t) {
        const int q = clamp_index(pos + t, n);
        const int qy = horizontal ? y : q;
        const int qx = horizontal ? q : x;
        const double k = taps[t + radius];
        for (int ch = 0; ch < c; ++ch) {
          if (transpose) {
            out.at(qy, qx, ch) += k * in.at(y, x, ch);
          } else {
            out.at(y, x, ch) += k * in.at(qy, qx, ch);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace

DegradationSpec DegradationSpec::for_light_field(const LightField& lf,
                                                 int sr_factor) {
  DegradationSpec spec;
  spec.sr_factor = sr_factor;
  spec.blur_sigma = 0.5 * sr_factor;
  spec.view_offsets = lf.offsets;
  return spec;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (sigma < 0.0) throw ContractError("blur sigma must be >= 0");
  if (sigma == 0.0) return {1.0};
  const int radius = static_cast<int>(std::ceil(2.0 * sigma));
  std::vector<double> taps(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    taps[t + radius] = std::exp(-(t * t) / (2.0 * sigma * sigma));
    sum += taps[t + radius];
  }
  for (double& k : taps) k /= sum;
  return taps;
}

ImageGrid warp_forward(const ImageGrid& x, const DisparityMap& dmap,
                       ViewOffset offset) {
  check_warp_shapes(x, dmap, "warp_forward");
  const int h = x.height();
  const int w = x.width();
  const int c = x.channels();
  ImageGrid out(h, w, c);
  auto src = x.data();
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const double d = dmap.at(py, px);
      const auto st = bilinear_stencil(px + offset.u * d, py + offset.v * d, w, h);
      for (int ch = 0; ch < c; ++ch) {
        double v = 0.0;
        for (int i = 0; i < 4; ++i) v += st.weight[i] * src[st.index[i] * c + ch];
        out.at(py, px, ch) = v;
      }
    }
  }
  return out;
}

ImageGrid warp_adjoint(const ImageGrid& y, const DisparityMap& dmap,
                       ViewOffset offset) {
  check_warp_shapes(y, dmap, "warp_adjoint");
  const int h = y.height();
  const int w = y.width();
  const int c = y.channels();
  ImageGrid out(h, w, c);
  auto dst = out.data();
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const double d = dmap.at(py, px);
      const auto st = bilinear_stencil(px + offset.u * d, py + offset.v * d, w, h);
      for (int ch = 0; ch < c; ++ch) {
        const double v = y.at(py, px, ch);
        for (int i = 0; i < 4; ++i) dst[st.index[i] * c + ch] += st.weight[i] * v;
      }
    }
  }
  return out;
}

ImageGrid warp_nearest(const ImageGrid& x, const DisparityMap& dmap,
                       ViewOffset offset) {
  check_warp_shapes(x, dmap, "warp_nearest");
  const int h = x.height();
  const int w = x.width();
  const int c = x.channels();
  ImageGrid out(h, w, c);
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      const double d = dmap.at(py, px);
      const int sx = clamp_index(static_cast<int>(std::lround(px + offset.u * d)), w);
      const int sy = clamp_index(static_cast<int>(std::lround(py + offset.v * d)), h);
      for (int ch = 0; ch < c; ++ch) out.at(py, px, ch) = x.at(sy, sx, ch);
    }
  }
  return out;
}

ImageGrid blur(const ImageGrid& x, double sigma) {
  const auto taps = gaussian_kernel(sigma);
  if (taps.size() == 1) return x;
  return convolve_axis(convolve_axis(x, taps, true, false), taps, false, false);
}

ImageGrid blur_adjoint(const ImageGrid& y, double sigma) {
  const auto taps = gaussian_kernel(sigma);
  if (taps.size() == 1) return y;
  return convolve_axis(convolve_axis(y, taps, false, true), taps, true, true);
}

ImageGrid downsample(const ImageGrid& x, int s) {
  if (s < 1) throw ContractError("downsample factor must be >= 1");
  if (x.height() % s != 0 || x.width() % s != 0) {
    throw ContractError("downsample: " + std::to_string(x.height()) + "x" +
                        std::to_string(x.width()) + " is not divisible by " +
                        std::to_string(s));
  }
  if (s == 1) return x;
  const int c = x.channels();
  ImageGrid out(x.height() / s, x.width() / s, c);
  for (int y = 0; y < out.height(); ++y) {
    for (int xx = 0; xx < out.width(); ++xx) {
      for (int ch = 0; ch < c; ++ch) out.at(y, xx, ch) = x.at(y * s, xx * s, ch);
    }
  }
  return out;
}

ImageGrid downsample_adjoint(const ImageGrid& y, int s) {
  if (s < 1) throw ContractError("downsample factor must be >= 1");
  if (s == 1) return y;
  const int c = y.channels();
  ImageGrid out(y.height() * s, y.width() * s, c);
  for (int yy = 0; yy < y.height(); ++yy) {
    for (int x = 0; x < y.width(); ++x) {
      for (int ch = 0; ch < c; ++ch) out.at(yy * s, x * s, ch) = y.at(yy, x, ch);
    }
  }
  return out;
}

ImageGrid degrade(const ImageGrid& x, const DisparityMap& dmap_hr,
                  ViewOffset offset, const DegradationSpec& spec) {
  return downsample(blur(warp_forward(x, dmap_hr, offset), spec.blur_sigma),
                    spec.sr_factor);
}

ImageGrid degrade_adjoint(const ImageGrid& y, const DisparityMap& dmap_hr,
                          ViewOffset offset, const DegradationSpec& spec) {
  return warp_adjoint(
      blur_adjoint(downsample_adjoint(y, spec.sr_factor), spec.blur_sigma),
      dmap_hr, offset);
}

}  // namespace lfr
