#ifndef LFR_OPERATORS_H_
#define LFR_OPERATORS_H_

#include <array>
#include <cmath>
#include <vector>

#include "lfr/image_grid.h"
#include "lfr/light_field.h"

namespace lfr {

// Parameters of the per-view degradation y_k = D H F_k x.
struct DegradationSpec {
  int sr_factor = 1;         // decimation stride of D
  double blur_sigma = 0.5;   // Gaussian H, 0 disables blurring
  std::vector<ViewOffset> view_offsets;

  int kernel_radius() const {
    return static_cast<int>(std::ceil(2.0 * blur_sigma));
  }

  // sigma = 0.5 * s, offsets taken from the light field.
  static DegradationSpec for_light_field(const LightField& lf, int sr_factor);
};

// Normalized 1-D Gaussian taps over [-ceil(2 sigma), ceil(2 sigma)].
// sigma == 0 yields the single tap {1}.
std::vector<double> gaussian_kernel(double sigma);

// Clamp-to-edge bilinear stencil for sampling position (sx, sy) on a
// width x height grid. Indices are pixel indices (y * width + x).
struct BilinearStencil {
  std::array<int, 4> index;
  std::array<double, 4> weight;
};

inline BilinearStencil bilinear_stencil(double sx, double sy, int width,
                                        int height) {
  const double fx0 = std::floor(sx);
  const double fy0 = std::floor(sy);
  const double ax = sx - fx0;
  const double ay = sy - fy0;
  auto clamp_to = [](double v, int hi) {
    return v < 0.0 ? 0 : (v > hi ? hi : static_cast<int>(v));
  };
  const int x0 = clamp_to(fx0, width - 1);
  const int x1 = clamp_to(fx0 + 1.0, width - 1);
  const int y0 = clamp_to(fy0, height - 1);
  const int y1 = clamp_to(fy0 + 1.0, height - 1);
  return {{y0 * width + x0, y0 * width + x1, y1 * width + x0, y1 * width + x1},
          {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay}};
}

// F_k: out(p) = x sampled bilinearly at p + (u d_p, v d_p), clamp-to-edge.
// dmap must match x's resolution and carry disparity in x's pixel units.
ImageGrid warp_forward(const ImageGrid& x, const DisparityMap& dmap,
                       ViewOffset offset);
// Exact transpose of warp_forward for the same dmap and offset.
ImageGrid warp_adjoint(const ImageGrid& y, const DisparityMap& dmap,
                       ViewOffset offset);
// Nearest-neighbour variant of warp_forward (used for masks).
ImageGrid warp_nearest(const ImageGrid& x, const DisparityMap& dmap,
                       ViewOffset offset);

// H: separable Gaussian, clamp-to-edge.
ImageGrid blur(const ImageGrid& x, double sigma);
// Exact transpose of blur, boundary weights included.
ImageGrid blur_adjoint(const ImageGrid& y, double sigma);

// D: point sampling at stride s from origin (0, 0). Dimensions must be
// divisible by s.
ImageGrid downsample(const ImageGrid& x, int s);
// Zero-insertion upsampling to (s*H, s*W).
ImageGrid downsample_adjoint(const ImageGrid& y, int s);

// D H F_k and its transpose.
ImageGrid degrade(const ImageGrid& x, const DisparityMap& dmap_hr,
                  ViewOffset offset, const DegradationSpec& spec);
ImageGrid degrade_adjoint(const ImageGrid& y, const DisparityMap& dmap_hr,
                          ViewOffset offset, const DegradationSpec& spec);

}  // namespace lfr

#endif  // LFR_OPERATORS_H_
