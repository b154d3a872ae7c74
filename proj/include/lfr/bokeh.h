#ifndef LFR_BOKEH_H_
#define LFR_BOKEH_H_

#include "lfr/image_grid.h"
#include "lfr/optics.h"

namespace lfr {

struct BokehRenderConfig {
  // Radii below this are raised to it; keeps 1/(pi r^2) bounded.
  double radius_floor = 0.5;
  // Divide each gathered sum by the sum of its weights.
  bool normalize = true;
  int upsample_factor = 1;
};

void validate(const BokehRenderConfig& cfg);

// Gather filter. For each output pixel Q every pixel P with |PQ| <= r_max
// is visited in scan order; P contributes I_P / (pi r_P^2) when
// |PQ| <= r_P and nothing otherwise. r_P is floored at cfg.radius_floor and
// r_max is the largest floored radius. Pixels outside the image are simply
// not part of the gather set.
ImageGrid render_bokeh(const ImageGrid& reference, const CocRadiusMap& rmap,
                       const BokehRenderConfig& cfg);

// Separable Catmull-Rom (a = -0.5) interpolation to (s*H, s*W). Output
// pixel X samples input coordinate X / s; edges are clamped and the result
// is clamped to [0, 1].
ImageGrid upsample_bicubic(const ImageGrid& img, int s);

// Bicubic upsampling of the rendered reference to the SR frame.
ImageGrid upsample_bokeh(const ImageGrid& rendered, int s);

}  // namespace lfr

#endif  // LFR_BOKEH_H_
