#ifndef LFR_OPTICS_H_
#define LFR_OPTICS_H_

#include <vector>

#include "lfr/light_field.h"

namespace lfr {

// Thin-lens camera. Lengths share one (arbitrary) unit.
struct OpticsParams {
  double focal_length = 1.0;
  double f_number = 1.0;
  double baseline = 1.0;
  double focus_depth = 2.0;  // depth of the in-focus plane, > focal_length
};

// Focus plane, depth of field and focus/bokeh classification settings.
// Defaults for the sigmoid are a = 15, b = 0.3.
struct RefocusParams {
  double focus_disparity = 0.0;  // d_f, pixels per unit baseline
  double bokeh_intensity = 2.0;  // K, CoC pixels per disparity pixel
  double sigmoid_decay = 15.0;   // a
  double sigmoid_threshold = 0.3;  // b
};

void validate(const OpticsParams& optics);
void validate(const RefocusParams& params);

struct CocRadiusMap {
  int height = 0;
  int width = 0;
  std::vector<double> radii;
  double r_min = 0.0;
  double r_max = 0.0;

  double at(int y, int x) const {
    return radii[static_cast<std::size_t>(y) * width + x];
  }
};

// 0 = fully in focus, 1 = fully bokeh.
struct WeightMap {
  int height = 0;
  int width = 0;
  std::vector<double> weights;

  double at(int y, int x) const {
    return weights[static_cast<std::size_t>(y) * width + x];
  }
};

// |f^2 (g_f - g_p) / (2 F g_p (g_f - f))| for a point at depth g_p.
// Throws DomainError when depth <= 0.
double coc_radius_thin_lens(const OpticsParams& optics, double depth);

// K = f / (2 F (B - d_f)). Throws DomainError when B == d_f. This helper
// mixes lens lengths with a pixel disparity; the pipeline takes K directly.
double bokeh_intensity_from_optics(const OpticsParams& optics,
                                   double focus_disparity);

// radii[p] = K |d_p - d_f|.
CocRadiusMap coc_radius_map(const DisparityMap& dmap,
                            const RefocusParams& params);

// eta = (r - r_min) / (r_max - r_min) (0 when r_max == r_min), then
// w = 1 / (1 + exp(-a (eta - b))).
WeightMap weight_map(const CocRadiusMap& rmap, const RefocusParams& params);

}  // namespace lfr

#endif  // LFR_OPTICS_H_
