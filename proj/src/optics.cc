#include "lfr/optics.h"

#include <algorithm>
#include <cmath>

#include "lfr/errors.h"

namespace lfr {

void validate(const OpticsParams& optics) {
  if (!(optics.focal_length > 0.0) || !(optics.f_number > 0.0) ||
      !(optics.baseline > 0.0)) {
    throw ContractError("focal length, f-number and baseline must be > 0");
  }
  if (!(optics.focus_depth > optics.focal_length)) {
    throw ContractError("focus depth must exceed the focal length");
  }
}

void validate(const RefocusParams& params) {
  if (!(params.bokeh_intensity >= 0.0)) throw ContractError("K must be >= 0");
  if (!(params.sigmoid_decay > 0.0)) throw ContractError("a must be > 0");
  if (!(params.sigmoid_threshold >= 0.0 && params.sigmoid_threshold <= 1.0)) {
    throw ContractError("b must lie in [0, 1]");
  }
  if (!std::isfinite(params.focus_disparity)) {
    throw ContractError("focus disparity must be finite");
  }
}

double coc_radius_thin_lens(const OpticsParams& optics, double depth) {
  if (!(depth > 0.0)) throw DomainError("point depth must be > 0");
  validate(optics);
  const double f = optics.focal_length;
  const double gf = optics.focus_depth;
  return std::abs(f * f * (gf - depth) /
                  (2.0 * optics.f_number * depth * (gf - f)));
}

double bokeh_intensity_from_optics(const OpticsParams& optics,
                                   double focus_disparity) {
  if (optics.baseline == focus_disparity) {
    throw DomainError("bokeh intensity is singular at baseline == d_f");
  }
  return optics.focal_length /
         (2.0 * optics.f_number * (optics.baseline - focus_disparity));
}

CocRadiusMap coc_radius_map(const DisparityMap& dmap,
                            const RefocusParams& params) {
  validate(params);
  CocRadiusMap rmap;
  rmap.height = dmap.height;
  rmap.width = dmap.width;
  rmap.radii.resize(dmap.values.size());
  for (std::size_t p = 0; p < dmap.values.size(); ++p) {
    rmap.radii[p] =
        params.bokeh_intensity * std::abs(dmap.values[p] - params.focus_disparity);
  }
  if (!rmap.radii.empty()) {
    const auto [lo, hi] = std::minmax_element(rmap.radii.begin(), rmap.radii.end());
    rmap.r_min = *lo;
    rmap.r_max = *hi;
  }
  return rmap;
}

WeightMap weight_map(const CocRadiusMap& rmap, const RefocusParams& params) {
  validate(params);
  WeightMap wmap;
  wmap.height = rmap.height;
  wmap.width = rmap.width;
  wmap.weights.resize(rmap.radii.size());
  const double span = rmap.r_max - rmap.r_min;
  for (std::size_t p = 0; p < rmap.radii.size(); ++p) {
    const double eta = span > 0.0 ? (rmap.radii[p] - rmap.r_min) / span : 0.0;
    wmap.weights[p] = 1.0 / (1.0 + std::exp(-params.sigmoid_decay *
                                            (eta - params.sigmoid_threshold)));
  }
  return wmap;
}

}  // namespace lfr
