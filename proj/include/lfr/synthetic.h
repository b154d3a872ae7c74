#ifndef LFR_SYNTHETIC_H_
#define LFR_SYNTHETIC_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lfr/image_grid.h"
#include "lfr/light_field.h"

namespace lfr {

// Axis-aligned region in fractions of the HR frame, half-open.
struct LayerRegion {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 1.0;
  double y1 = 1.0;
};

// Fronto-parallel textured plane. Disparity is in LR pixels per unit
// baseline; the HR shift per unit baseline is sr_factor * disparity.
struct PlaneLayer {
  double disparity = 0.0;
  std::optional<LayerRegion> region;  // unset: covers the whole frame
  std::optional<ImageGrid> texture;   // unset: procedural, seeded
};

struct SyntheticSceneSpec {
  int hr_size = 128;
  int rows = 3;
  int cols = 3;
  int sr_factor = 2;
  double offset_step = 1.0;
  // Front to back; the first layer whose region contains a sample wins.
  std::vector<PlaneLayer> layers;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  int channels = 1;
  // Defaults to the solver's H (0.5 * sr_factor).
  std::optional<double> blur_sigma;
};

struct SyntheticLightField {
  ImageGrid hr_reference;
  DisparityMap gt_disparity;     // LR reference grid, LR pixel units
  DisparityMap gt_disparity_hr;  // HR grid, HR pixel units
  LightField lf;
};

// Throws ContractError when the spec is invalid.
void validate(const SyntheticSceneSpec& spec);

// Checker pattern plus band-limited noise, values inside [0.02, 0.98].
ImageGrid procedural_texture(int size, int channels, std::uint64_t seed,
                             int layer_index);

// Renders every view as y_k = D H F_k x + n_k with occlusion-ordered
// compositing of the planes.
SyntheticLightField synthesize_light_field(const SyntheticSceneSpec& spec);

// Parses "D[@x0,y0,x1,y1]" entries separated by '/', front to back, e.g.
// "2.5@0.25,0.25,0.75,0.75/1.5".
std::vector<PlaneLayer> parse_plane_spec(const std::string& text);

}  // namespace lfr

#endif  // LFR_SYNTHETIC_H_
