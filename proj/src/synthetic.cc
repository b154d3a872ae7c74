#include "lfr/synthetic.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "lfr/errors.h"
#include "lfr/operators.h"

namespace lfr {

namespace {

bool region_contains(const std::optional<LayerRegion>& region, double px,
                     double py, int size) {
  if (!region) return true;
  return px >= region->x0 * size && px < region->x1 * size &&
         py >= region->y0 * size && py < region->y1 * size;
}

double sample_bilinear(const ImageGrid& img, double sx, double sy, int ch) {
  const auto st = bilinear_stencil(sx, sy, img.width(), img.height());
  auto data = img.data();
  const int c = img.channels();
  double v = 0.0;
  for (int i = 0; i < 4; ++i) v += st.weight[i] * data[st.index[i] * c + ch];
  return v;
}

// Index of the front-most layer covering HR position (px, py) as seen from
// a view with the given offset, i.e. the layer l whose sample position
// p + offset * s * d_l falls inside its region.
int covering_layer(const SyntheticSceneSpec& spec, double px, double py,
                   ViewOffset offset) {
  const int last = static_cast<int>(spec.layers.size()) - 1;
  for (int l = 0; l < last; ++l) {
    const double shift = spec.sr_factor * spec.layers[l].disparity;
    if (region_contains(spec.layers[l].region, px + offset.u * shift,
                        py + offset.v * shift, spec.hr_size)) {
      return l;
    }
  }
  return last;
}

}  // namespace

void validate(const SyntheticSceneSpec& spec) {
  if (spec.sr_factor < 1) throw ContractError("sr_factor must be >= 1");
  if (spec.noise_sigma < 0.0) throw ContractError("noise_sigma must be >= 0");
  if (spec.layers.empty()) throw ContractError("at least one layer required");
  if (spec.hr_size < 1 || spec.hr_size % spec.sr_factor != 0) {
    throw ContractError("hr_size must be a positive multiple of sr_factor");
  }
  if (spec.rows < 1 || spec.cols < 1) throw ContractError("grid must be >= 1x1");
  if (spec.channels != 1 && spec.channels != 3) {
    throw ContractError("channels must be 1 or 3");
  }
  if (spec.blur_sigma && *spec.blur_sigma < 0.0) {
    throw ContractError("blur_sigma must be >= 0");
  }
  for (const auto& layer : spec.layers) {
    if (layer.texture && (layer.texture->height() != spec.hr_size ||
                          layer.texture->width() != spec.hr_size ||
                          layer.texture->channels() != spec.channels)) {
      throw ContractError("layer texture must match hr_size and channels");
    }
  }
}

ImageGrid procedural_texture(int size, int channels, std::uint64_t seed,
                             int layer_index) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + layer_index + 1);
  std::normal_distribution<double> gauss(0.0, 1.0);

  ImageGrid noise(size, size, channels);
  for (double& v : noise.data()) v = gauss(rng);
  noise = blur(noise, 1.0);

  const int period = 6 + 4 * (layer_index % 3);
  const double base = layer_index % 2 == 0 ? 0.5 : 0.42;
  ImageGrid tex(size, size, channels);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const bool odd = ((x / period) + (y / period)) % 2 == 1;
      for (int c = 0; c < channels; ++c) {
        const double v = base + (odd ? 0.18 : -0.18) + 0.3 * noise.at(y, x, c);
        tex.at(y, x, c) = std::clamp(v, 0.02, 0.98);
      }
    }
  }
  return tex;
}

SyntheticLightField synthesize_light_field(const SyntheticSceneSpec& spec) {
  validate(spec);
  const int n = spec.hr_size;
  const int s = spec.sr_factor;
  const int c = spec.channels;
  const double sigma = spec.blur_sigma.value_or(0.5 * s);

  std::vector<ImageGrid> textures;
  for (std::size_t l = 0; l < spec.layers.size(); ++l) {
    textures.push_back(spec.layers[l].texture
                           ? *spec.layers[l].texture
                           : procedural_texture(n, c, spec.seed,
                                                static_cast<int>(l)));
  }

  const auto offsets = grid_offsets(spec.rows, spec.cols, spec.offset_step);
  std::vector<ImageGrid> views;
  SyntheticLightField out;
  std::mt19937_64 noise_rng(spec.seed ^ 0xA5A5A5A5DEADBEEFull);
  std::normal_distribution<double> gauss(0.0, 1.0);

  for (std::size_t k = 0; k < offsets.size(); ++k) {
    const ViewOffset off = offsets[k];
    ImageGrid composite(n, n, c);
    for (int y = 0; y < n; ++y) {
      for (int x = 0; x < n; ++x) {
        const int l = covering_layer(spec, x, y, off);
        const double shift = s * spec.layers[l].disparity;
        for (int ch = 0; ch < c; ++ch) {
          composite.at(y, x, ch) = sample_bilinear(
              textures[l], x + off.u * shift, y + off.v * shift, ch);
        }
      }
    }
    if (off == ViewOffset{}) out.hr_reference = composite;

    ImageGrid view = downsample(blur(composite, sigma), s);
    if (spec.noise_sigma > 0.0) {
      for (double& v : view.data()) {
        v = std::clamp(v + spec.noise_sigma * gauss(noise_rng), 0.0, 1.0);
      }
    }
    views.push_back(std::move(view));
  }

  std::vector<double> hr_disp(static_cast<std::size_t>(n) * n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      hr_disp[static_cast<std::size_t>(y) * n + x] =
          s * spec.layers[covering_layer(spec, x, y, ViewOffset{})].disparity;
    }
  }
  const int lr = n / s;
  std::vector<double> lr_disp(static_cast<std::size_t>(lr) * lr);
  for (int y = 0; y < lr; ++y) {
    for (int x = 0; x < lr; ++x) {
      lr_disp[static_cast<std::size_t>(y) * lr + x] =
          hr_disp[static_cast<std::size_t>(y * s) * n + x * s] / s;
    }
  }
  out.gt_disparity_hr = make_disparity_map(n, n, std::move(hr_disp));
  out.gt_disparity = make_disparity_map(lr, lr, std::move(lr_disp));
  out.lf = make_light_field(std::move(views), spec.rows, spec.cols,
                            spec.offset_step, 16);
  return out;
}

std::vector<PlaneLayer> parse_plane_spec(const std::string& text) {
  std::vector<PlaneLayer> layers;
  std::stringstream entries(text);
  std::string entry;
  while (std::getline(entries, entry, '/')) {
    if (entry.empty()) continue;
    PlaneLayer layer;
    const auto at = entry.find('@');
    try {
      std::size_t used = 0;
      const std::string disp = entry.substr(0, at);
      layer.disparity = std::stod(disp, &used);
      if (used != disp.size()) throw std::invalid_argument(disp);
      if (at != std::string::npos) {
        std::stringstream coords(entry.substr(at + 1));
        std::string item;
        std::vector<double> v;
        while (std::getline(coords, item, ',')) v.push_back(std::stod(item));
        if (v.size() != 4) throw std::invalid_argument("region");
        layer.region = LayerRegion{v[0], v[1], v[2], v[3]};
      }
    } catch (const std::exception&) {
      throw ParseError("bad plane entry '" + entry +
                       "', expected D or D@x0,y0,x1,y1");
    }
    layers.push_back(std::move(layer));
  }
  if (layers.empty()) throw ParseError("plane spec '" + text + "' is empty");
  return layers;
}

}  // namespace lfr
