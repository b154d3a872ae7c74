#ifndef LFR_LIGHT_FIELD_H_
#define LFR_LIGHT_FIELD_H_

#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "lfr/image_grid.h"

namespace lfr {

// View position in baseline units; u is horizontal (x), v vertical (y).
struct ViewOffset {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const ViewOffset&, const ViewOffset&) = default;
};

// Grid of views from a camera array. Views are stored row-major over the
// grid, so view (r, c) is views[r * cols + c].
struct LightField {
  std::vector<ImageGrid> views;
  std::vector<ViewOffset> offsets;
  int rows = 0;
  int cols = 0;
  int reference_index = 0;
  // Sample depth of the source images (8 or 16); used when re-encoding.
  int bit_depth = 16;

  int view_count() const { return static_cast<int>(views.size()); }
  const ImageGrid& reference() const { return views[reference_index]; }
};

// floor(rows/2) * cols + floor(cols/2).
int reference_index_for(int rows, int cols);

// Offsets for a regular grid with the reference view at (0, 0).
std::vector<ViewOffset> grid_offsets(int rows, int cols, double step);

// Assembles a light field from row-major views and validates every
// invariant (view count, equal shapes, distinct offsets).
LightField make_light_field(std::vector<ImageGrid> views, int rows, int cols,
                            double offset_step, int bit_depth = 16);

// Per-pixel disparity of the reference view, in pixels per unit baseline
// offset at the map's own resolution.
struct DisparityMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;
  double d_min = 0.0;
  double d_max = 0.0;

  double at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

// Builds a map and records the value extrema. Throws ContractError on a
// size mismatch or non-finite values.
DisparityMap make_disparity_map(int height, int width,
                                std::vector<double> values);

DisparityMap constant_disparity(int height, int width, double value);

// Contents of meta.json in a dataset directory.
struct LightFieldMeta {
  int rows = 1;
  int cols = 1;
  double offset_step = 1.0;
  std::optional<std::pair<double, double>> disparity_range;
};

LightFieldMeta read_meta(const std::filesystem::path& path);
void write_meta(const std::filesystem::path& path, const LightFieldMeta& meta);

// Reads meta.json plus view_{r}_{c}.png for every grid position.
LightField load_light_field(const std::filesystem::path& directory);
// Same, also returning the parsed meta descriptor.
LightField load_light_field(const std::filesystem::path& directory,
                            LightFieldMeta* meta);

void write_light_field(const std::filesystem::path& directory,
                       const LightField& lf, const LightFieldMeta& meta);

// Single-channel PFM, see pfm_io.h.
DisparityMap load_disparity(const std::filesystem::path& path);
void write_disparity(const std::filesystem::path& path,
                     const DisparityMap& dmap);

}  // namespace lfr

#endif  // LFR_LIGHT_FIELD_H_
