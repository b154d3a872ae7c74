#include "lfr/light_field.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "lfr/errors.h"
#include "lfr/pfm_io.h"
#include "lfr/png_io.h"

namespace lfr {

namespace fs = std::filesystem;
using nlohmann::json;

int reference_index_for(int rows, int cols) {
  return (rows / 2) * cols + (cols / 2);
}

std::vector<ViewOffset> grid_offsets(int rows, int cols, double step) {
  std::vector<ViewOffset> offsets;
  offsets.reserve(static_cast<std::size_t>(rows) * cols);
  const int ref_row = rows / 2;
  const int ref_col = cols / 2;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      offsets.push_back({(c - ref_col) * step, (r - ref_row) * step});
    }
  }
  return offsets;
}

LightField make_light_field(std::vector<ImageGrid> views, int rows, int cols,
                            double offset_step, int bit_depth) {
  if (rows < 1 || cols < 1) throw ContractError("light field grid must be >= 1x1");
  if (static_cast<int>(views.size()) != rows * cols) {
    throw ContractError("light field needs rows*cols = " +
                        std::to_string(rows * cols) + " views, got " +
                        std::to_string(views.size()));
  }
  if (!(offset_step > 0.0) && rows * cols > 1) {
    throw ContractError("offset_step must be positive");
  }
  for (const auto& view : views) {
    if (!view.same_shape(views.front())) {
      throw ContractError("light field views differ in shape");
    }
  }
  LightField lf;
  lf.views = std::move(views);
  lf.rows = rows;
  lf.cols = cols;
  lf.reference_index = reference_index_for(rows, cols);
  lf.offsets = grid_offsets(rows, cols, offset_step);
  lf.bit_depth = bit_depth;
  return lf;
}

DisparityMap make_disparity_map(int height, int width,
                                std::vector<double> values) {
  if (values.size() != static_cast<std::size_t>(height) * width) {
    throw ContractError("disparity value count does not match dimensions");
  }
  DisparityMap dmap;
  dmap.height = height;
  dmap.width = width;
  dmap.values = std::move(values);
  if (!dmap.values.empty()) {
    const auto [lo, hi] =
        std::minmax_element(dmap.values.begin(), dmap.values.end());
    dmap.d_min = *lo;
    dmap.d_max = *hi;
  }
  for (double v : dmap.values) {
    if (!std::isfinite(v)) throw ContractError("non-finite disparity value");
  }
  return dmap;
}

DisparityMap constant_disparity(int height, int width, double value) {
  return make_disparity_map(
      height, width,
      std::vector<double>(static_cast<std::size_t>(height) * width, value));
}

LightFieldMeta read_meta(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("missing meta descriptor " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  LightFieldMeta meta;
  auto field = [&](const char* name) -> const json& {
    if (!doc.contains(name)) {
      throw ParseError(path.string() + ": missing field '" + name + "'");
    }
    return doc.at(name);
  };
  try {
    meta.rows = field("rows").get<int>();
    meta.cols = field("cols").get<int>();
    meta.offset_step = field("offset_step").get<double>();
    if (doc.contains("disparity_range")) {
      const auto& range = doc.at("disparity_range");
      if (!range.is_array() || range.size() != 2) {
        throw ParseError(path.string() +
                         ": field 'disparity_range' must be [min, max]");
      }
      meta.disparity_range = {range[0].get<double>(), range[1].get<double>()};
    }
  } catch (const json::type_error& e) {
    throw ParseError(path.string() + ": wrong field type: " + e.what());
  }
  if (meta.rows < 1 || meta.cols < 1) {
    throw ParseError(path.string() + ": fields 'rows'/'cols' must be >= 1");
  }
  if (!(meta.offset_step > 0.0)) {
    throw ParseError(path.string() + ": field 'offset_step' must be positive");
  }
  return meta;
}

void write_meta(const fs::path& path, const LightFieldMeta& meta) {
  json doc = {{"rows", meta.rows},
              {"cols", meta.cols},
              {"offset_step", meta.offset_step}};
  if (meta.disparity_range) {
    doc["disparity_range"] = {meta.disparity_range->first,
                              meta.disparity_range->second};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << "\n";
}

static std::string view_name(int r, int c) {
  return "view_" + std::to_string(r) + "_" + std::to_string(c) + ".png";
}

LightField load_light_field(const fs::path& directory, LightFieldMeta* meta_out) {
  const LightFieldMeta meta = read_meta(directory / "meta.json");
  std::vector<ImageGrid> views;
  int bit_depth = 8;
  for (int r = 0; r < meta.rows; ++r) {
    for (int c = 0; c < meta.cols; ++c) {
      const fs::path file = directory / view_name(r, c);
      if (!fs::exists(file)) throw LoadError("missing view " + file.string());
      DecodedPng decoded = read_png(file);
      if (!views.empty() && !decoded.image.same_shape(views.front())) {
        throw LoadError("view " + file.string() +
                        " differs in size or channels from view_0_0.png");
      }
      bit_depth = std::max(bit_depth, decoded.bit_depth);
      views.push_back(std::move(decoded.image));
    }
  }
  if (meta_out) *meta_out = meta;
  return make_light_field(std::move(views), meta.rows, meta.cols,
                          meta.offset_step, bit_depth);
}

LightField load_light_field(const fs::path& directory) {
  return load_light_field(directory, nullptr);
}

void write_light_field(const fs::path& directory, const LightField& lf,
                       const LightFieldMeta& meta) {
  fs::create_directories(directory);
  write_meta(directory / "meta.json", meta);
  for (int r = 0; r < lf.rows; ++r) {
    for (int c = 0; c < lf.cols; ++c) {
      write_png(directory / view_name(r, c), lf.views[r * lf.cols + c],
                lf.bit_depth);
    }
  }
}

DisparityMap load_disparity(const fs::path& path) {
  const FloatRaster raster = read_pfm(path);
  std::vector<double> values(raster.values.begin(), raster.values.end());
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ParseError(path.string() + ": non-finite disparity value");
    }
  }
  return make_disparity_map(raster.height, raster.width, std::move(values));
}

void write_disparity(const fs::path& path, const DisparityMap& dmap) {
  FloatRaster raster;
  raster.height = dmap.height;
  raster.width = dmap.width;
  raster.values.assign(dmap.values.begin(), dmap.values.end());
  write_pfm(path, raster);
}

}  // namespace lfr
