#include "lfr/image_grid.h"

#include <cmath>
#include <string>

#include "lfr/errors.h"

namespace lfr {

ImageGrid::ImageGrid(int height, int width, int channels, double fill)
    : height_(height), width_(width), channels_(channels) {
  if (height < 0 || width < 0 || channels < 1) {
    throw ContractError("invalid image shape " + std::to_string(height) + "x" +
                        std::to_string(width) + "x" + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(height) * width * channels, fill);
}

ImageGrid ImageGrid::channel(int c) const {
  ImageGrid out(height_, width_, 1);
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) out.at(y, x) = at(y, x, c);
  }
  return out;
}

double dot(const ImageGrid& a, const ImageGrid& b) {
  if (!a.same_shape(b)) throw ContractError("dot: shape mismatch");
  double sum = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) sum += da[i] * db[i];
  return sum;
}

double max_abs_diff(const ImageGrid& a, const ImageGrid& b) {
  if (!a.same_shape(b)) throw ContractError("max_abs_diff: shape mismatch");
  double worst = 0.0;
  auto da = a.data();
  auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) {
    worst = std::max(worst, std::abs(da[i] - db[i]));
  }
  return worst;
}

bool all_finite(const ImageGrid& img) {
  for (double v : img.data()) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace lfr
