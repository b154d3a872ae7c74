#ifndef LFR_IMAGE_GRID_H_
#define LFR_IMAGE_GRID_H_

#include <cstddef>
#include <span>
#include <vector>

namespace lfr {

// Row-major H x W x C raster of doubles. Interleaved channels:
// sample (y, x, c) lives at ((y * W) + x) * C + c.
class ImageGrid {
 public:
  ImageGrid() = default;
  ImageGrid(int height, int width, int channels, double fill = 0.0);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  int pixel_count() const { return height_ * width_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& at(int y, int x, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  double at(int y, int x, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  bool same_shape(const ImageGrid& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  // Copy of a single channel as a one-channel grid.
  ImageGrid channel(int c) const;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  std::vector<double> data_;
};

// Sum over all samples of a[i] * b[i]. Shapes must match.
double dot(const ImageGrid& a, const ImageGrid& b);

double max_abs_diff(const ImageGrid& a, const ImageGrid& b);

bool all_finite(const ImageGrid& img);

}  // namespace lfr

#endif  // LFR_IMAGE_GRID_H_
