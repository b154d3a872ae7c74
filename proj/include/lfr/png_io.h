#ifndef LFR_PNG_IO_H_
#define LFR_PNG_IO_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "lfr/image_grid.h"

namespace lfr {

struct DecodedPng {
  ImageGrid image;  // 1 or 3 channels, samples in [0, 1]
  int bit_depth = 8;
};

// Gray, gray+alpha, RGB, RGBA and palette images are accepted; alpha is
// dropped and sub-byte depths are expanded to 8 bits.
DecodedPng read_png(const std::filesystem::path& path);
DecodedPng decode_png(const std::vector<std::uint8_t>& bytes);

// Samples are clamped to [0, 1] and rounded to the nearest code value.
void write_png(const std::filesystem::path& path, const ImageGrid& image,
               int bit_depth = 8);
std::vector<std::uint8_t> encode_png(const ImageGrid& image, int bit_depth = 8);

}  // namespace lfr

#endif  // LFR_PNG_IO_H_
