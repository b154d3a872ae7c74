#include "lfr/png_io.h"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "lfr/errors.h"

namespace lfr {

namespace {

struct ReadCursor {
  const std::vector<std::uint8_t>* bytes;
  std::size_t pos;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->pos + length > cursor->bytes->size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, cursor->bytes->data() + cursor->pos, length);
  cursor->pos += length;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

[[noreturn]] void error_handler(png_structp png, png_const_charp message) {
  auto* text = static_cast<std::string*>(png_get_error_ptr(png));
  if (text) *text = message;
  png_longjmp(png, 1);
}

void warning_handler(png_structp, png_const_charp) {}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

DecodedPng decode_png(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw ParseError("not a PNG stream");
  }
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message,
                                           error_handler, warning_handler);
  if (!png) throw ParseError("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw ParseError("png_create_info_struct failed");
  }

  DecodedPng result;
  std::vector<png_bytep> rows;
  std::vector<std::uint8_t> pixels;
  ReadCursor cursor{&bytes, 0};

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw ParseError("PNG decode failed: " + message);
  }

  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  const png_byte depth = png_get_bit_depth(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t row_bytes = png_get_rowbytes(png, info);

  pixels.resize(row_bytes * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  if (channels != 1 && channels != 3) {
    throw ParseError("unsupported PNG channel count " +
                     std::to_string(channels));
  }
  result.bit_depth = out_depth;
  result.image = ImageGrid(height, width, channels);
  auto out = result.image.data();
  const std::size_t count = out.size();
  if (out_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      const unsigned code = (pixels[2 * i] << 8) | pixels[2 * i + 1];
      out[i] = code / 65535.0;
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out[i] = pixels[i] / 255.0;
  }
  return result;
}

DecodedPng read_png(const std::filesystem::path& path) {
  try {
    return decode_png(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const ImageGrid& image, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw ContractError("PNG bit depth must be 8 or 16");
  }
  if (image.channels() != 1 && image.channels() != 3) {
    throw ContractError("PNG output needs 1 or 3 channels");
  }
  const int width = image.width();
  const int height = image.height();
  const int channels = image.channels();
  const int bytes_per_sample = bit_depth / 8;
  const std::size_t row_bytes =
      static_cast<std::size_t>(width) * channels * bytes_per_sample;

  std::vector<std::uint8_t> pixels(row_bytes * height);
  const double max_code = bit_depth == 16 ? 65535.0 : 255.0;
  auto in = image.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double v = std::clamp(in[i], 0.0, 1.0);
    const auto code = static_cast<unsigned>(std::lround(v * max_code));
    if (bit_depth == 16) {
      pixels[2 * i] = static_cast<std::uint8_t>(code >> 8);
      pixels[2 * i + 1] = static_cast<std::uint8_t>(code & 0xff);
    } else {
      pixels[i] = static_cast<std::uint8_t>(code);
    }
  }

  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message,
                                            error_handler, warning_handler);
  if (!png) throw std::runtime_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png_create_info_struct failed");
  }
  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = pixels.data() + y * row_bytes;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG encode failed: " + message);
  }
  png_set_write_fn(png, &out, write_to_memory, flush_noop);
  png_set_IHDR(png, info, width, height, bit_depth,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

void write_png(const std::filesystem::path& path, const ImageGrid& image,
               int bit_depth) {
  const auto bytes = encode_png(image, bit_depth);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

}  // namespace lfr
