#include "lfr/pfm_io.h"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>

#include "lfr/errors.h"

namespace lfr {

namespace {

std::uint32_t byteswap32(std::uint32_t v) {
  return (v >> 24) | ((v >> 8) & 0x0000ff00u) | ((v << 8) & 0x00ff0000u) |
         (v << 24);
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string next_token(const std::string& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    if (std::isspace(static_cast<unsigned char>(buf[pos]))) {
      ++pos;
    } else if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < buf.size() && !std::isspace(static_cast<unsigned char>(buf[pos]))) {
    ++pos;
  }
  return buf.substr(start, pos - start);
}

}  // namespace

FloatRaster read_pfm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path.string());
  const std::string buf{std::istreambuf_iterator<char>(in),
                        std::istreambuf_iterator<char>()};
  const std::string where = path.string() + ": ";

  std::size_t pos = 0;
  const std::string magic = next_token(buf, pos);
  if (magic == "PF") {
    throw ParseError(where + "three-channel PFM, expected single channel 'Pf'");
  }
  if (magic != "Pf") throw ParseError(where + "bad PFM magic '" + magic + "'");

  FloatRaster raster;
  double scale = 0.0;
  try {
    raster.width = std::stoi(next_token(buf, pos));
    raster.height = std::stoi(next_token(buf, pos));
    scale = std::stod(next_token(buf, pos));
  } catch (const std::exception&) {
    throw ParseError(where + "malformed PFM header");
  }
  if (raster.width <= 0 || raster.height <= 0 || scale == 0.0 ||
      !std::isfinite(scale)) {
    throw ParseError(where + "invalid PFM dimensions or scale");
  }
  // Exactly one whitespace byte separates the header from the payload.
  if (pos >= buf.size()) throw ParseError(where + "truncated PFM header");
  ++pos;

  const std::size_t count =
      static_cast<std::size_t>(raster.width) * raster.height;
  if (buf.size() - pos < count * sizeof(float)) {
    throw ParseError(where + "truncated PFM payload");
  }
  const bool file_little = scale < 0.0;
  const bool host_little = std::endian::native == std::endian::little;

  raster.values.resize(count);
  const char* payload = buf.data() + pos;
  for (int row = 0; row < raster.height; ++row) {
    // PFM stores the bottom row first.
    const int y = raster.height - 1 - row;
    for (int x = 0; x < raster.width; ++x) {
      std::uint32_t bits;
      std::memcpy(&bits, payload, sizeof(bits));
      payload += sizeof(bits);
      if (file_little != host_little) bits = byteswap32(bits);
      raster.values[static_cast<std::size_t>(y) * raster.width + x] =
          std::bit_cast<float>(bits);
    }
  }
  return raster;
}

void write_pfm(const std::filesystem::path& path, const FloatRaster& raster) {
  const std::size_t count =
      static_cast<std::size_t>(raster.width) * raster.height;
  if (raster.values.size() != count) {
    throw ContractError("write_pfm: value count does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "Pf\n" << raster.width << " " << raster.height << "\n-1.0\n";
  for (int y = raster.height - 1; y >= 0; --y) {
    for (int x = 0; x < raster.width; ++x) {
      auto bits = std::bit_cast<std::uint32_t>(
          raster.values[static_cast<std::size_t>(y) * raster.width + x]);
      if constexpr (std::endian::native == std::endian::big) {
        bits = byteswap32(bits);
      }
      out.write(reinterpret_cast<const char*>(&bits), sizeof(bits));
    }
  }
}

}  // namespace lfr
