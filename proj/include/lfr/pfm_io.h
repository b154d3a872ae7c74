#ifndef LFR_PFM_IO_H_
#define LFR_PFM_IO_H_

#include <filesystem>
#include <vector>

namespace lfr {

// Single-channel float raster in top-down row order.
struct FloatRaster {
  int height = 0;
  int width = 0;
  std::vector<float> values;
};

// Reads a "Pf" portable float map. Either endianness is accepted (the sign
// of the scale field selects it); three-channel "PF" files are rejected.
FloatRaster read_pfm(const std::filesystem::path& path);

// Writes little-endian "Pf" with scale -1 and bottom-up rows.
void write_pfm(const std::filesystem::path& path, const FloatRaster& raster);

}  // namespace lfr

#endif  // LFR_PFM_IO_H_
