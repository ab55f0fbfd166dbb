#pragma once

#include "pssf/core/types.hpp"

#include <string>

namespace pssf {

// 16-bit grayscale PNG IO. Writing uses fixed libpng settings (no ancillary
// chunks, fixed compression level) so identical pixel data always produces
// identical file bytes.
void write_png16(const std::string& path, const RasterU16& image);
RasterU16 read_png16(const std::string& path);

// Raw little-endian dump, one uint16 per pixel in row-major order.
void write_u16_raw(const std::string& path, const RasterU16& image);

}  // namespace pssf
