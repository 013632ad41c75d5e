#pragma once

#include <string>

#include "iit/image.hpp"

namespace iit {

// Loads PNG (8/16-bit), binary PPM (P6) or Radiance HDR (RGBE), sniffing the
// magic bytes. LDR intensities are normalized to [0,1]; HDR images keep their
// radiance values and are flagged as such.
RasterImage load_image(const std::string& path);

// Dispatches on the file extension: .png or .ppm.
void save_image(const std::string& path, const RasterImage& img, int bit_depth = 8);

RasterImage load_png(const std::string& path);
void save_png(const std::string& path, const RasterImage& img, int bit_depth = 8);

RasterImage load_ppm(const std::string& path);
void save_ppm(const std::string& path, const RasterImage& img, int bit_depth = 8);

RasterImage load_hdr(const std::string& path);

}  // namespace iit
