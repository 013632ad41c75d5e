#include "iit/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

namespace iit {

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr fp(std::fopen(path.c_str(), mode), &std::fclose);
  if (!fp) throw IoError("cannot open file: " + path);
  return fp;
}

std::string lower_ext(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return {};
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

int quantize(double v, int maxval) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<int>(std::lround(c * maxval));
}

// ---- PNG ----------------------------------------------------------------

RasterImage read_png_stream(std::FILE* fp, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: read struct allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng: info struct allocation failed");
  }

  std::vector<png_byte> raster;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decode failed: " + path);
  }

  png_init_io(png, fp);
  png_read_info(png, info);

  const png_byte color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color_type & PNG_COLOR_MASK_ALPHA || png_get_valid(png, info, PNG_INFO_tRNS))
    png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int width = static_cast<int>(png_get_image_width(png, info));
  const int height = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("PNG decode: unsupported channel count in " + path);
  }

  const std::size_t stride = png_get_rowbytes(png, info);
  raster.resize(stride * height);
  rows.resize(height);
  for (int y = 0; y < height; ++y) rows[y] = raster.data() + y * stride;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  RasterImage img(height, width, channels);
  const double scale = depth == 16 ? 1.0 / 65535.0 : 1.0 / 255.0;
  for (int y = 0; y < height; ++y) {
    const png_byte* row = raster.data() + static_cast<std::size_t>(y) * stride;
    for (int x = 0; x < width; ++x) {
      for (int ch = 0; ch < channels; ++ch) {
        const std::size_t s = (static_cast<std::size_t>(x) * channels + ch);
        double v;
        if (depth == 16)
          v = ((row[2 * s] << 8) | row[2 * s + 1]) * scale;  // network byte order
        else
          v = row[s] * scale;
        img.at(y, x, ch) = v;
      }
    }
  }
  return img;
}

// ---- PPM (P6) -----------------------------------------------------------

int next_ppm_token(std::FILE* fp) {
  // skips whitespace and '#' comments, returns a nonnegative integer
  int c = std::fgetc(fp);
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = std::fgetc(fp);
    } else if (std::isspace(c)) {
      c = std::fgetc(fp);
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) throw IoError("PPM: malformed header");
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = std::fgetc(fp);
  }
  return value;
}

// ---- Radiance HDR (RGBE) -------------------------------------------------

void rgbe_to_rgb(const unsigned char rgbe[4], double* out) {
  if (rgbe[3] == 0) {
    out[0] = out[1] = out[2] = 0.0;
    return;
  }
  const double f = std::ldexp(1.0, static_cast<int>(rgbe[3]) - (128 + 8));
  out[0] = rgbe[0] * f;
  out[1] = rgbe[1] * f;
  out[2] = rgbe[2] * f;
}

void read_hdr_flat(std::FILE* fp, double* data, std::size_t numpixels,
                   const std::string& path) {
  unsigned char rgbe[4];
  for (std::size_t i = 0; i < numpixels; ++i) {
    if (std::fread(rgbe, 1, 4, fp) != 4) throw IoError("HDR: truncated pixel data in " + path);
    rgbe_to_rgb(rgbe, data + 3 * i);
  }
}

RasterImage read_hdr_stream(std::FILE* fp, const std::string& path) {
  char line[256];
  if (!std::fgets(line, sizeof(line), fp) || std::strncmp(line, "#?", 2) != 0)
    throw IoError("HDR: missing #? signature in " + path);

  bool format_ok = false;
  for (;;) {
    if (!std::fgets(line, sizeof(line), fp)) throw IoError("HDR: truncated header in " + path);
    if (line[0] == '\n' || line[0] == '\0') break;
    if (std::strncmp(line, "FORMAT=32-bit_rle_rgbe", 22) == 0) format_ok = true;
  }
  if (!format_ok) throw IoError("HDR: FORMAT specifier missing in " + path);

  int width = 0, height = 0;
  if (!std::fgets(line, sizeof(line), fp) ||
      std::sscanf(line, "-Y %d +X %d", &height, &width) != 2 || width <= 0 || height <= 0)
    throw IoError("HDR: unsupported or missing resolution line in " + path);

  RasterImage img(height, width, 3);
  double* data = img.values().data();

  if (width < 8 || width > 0x7fff) {
    read_hdr_flat(fp, data, img.pixel_count(), path);
  } else {
    std::vector<unsigned char> scan(static_cast<std::size_t>(width) * 4);
    for (int y = 0; y < height; ++y) {
      unsigned char rgbe[4];
      if (std::fread(rgbe, 1, 4, fp) != 4) throw IoError("HDR: truncated scanline in " + path);
      if (rgbe[0] != 2 || rgbe[1] != 2 || (rgbe[2] & 0x80)) {
        // not run-length encoded: this was the first pixel, read the rest flat
        double* row = data + static_cast<std::size_t>(y) * width * 3;
        rgbe_to_rgb(rgbe, row);
        read_hdr_flat(fp, row + 3,
                      img.pixel_count() - static_cast<std::size_t>(y) * width - 1, path);
        break;
      }
      if (((rgbe[2] << 8) | rgbe[3]) != width)
        throw IoError("HDR: scanline width mismatch in " + path);
      // four components stored separately, run-length encoded
      for (int comp = 0; comp < 4; ++comp) {
        std::size_t pos = static_cast<std::size_t>(comp) * width;
        const std::size_t end = pos + width;
        while (pos < end) {
          unsigned char buf[2];
          if (std::fread(buf, 1, 2, fp) != 2) throw IoError("HDR: truncated run in " + path);
          if (buf[0] > 128) {
            std::size_t count = buf[0] - 128;
            if (count > end - pos) throw IoError("HDR: bad run length in " + path);
            std::fill_n(scan.begin() + pos, count, buf[1]);
            pos += count;
          } else {
            std::size_t count = buf[0];
            if (count == 0 || count > end - pos)
              throw IoError("HDR: bad literal length in " + path);
            scan[pos++] = buf[1];
            if (count > 1 &&
                std::fread(scan.data() + pos, 1, count - 1, fp) != count - 1)
              throw IoError("HDR: truncated literal run in " + path);
            pos += count - 1;
          }
        }
      }
      double* row = data + static_cast<std::size_t>(y) * width * 3;
      for (int x = 0; x < width; ++x) {
        const unsigned char rgbe_px[4] = {scan[x], scan[x + width],
                                          scan[x + 2 * width], scan[x + 3 * width]};
        rgbe_to_rgb(rgbe_px, row + 3 * x);
      }
    }
  }
  img.mark_hdr();
  return img;
}

}  // namespace

RasterImage load_png(const std::string& path) {
  auto fp = open_file(path, "rb");
  return read_png_stream(fp.get(), path);
}

void save_png(const std::string& path, const RasterImage& img, int bit_depth) {
  if (img.empty()) throw ShapeError("save_png: empty image");
  if (bit_depth != 8 && bit_depth != 16)
    throw ParamError("save_png: bit depth must be 8 or 16");
  auto fp = open_file(path, "wb");

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng: write struct allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng: info struct allocation failed");
  }

  const int width = img.width(), height = img.height(), channels = img.channels();
  const int maxval = bit_depth == 16 ? 65535 : 255;
  const std::size_t stride =
      static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  std::vector<png_byte> raster(stride * height);
  for (int y = 0; y < height; ++y) {
    png_byte* row = raster.data() + y * stride;
    for (int x = 0; x < width; ++x) {
      for (int ch = 0; ch < channels; ++ch) {
        const int v = quantize(img.at(y, x, ch), maxval);
        const std::size_t s = static_cast<std::size_t>(x) * channels + ch;
        if (bit_depth == 16) {
          row[2 * s] = static_cast<png_byte>(v >> 8);
          row[2 * s + 1] = static_cast<png_byte>(v & 0xff);
        } else {
          row[s] = static_cast<png_byte>(v);
        }
      }
    }
  }
  std::vector<png_bytep> rows(height);
  for (int y = 0; y < height; ++y) rows[y] = raster.data() + y * stride;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode failed: " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, bit_depth,
               channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

RasterImage load_ppm(const std::string& path) {
  auto fp = open_file(path, "rb");
  char magic[2];
  if (std::fread(magic, 1, 2, fp.get()) != 2 || magic[0] != 'P' || magic[1] != '6')
    throw IoError("PPM: not a P6 file: " + path);
  const int width = next_ppm_token(fp.get());
  const int height = next_ppm_token(fp.get());
  const int maxval = next_ppm_token(fp.get());
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535)
    throw IoError("PPM: invalid header in " + path);
  // exactly one whitespace byte separates the header from the raster
  RasterImage img(height, width, 3);
  const std::size_t samples = img.value_count();
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> buf(samples * bytes);
  if (std::fread(buf.data(), 1, buf.size(), fp.get()) != buf.size())
    throw IoError("PPM: truncated pixel data in " + path);
  auto dst = img.values();
  for (std::size_t i = 0; i < samples; ++i) {
    const int v = bytes == 2 ? ((buf[2 * i] << 8) | buf[2 * i + 1]) : buf[i];
    dst[i] = static_cast<double>(v) / maxval;
  }
  return img;
}

void save_ppm(const std::string& path, const RasterImage& img, int bit_depth) {
  if (img.empty()) throw ShapeError("save_ppm: empty image");
  if (img.channels() != 3) throw ShapeError("save_ppm: P6 requires a 3-channel image");
  if (bit_depth != 8 && bit_depth != 16)
    throw ParamError("save_ppm: bit depth must be 8 or 16");
  auto fp = open_file(path, "wb");
  const int maxval = bit_depth == 16 ? 65535 : 255;
  std::fprintf(fp.get(), "P6\n%d %d\n%d\n", img.width(), img.height(), maxval);
  auto src = img.values();
  std::vector<unsigned char> buf;
  buf.reserve(src.size() * (bit_depth / 8));
  for (double value : src) {
    const int v = quantize(value, maxval);
    if (bit_depth == 16) buf.push_back(static_cast<unsigned char>(v >> 8));
    buf.push_back(static_cast<unsigned char>(v & 0xff));
  }
  if (std::fwrite(buf.data(), 1, buf.size(), fp.get()) != buf.size())
    throw IoError("PPM: short write to " + path);
}

RasterImage load_hdr(const std::string& path) {
  auto fp = open_file(path, "rb");
  return read_hdr_stream(fp.get(), path);
}

RasterImage load_image(const std::string& path) {
  auto fp = open_file(path, "rb");
  unsigned char magic[8] = {0};
  const std::size_t got = std::fread(magic, 1, sizeof(magic), fp.get());
  fp.reset();
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) return load_png(path);
  if (got >= 2 && magic[0] == 'P' && magic[1] == '6') return load_ppm(path);
  if (got >= 2 && magic[0] == '#' && magic[1] == '?') return load_hdr(path);
  throw IoError("unrecognized image format: " + path);
}

void save_image(const std::string& path, const RasterImage& img, int bit_depth) {
  const std::string ext = lower_ext(path);
  if (ext == "png") {
    save_png(path, img, bit_depth);
  } else if (ext == "ppm") {
    save_ppm(path, img, bit_depth);
  } else {
    throw IoError("unsupported output format (use .png or .ppm): " + path);
  }
}

}  // namespace iit
