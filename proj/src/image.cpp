#include "tilefuse/image.hpp"

#include <png.h>
#include <tiffio.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "tilefuse/error.hpp"

namespace tilefuse {
namespace {

bool has_extension(const std::filesystem::path& path,
                   std::initializer_list<const char*> exts) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return std::any_of(exts.begin(), exts.end(),
                     [&](const char* e) { return ext == e; });
}

bool is_tiff(const std::filesystem::path& path) {
  return has_extension(path, {".tif", ".tiff"});
}

struct TiffCloser {
  void operator()(TIFF* t) const { TIFFClose(t); }
};

std::unique_ptr<TIFF, TiffCloser> open_tiff(const std::filesystem::path& path) {
  TIFFSetWarningHandler(nullptr);
  TIFFSetErrorHandler(nullptr);
  std::unique_ptr<TIFF, TiffCloser> tif(TIFFOpen(path.c_str(), "r"));
  if (!tif) throw DataError("cannot open TIFF image " + path.string());
  return tif;
}

ImageInfo tiff_info(TIFF* tif) {
  std::uint32_t w = 0, h = 0;
  TIFFGetField(tif, TIFFTAG_IMAGEWIDTH, &w);
  TIFFGetField(tif, TIFFTAG_IMAGELENGTH, &h);
  return {static_cast<int>(w), static_cast<int>(h)};
}

Image read_tiff(const std::filesystem::path& path) {
  auto tif = open_tiff(path);
  auto info = tiff_info(tif.get());
  if (info.width <= 0 || info.height <= 0) {
    throw DataError("TIFF image has no extent: " + path.string());
  }
  std::vector<std::uint32_t> raster(std::size_t(info.width) * info.height);
  if (!TIFFReadRGBAImageOriented(tif.get(), info.width, info.height,
                                 raster.data(), ORIENTATION_TOPLEFT, 0)) {
    throw DataError("cannot decode TIFF image " + path.string());
  }
  Image img(info.width, info.height);
  for (std::size_t i = 0; i < raster.size(); ++i) {
    img.rgb[3 * i + 0] = TIFFGetR(raster[i]);
    img.rgb[3 * i + 1] = TIFFGetG(raster[i]);
    img.rgb[3 * i + 2] = TIFFGetB(raster[i]);
  }
  return img;
}

}  // namespace

bool is_supported_image(const std::filesystem::path& path) {
  return has_extension(path, {".png", ".tif", ".tiff"});
}

ImageInfo read_image_info(const std::filesystem::path& path) {
  if (is_tiff(path)) {
    auto tif = open_tiff(path);
    return tiff_info(tif.get());
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw DataError("cannot read image " + path.string() + ": " +
                    png.message);
  }
  ImageInfo info{static_cast<int>(png.width), static_cast<int>(png.height)};
  png_image_free(&png);
  return info;
}

Image read_image(const std::filesystem::path& path) {
  if (is_tiff(path)) return read_tiff(path);
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw DataError("cannot read image " + path.string() + ": " +
                    png.message);
  }
  png.format = PNG_FORMAT_RGB;
  Image img(static_cast<int>(png.width), static_cast<int>(png.height));
  if (!png_image_finish_read(&png, nullptr, img.rgb.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw DataError("cannot decode image " + path.string() + ": " + msg);
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& image) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width);
  png.height = static_cast<png_uint_32>(image.height);
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, image.rgb.data(), 0,
                               nullptr)) {
    throw DataError("cannot write PNG " + path.string() + ": " + png.message);
  }
}

int scaled_extent(int extent, ScaleFactor s) {
  return std::max(1, static_cast<int>(std::lround(extent * s.value())));
}

Image render_tile(const Image& original, ScaleFactor s, const TileSpec& tile) {
  Image out(tile.width, tile.height);
  const int sw = scaled_extent(original.width, s);
  const int sh = scaled_extent(original.height, s);
  const double inv = 1.0 / s.value();
  const int max_x = original.width - 1;
  const int max_y = original.height - 1;

  for (int v = 0; v < tile.height; ++v) {
    const int ys = tile.origin_y + v;
    if (ys >= sh) break;
    // Pixel-center alignment between the two frames.
    double fy = std::clamp((ys + 0.5) * inv - 0.5, 0.0, double(max_y));
    int y0 = static_cast<int>(fy);
    int y1 = std::min(y0 + 1, max_y);
    double wy = fy - y0;
    for (int u = 0; u < tile.width; ++u) {
      const int xs = tile.origin_x + u;
      if (xs >= sw) break;
      double fx = std::clamp((xs + 0.5) * inv - 0.5, 0.0, double(max_x));
      int x0 = static_cast<int>(fx);
      int x1 = std::min(x0 + 1, max_x);
      double wx = fx - x0;
      const auto* p00 = original.pixel(x0, y0);
      const auto* p01 = original.pixel(x1, y0);
      const auto* p10 = original.pixel(x0, y1);
      const auto* p11 = original.pixel(x1, y1);
      auto* dst = out.pixel(u, v);
      for (int ch = 0; ch < 3; ++ch) {
        double top = p00[ch] + wx * (p01[ch] - p00[ch]);
        double bottom = p10[ch] + wx * (p11[ch] - p10[ch]);
        dst[ch] = static_cast<std::uint8_t>(
            std::lround(std::clamp(top + wy * (bottom - top), 0.0, 255.0)));
      }
    }
  }
  return out;
}

}  // namespace tilefuse
