#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "tilefuse/geometry.hpp"
#include "tilefuse/tiling.hpp"

namespace tilefuse {

// 8-bit RGB, row-major, interleaved.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(std::size_t(w) * h * 3, 0) {}

  std::size_t bytes() const { return rgb.size(); }
  std::uint8_t* pixel(int x, int y) {
    return rgb.data() + (std::size_t(y) * width + x) * 3;
  }
  const std::uint8_t* pixel(int x, int y) const {
    return rgb.data() + (std::size_t(y) * width + x) * 3;
  }
};

struct ImageInfo {
  int width = 0;
  int height = 0;
};

bool is_supported_image(const std::filesystem::path& path);

// PNG and TIFF. Both throw DataError when the file cannot be decoded.
ImageInfo read_image_info(const std::filesystem::path& path);
Image read_image(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Image& image);

// Size of an image extent after scaling, at least one pixel.
int scaled_extent(int extent, ScaleFactor s);

// Renders one tile of the scaled image by bilinear sampling of the original.
// Pixels outside the scaled image are zero.
Image render_tile(const Image& original, ScaleFactor s, const TileSpec& tile);

}  // namespace tilefuse
