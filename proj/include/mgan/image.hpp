#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgan/tensor.hpp"

namespace mgan {

// Planar float image, channel-major ([c][y][x]), values nominally in [0, 1].
// Loading always yields three channels; grayscale sources are replicated and
// alpha is dropped.
struct ImageRGB {
    std::int64_t channels = 0;
    std::int64_t height = 0;
    std::int64_t width = 0;
    std::vector<float> data;

    ImageRGB() = default;
    ImageRGB(std::int64_t c, std::int64_t h, std::int64_t w)
        : channels(c), height(h), width(w),
          data(static_cast<std::size_t>(c * h * w), 0.0f) {}

    float& at(std::int64_t c, std::int64_t y, std::int64_t x) {
        return data[static_cast<std::size_t>((c * height + y) * width + x)];
    }
    float at(std::int64_t c, std::int64_t y, std::int64_t x) const {
        return data[static_cast<std::size_t>((c * height + y) * width + x)];
    }
};

// Rounds half away from zero and clamps to [0, 255]; input is in [0, 1] scale.
std::uint8_t quantize8(float v);

// Every value snapped to the nearest 8-bit level (k / 255).
ImageRGB quantize_image(const ImageRGB& img);

// PNG (libpng) or 24-bit BMP, chosen by extension. Loads normalize to
// three 8-bit channels; saves quantize to 8-bit RGB. Throw IoError on failure.
ImageRGB load_image(const std::string& path);
void save_image(const ImageRGB& img, const std::string& path);

// [1, C, H, W] tensor in [0, 1]; the inverse clamps into range first.
Tensor<float> image_to_tensor(const ImageRGB& img);
ImageRGB tensor_to_image(const Tensor<float>& t);

// ITU-R BT.601 luma on the 255 scale: Y = 16 + 65.481 R + 128.553 G + 24.966 B
// with R, G, B in [0, 1]. Returns an H*W plane in [16, 235].
std::vector<float> rgb_to_y(const ImageRGB& img);

// The eight dihedral transforms of the plane. Code c = flip * 4 + rot applies
// a horizontal flip first (when flip is 1), then rot counter-clockwise quarter
// turns; code 0 is the identity.
ImageRGB dihedral(const ImageRGB& img, int code);
int dihedral_inverse(int code);

}  // namespace mgan
