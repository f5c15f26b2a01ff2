#pragma once

#include <cstdint>

#include "mgan/image.hpp"

namespace mgan {

// Keys cubic convolution kernel with a = -0.5 (support [-2, 2]).
double cubic_kernel(double x);

// Bicubic resize with the usual photometric conventions: output sample i maps
// to input coordinate (i + 0.5) / scale - 0.5, the kernel is stretched by
// 1/scale when downscaling (antialiasing), edges replicate, and each output's
// weights are normalized to sum to one. Separable, computed in double.
ImageRGB resize_bicubic(const ImageRGB& img, std::int64_t out_h, std::int64_t out_w);

// Separable Gaussian blur with replicated borders; ksize must be odd.
ImageRGB gaussian_blur(const ImageRGB& img, int ksize, double sigma);

}  // namespace mgan
