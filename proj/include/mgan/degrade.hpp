#pragma once

#include <string>

#include "mgan/image.hpp"

namespace mgan {

// How low-resolution inputs are synthesized from ground truth:
//   bi - bicubic downscale
//   bd - 7x7 Gaussian blur (sigma 1.6), then bicubic downscale
enum class Degradation { bi, bd };

Degradation degradation_from_string(const std::string& s);
std::string to_string(Degradation d);

inline constexpr int kBlurKernel = 7;
inline constexpr double kBlurSigma = 1.6;

// Drops edge rows/columns symmetrically until both extents divide by m.
ImageRGB center_crop_to_multiple(const ImageRGB& img, int m);

// Synthesizes the LR counterpart of an HR image whose extents divide by
// `scale`. The result stays in float; quantize separately when a pipeline
// calls for 8-bit inputs.
ImageRGB degrade(const ImageRGB& hr, Degradation kind, int scale);

}  // namespace mgan
