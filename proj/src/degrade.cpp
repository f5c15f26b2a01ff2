#include "mgan/degrade.hpp"

#include "mgan/errors.hpp"
#include "mgan/resize.hpp"

namespace mgan {

Degradation degradation_from_string(const std::string& s) {
    if (s == "bi") return Degradation::bi;
    if (s == "bd") return Degradation::bd;
    throw ConfigError("unknown degradation '" + s + "' (expected bi or bd)");
}

std::string to_string(Degradation d) {
    return d == Degradation::bi ? "bi" : "bd";
}

ImageRGB center_crop_to_multiple(const ImageRGB& img, int m) {
    if (m < 1) throw ShapeError("crop multiple must be positive");
    const std::int64_t h = img.height - img.height % m;
    const std::int64_t w = img.width - img.width % m;
    if (h < 1 || w < 1)
        throw ShapeError("image " + std::to_string(img.height) + "x" +
                         std::to_string(img.width) + " is smaller than the crop multiple " +
                         std::to_string(m));
    const std::int64_t oy = (img.height - h) / 2;
    const std::int64_t ox = (img.width - w) / 2;
    ImageRGB out(img.channels, h, w);
    for (std::int64_t c = 0; c < img.channels; ++c)
        for (std::int64_t y = 0; y < h; ++y)
            for (std::int64_t x = 0; x < w; ++x) out.at(c, y, x) = img.at(c, y + oy, x + ox);
    return out;
}

ImageRGB degrade(const ImageRGB& hr, Degradation kind, int scale) {
    if (scale < 1) throw ShapeError("degradation scale must be positive");
    if (hr.height % scale != 0 || hr.width % scale != 0)
        throw ShapeError("HR extents " + std::to_string(hr.height) + "x" +
                         std::to_string(hr.width) + " must divide by the scale " +
                         std::to_string(scale) + "; crop first");
    const ImageRGB& src = hr;
    if (kind == Degradation::bd) {
        ImageRGB blurred = gaussian_blur(src, kBlurKernel, kBlurSigma);
        return resize_bicubic(blurred, hr.height / scale, hr.width / scale);
    }
    return resize_bicubic(src, hr.height / scale, hr.width / scale);
}

}  // namespace mgan
