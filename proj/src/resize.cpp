#include "mgan/resize.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mgan/errors.hpp"

namespace mgan {

namespace {

// Precomputed taps for one axis: out[i] = sum_t weight[i][t] * in[index[i][t]].
struct AxisPlan {
    std::int64_t taps = 0;
    std::vector<std::int64_t> index;  // [out * taps]
    std::vector<double> weight;       // [out * taps]
};

AxisPlan plan_axis(std::int64_t in, std::int64_t out) {
    const double scale = static_cast<double>(out) / static_cast<double>(in);
    const bool shrink = scale < 1.0;
    const double kernel_width = shrink ? 4.0 / scale : 4.0;
    AxisPlan plan;
    plan.taps = static_cast<std::int64_t>(std::ceil(kernel_width)) + 2;
    plan.index.resize(static_cast<std::size_t>(out * plan.taps));
    plan.weight.resize(static_cast<std::size_t>(out * plan.taps));
    for (std::int64_t i = 0; i < out; ++i) {
        const double u = (static_cast<double>(i) + 0.5) / scale - 0.5;
        const std::int64_t left = static_cast<std::int64_t>(std::floor(u - kernel_width / 2));
        double sum = 0.0;
        for (std::int64_t t = 0; t < plan.taps; ++t) {
            const std::int64_t j = left + t;
            const double d = u - static_cast<double>(j);
            const double w = shrink ? scale * cubic_kernel(scale * d) : cubic_kernel(d);
            plan.index[static_cast<std::size_t>(i * plan.taps + t)] =
                std::clamp<std::int64_t>(j, 0, in - 1);
            plan.weight[static_cast<std::size_t>(i * plan.taps + t)] = w;
            sum += w;
        }
        for (std::int64_t t = 0; t < plan.taps; ++t)
            plan.weight[static_cast<std::size_t>(i * plan.taps + t)] /= sum;
    }
    return plan;
}

// Applies a plan along the row axis of an [h, w] plane, producing [out, w].
std::vector<double> apply_rows(const std::vector<double>& in, std::int64_t h, std::int64_t w,
                               const AxisPlan& plan, std::int64_t out) {
    std::vector<double> res(static_cast<std::size_t>(out * w));
    for (std::int64_t i = 0; i < out; ++i)
        for (std::int64_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::int64_t t = 0; t < plan.taps; ++t) {
                const std::int64_t j = plan.index[static_cast<std::size_t>(i * plan.taps + t)];
                acc += plan.weight[static_cast<std::size_t>(i * plan.taps + t)] *
                       in[static_cast<std::size_t>(j * w + x)];
            }
            res[static_cast<std::size_t>(i * w + x)] = acc;
        }
    return res;
}

std::vector<double> transpose(const std::vector<double>& in, std::int64_t h, std::int64_t w) {
    std::vector<double> res(in.size());
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x)
            res[static_cast<std::size_t>(x * h + y)] = in[static_cast<std::size_t>(y * w + x)];
    return res;
}

std::vector<double> gaussian_taps(int ksize, double sigma) {
    std::vector<double> k(static_cast<std::size_t>(ksize));
    const int half = ksize / 2;
    double sum = 0.0;
    for (int t = 0; t < ksize; ++t) {
        const double d = static_cast<double>(t - half);
        k[static_cast<std::size_t>(t)] = std::exp(-d * d / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(t)];
    }
    for (auto& v : k) v /= sum;
    return k;
}

// 1-D convolution along rows with clamped (replicated) borders.
std::vector<double> blur_rows(const std::vector<double>& in, std::int64_t h, std::int64_t w,
                              const std::vector<double>& taps) {
    const std::int64_t half = static_cast<std::int64_t>(taps.size()) / 2;
    std::vector<double> res(in.size());
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::int64_t t = 0; t < static_cast<std::int64_t>(taps.size()); ++t) {
                const std::int64_t yy = std::clamp<std::int64_t>(y + t - half, 0, h - 1);
                acc += taps[static_cast<std::size_t>(t)] * in[static_cast<std::size_t>(yy * w + x)];
            }
            res[static_cast<std::size_t>(y * w + x)] = acc;
        }
    return res;
}

std::vector<double> plane_of(const ImageRGB& img, std::int64_t c) {
    std::vector<double> p(static_cast<std::size_t>(img.height * img.width));
    for (std::size_t i = 0; i < p.size(); ++i)
        p[i] = static_cast<double>(
            img.data[static_cast<std::size_t>(c * img.height * img.width) + i]);
    return p;
}

}  // namespace

double cubic_kernel(double x) {
    const double ax = std::abs(x);
    if (ax <= 1.0) return (1.5 * ax - 2.5) * ax * ax + 1.0;
    if (ax < 2.0) return ((-0.5 * ax + 2.5) * ax - 4.0) * ax + 2.0;
    return 0.0;
}

ImageRGB resize_bicubic(const ImageRGB& img, std::int64_t out_h, std::int64_t out_w) {
    if (img.height < 1 || img.width < 1 || out_h < 1 || out_w < 1)
        throw ShapeError("resize needs positive dimensions");
    const AxisPlan rows = plan_axis(img.height, out_h);
    const AxisPlan cols = plan_axis(img.width, out_w);
    ImageRGB out(img.channels, out_h, out_w);
    for (std::int64_t c = 0; c < img.channels; ++c) {
        std::vector<double> p = plane_of(img, c);
        p = apply_rows(p, img.height, img.width, rows, out_h);           // [out_h, w]
        p = transpose(p, out_h, img.width);                              // [w, out_h]
        p = apply_rows(p, img.width, out_h, cols, out_w);                // [out_w, out_h]
        p = transpose(p, out_w, out_h);                                  // [out_h, out_w]
        for (std::size_t i = 0; i < p.size(); ++i)
            out.data[static_cast<std::size_t>(c * out_h * out_w) + i] =
                static_cast<float>(p[i]);
    }
    return out;
}

ImageRGB gaussian_blur(const ImageRGB& img, int ksize, double sigma) {
    if (ksize < 1 || ksize % 2 == 0) throw ShapeError("blur kernel size must be odd");
    if (!(sigma > 0.0)) throw ShapeError("blur sigma must be positive");
    const std::vector<double> taps = gaussian_taps(ksize, sigma);
    ImageRGB out(img.channels, img.height, img.width);
    for (std::int64_t c = 0; c < img.channels; ++c) {
        std::vector<double> p = plane_of(img, c);
        p = blur_rows(p, img.height, img.width, taps);
        p = transpose(p, img.height, img.width);
        p = blur_rows(p, img.width, img.height, taps);
        p = transpose(p, img.width, img.height);
        for (std::size_t i = 0; i < p.size(); ++i)
            out.data[static_cast<std::size_t>(c * img.height * img.width) + i] =
                static_cast<float>(p[i]);
    }
    return out;
}

}  // namespace mgan
