#include "mgan/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "mgan/errors.hpp"
#include "mgan/resize.hpp"

namespace mgan {

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);

std::vector<float> shave_plane(const std::vector<float>& p, std::int64_t h, std::int64_t w,
                               int shave, std::int64_t& out_h, std::int64_t& out_w) {
    if (shave < 0) throw ShapeError("shave must be non-negative");
    out_h = h - 2 * static_cast<std::int64_t>(shave);
    out_w = w - 2 * static_cast<std::int64_t>(shave);
    if (out_h < 1 || out_w < 1)
        throw ShapeError("shave " + std::to_string(shave) + " leaves nothing of a " +
                         std::to_string(h) + "x" + std::to_string(w) + " plane");
    std::vector<float> out(static_cast<std::size_t>(out_h * out_w));
    for (std::int64_t y = 0; y < out_h; ++y)
        for (std::int64_t x = 0; x < out_w; ++x)
            out[static_cast<std::size_t>(y * out_w + x)] =
                p[static_cast<std::size_t>((y + shave) * w + (x + shave))];
    return out;
}

const std::vector<double>& ssim_window() {
    static const std::vector<double> win = [] {
        std::vector<double> w(kSsimWindow * kSsimWindow);
        const int half = kSsimWindow / 2;
        double sum = 0.0;
        for (int a = 0; a < kSsimWindow; ++a)
            for (int b = 0; b < kSsimWindow; ++b) {
                const double da = a - half, db = b - half;
                w[static_cast<std::size_t>(a * kSsimWindow + b)] =
                    std::exp(-(da * da + db * db) / (2.0 * kSsimSigma * kSsimSigma));
                sum += w[static_cast<std::size_t>(a * kSsimWindow + b)];
            }
        for (auto& v : w) v /= sum;
        return w;
    }();
    return win;
}

void require_same_plane(std::size_t a, std::size_t b, std::int64_t h, std::int64_t w) {
    if (a != b || a != static_cast<std::size_t>(h * w))
        throw ShapeError("planes must share dimensions");
}

}  // namespace

double psnr_plane(const std::vector<float>& a, const std::vector<float>& b, std::int64_t h,
                  std::int64_t w, int shave) {
    require_same_plane(a.size(), b.size(), h, w);
    std::int64_t sh = 0, sw = 0;
    const std::vector<float> pa = shave_plane(a, h, w, shave, sh, sw);
    const std::vector<float> pb = shave_plane(b, h, w, shave, sh, sw);
    double mse = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
        mse += d * d;
    }
    mse /= static_cast<double>(pa.size());
    if (mse <= 0.0) return 100.0;
    return std::min(100.0, 10.0 * std::log10(255.0 * 255.0 / mse));
}

double ssim_plane(const std::vector<float>& a, const std::vector<float>& b, std::int64_t h,
                  std::int64_t w, int shave) {
    require_same_plane(a.size(), b.size(), h, w);
    std::int64_t sh = 0, sw = 0;
    const std::vector<float> pa = shave_plane(a, h, w, shave, sh, sw);
    const std::vector<float> pb = shave_plane(b, h, w, shave, sh, sw);
    if (sh < kSsimWindow || sw < kSsimWindow)
        throw ShapeError("plane too small for the 11x11 structural window after shaving");

    const std::vector<double>& win = ssim_window();
    double total = 0.0;
    std::int64_t count = 0;
    for (std::int64_t y = 0; y + kSsimWindow <= sh; ++y)
        for (std::int64_t x = 0; x + kSsimWindow <= sw; ++x) {
            double mu1 = 0.0, mu2 = 0.0, e11 = 0.0, e22 = 0.0, e12 = 0.0;
            for (int wy = 0; wy < kSsimWindow; ++wy)
                for (int wx = 0; wx < kSsimWindow; ++wx) {
                    const double wgt = win[static_cast<std::size_t>(wy * kSsimWindow + wx)];
                    const double va =
                        static_cast<double>(pa[static_cast<std::size_t>((y + wy) * sw + x + wx)]);
                    const double vb =
                        static_cast<double>(pb[static_cast<std::size_t>((y + wy) * sw + x + wx)]);
                    mu1 += wgt * va;
                    mu2 += wgt * vb;
                    e11 += wgt * va * va;
                    e22 += wgt * vb * vb;
                    e12 += wgt * va * vb;
                }
            const double var1 = e11 - mu1 * mu1;
            const double var2 = e22 - mu2 * mu2;
            const double cov = e12 - mu1 * mu2;
            total += ((2.0 * mu1 * mu2 + kC1) * (2.0 * cov + kC2)) /
                     ((mu1 * mu1 + mu2 * mu2 + kC1) * (var1 + var2 + kC2));
            ++count;
        }
    return total / static_cast<double>(count);
}

double psnr_y(const ImageRGB& a, const ImageRGB& b, int shave) {
    if (a.height != b.height || a.width != b.width)
        throw ShapeError("images must share dimensions for scoring");
    return psnr_plane(rgb_to_y(a), rgb_to_y(b), a.height, a.width, shave);
}

double ssim_y(const ImageRGB& a, const ImageRGB& b, int shave) {
    if (a.height != b.height || a.width != b.width)
        throw ShapeError("images must share dimensions for scoring");
    return ssim_plane(rgb_to_y(a), rgb_to_y(b), a.height, a.width, shave);
}

Scores score_pair(const ImageRGB& sr, const ImageRGB& hr, int shave) {
    return {psnr_y(sr, hr, shave), ssim_y(sr, hr, shave)};
}

ImageRGB infer(const MganModel<float>& model, const ImageRGB& lr) {
    return tensor_to_image(model.forward(image_to_tensor(lr)));
}

ImageRGB infer_ensemble(const MganModel<float>& model, const ImageRGB& lr) {
    ImageRGB acc;
    for (int code = 0; code < 8; ++code) {
        ImageRGB pred = infer(model, dihedral(lr, code));
        pred = dihedral(pred, dihedral_inverse(code));
        if (code == 0) {
            acc = pred;
        } else {
            for (std::size_t i = 0; i < acc.data.size(); ++i) acc.data[i] += pred.data[i];
        }
    }
    for (auto& v : acc.data) v /= 8.0f;
    return acc;
}

EvalReport evaluate_fn(const std::function<ImageRGB(const ImageRGB&)>& sr_fn, const Dataset& ds,
                       Degradation kind, bool ensemble, int shave) {
    if (ds.size() == 0) throw ConfigError("evaluation needs at least one image");
    EvalReport report;
    report.degradation = to_string(kind);
    report.scale = ds.scale();
    report.shave = shave < 0 ? ds.scale() : shave;
    report.ensemble = ensemble;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const ImageRGB lr_q = quantize_image(ds.lr(i));
        const ImageRGB sr = quantize_image(sr_fn(lr_q));
        const Scores s = score_pair(sr, ds.hr(i), report.shave);
        report.rows.push_back({ds.name(i), s.psnr, s.ssim});
        report.mean_psnr += s.psnr;
        report.mean_ssim += s.ssim;
    }
    report.mean_psnr /= static_cast<double>(report.rows.size());
    report.mean_ssim /= static_cast<double>(report.rows.size());
    return report;
}

EvalReport evaluate(const MganModel<float>& model, const Dataset& ds, Degradation kind,
                    bool self_ensemble, int shave) {
    return evaluate_fn(
        [&](const ImageRGB& lr) {
            return self_ensemble ? infer_ensemble(model, lr) : infer(model, lr);
        },
        ds, kind, self_ensemble, shave);
}

EvalReport evaluate_bicubic(const Dataset& ds, Degradation kind, int shave) {
    const int s = ds.scale();
    return evaluate_fn(
        [s](const ImageRGB& lr) { return resize_bicubic(lr, lr.height * s, lr.width * s); }, ds,
        kind, false, shave);
}

std::string report_to_csv(const EvalReport& report) {
    std::string out;
    char buf[160];
    out += "# evaluation report\n";
    out += "# degradation: " + report.degradation + "\n";
    std::snprintf(buf, sizeof(buf), "# scale: %d\n# shave: %d\n# ensemble: %d\n", report.scale,
                  report.shave, report.ensemble ? 1 : 0);
    out += buf;
    if (report.degradation == "bd") {
        std::snprintf(buf, sizeof(buf), "# blur: %dx%d gaussian, sigma %g\n", kBlurKernel,
                      kBlurKernel, kBlurSigma);
        out += buf;
    }
    out += "# luma: bt601 (16..235), inputs and predictions quantized to 8 bits\n";
    out += "# ssim: 11x11 gaussian window, sigma 1.5, valid positions\n";
    out += "name,psnr_db,ssim\n";
    for (const auto& row : report.rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.6f\n", row.name.c_str(), row.psnr, row.ssim);
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "mean,%.4f,%.6f\n", report.mean_psnr, report.mean_ssim);
    out += buf;
    return out;
}

void write_report_csv(const EvalReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write " + path);
    const std::string csv = report_to_csv(report);
    f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    if (!f) throw IoError("failed to write " + path);
}

}  // namespace mgan
