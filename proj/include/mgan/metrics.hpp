#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mgan/dataset.hpp"
#include "mgan/image.hpp"
#include "mgan/model.hpp"

namespace mgan {

// Fidelity scores on the BT.601 luma plane (255 scale) after shaving `shave`
// pixels from every border. PSNR is capped at 100 dB for identical planes;
// SSIM uses the standard 11x11 Gaussian window (sigma 1.5) over fully valid
// positions only.
double psnr_plane(const std::vector<float>& a, const std::vector<float>& b, std::int64_t h,
                  std::int64_t w, int shave);
double ssim_plane(const std::vector<float>& a, const std::vector<float>& b, std::int64_t h,
                  std::int64_t w, int shave);

double psnr_y(const ImageRGB& a, const ImageRGB& b, int shave);
double ssim_y(const ImageRGB& a, const ImageRGB& b, int shave);

struct Scores {
    double psnr = 0.0;
    double ssim = 0.0;
};
Scores score_pair(const ImageRGB& sr, const ImageRGB& hr, int shave);

// Plain single-pass inference; output is clamped to [0, 1] but not quantized.
ImageRGB infer(const MganModel<float>& model, const ImageRGB& lr);

// Self-ensemble: run all eight dihedral variants, map the predictions back,
// and average in float precision; quantization happens once, afterwards.
ImageRGB infer_ensemble(const MganModel<float>& model, const ImageRGB& lr);

struct EvalRow {
    std::string name;
    double psnr = 0.0;
    double ssim = 0.0;
};

struct EvalReport {
    std::vector<EvalRow> rows;
    double mean_psnr = 0.0;
    double mean_ssim = 0.0;
    std::string degradation;
    int scale = 0;
    int shave = 0;
    bool ensemble = false;
};

// Scores every dataset image: quantize the LR input to 8 bits, run `sr_fn`,
// quantize the prediction, compare against ground truth on the luma plane.
// shave < 0 means "use the scale". `ensemble` is only recorded in the report;
// the caller bakes any ensembling into sr_fn.
EvalReport evaluate_fn(const std::function<ImageRGB(const ImageRGB&)>& sr_fn, const Dataset& ds,
                       Degradation kind, bool ensemble, int shave = -1);

// Model path: sr_fn is plain or self-ensemble inference.
EvalReport evaluate(const MganModel<float>& model, const Dataset& ds, Degradation kind,
                    bool self_ensemble, int shave = -1);

// Reference path with no learned weights: plain bicubic upscaling.
EvalReport evaluate_bicubic(const Dataset& ds, Degradation kind, int shave = -1);

// CSV with a '#' comment header recording the scoring conventions, one row
// per image, and a final mean row. Byte-stable for identical reports.
void write_report_csv(const EvalReport& report, const std::string& path);
std::string report_to_csv(const EvalReport& report);

}  // namespace mgan
