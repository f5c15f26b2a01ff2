// Command-line front end: train, super-resolve, evaluate, degrade, and
// inspect, all driven by the flat key = value run configuration.
#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "mgan/checkpoint.hpp"
#include "mgan/config.hpp"
#include "mgan/dataset.hpp"
#include "mgan/degrade.hpp"
#include "mgan/image.hpp"
#include "mgan/metrics.hpp"
#include "mgan/runtime.hpp"
#include "mgan/trainer.hpp"

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string config_key_footer() {
    std::string out = "Config keys (key = value, one per line; '#' comments):\n";
    for (const auto& doc : mgan::config_docs()) {
        const std::size_t pad = doc.key.size() < 26 ? 26 - doc.key.size() : 2;
        out += "  " + doc.key + std::string(pad, ' ') + doc.doc + " [default: " + doc.value +
               "]\n";
    }
    out += "The MGAN_THREADS environment variable overrides the threads key.";
    return out;
}

mgan::MganModel<float> model_from(const mgan::Checkpoint& ck) {
    mgan::MganModel<float> model(ck.config.model, ck.config.seed);
    mgan::load_into_model(ck, model);
    return model;
}

struct TrainArgs {
    std::string config, data, out, resume;
};

void run_train(const TrainArgs& a) {
    mgan::Trainer trainer = [&] {
        if (a.resume.empty()) {
            if (a.config.empty())
                throw mgan::ConfigError("train needs --config (or --resume)");
            return mgan::Trainer(mgan::parse_config_file(a.config));
        }
        mgan::Trainer t = mgan::Trainer::resume(a.resume);
        if (!a.config.empty()) {
            const mgan::RunConfig file_cfg = mgan::parse_config_file(a.config);
            if (mgan::serialize_config(file_cfg) != mgan::serialize_config(t.config()))
                throw mgan::ConfigError(
                    "--config disagrees with the configuration stored in " + a.resume);
        }
        return t;
    }();
    const mgan::RunConfig& cfg = trainer.config();
    mgan::runtime::set_thread_count(mgan::effective_threads(cfg));

    const std::string manifest = a.data.empty() ? cfg.data.train_manifest : a.data;
    if (manifest.empty())
        throw mgan::ConfigError("no training manifest: pass --data or set data.train_manifest");
    const mgan::Dataset ds = mgan::Dataset::load(manifest, cfg.data.degradation, cfg.model.scale);

    std::printf("model: %lld parameters, x%d, %zu training image(s)\n",
                static_cast<long long>(trainer.model().param_count()), cfg.model.scale, ds.size());
    if (trainer.completed_epochs() >= cfg.train.epochs) {
        std::printf("nothing to do: checkpoint already covers all %d epochs\n",
                    cfg.train.epochs);
        return;
    }
    if (trainer.completed_epochs() > 0)
        std::printf("resuming after epoch %d\n", trainer.completed_epochs());

    auto t0 = std::chrono::steady_clock::now();
    trainer.run(ds, a.out, [&](int epoch, float mean_loss) {
        std::printf("epoch %d/%d  loss %.6f  lr %s  (%.1f s)\n", epoch, cfg.train.epochs,
                    static_cast<double>(mean_loss),
                    mgan::render_double(mgan::lr_at_epoch(cfg.train, epoch - 1)).c_str(),
                    seconds_since(t0));
        std::fflush(stdout);
        t0 = std::chrono::steady_clock::now();
    });
}

struct SrArgs {
    std::string ckpt, input, output;
    bool ensemble = false;
};

void run_sr(const SrArgs& a) {
    const mgan::Checkpoint ck = mgan::load_checkpoint(a.ckpt);
    const mgan::MganModel<float> model = model_from(ck);
    mgan::runtime::set_thread_count(mgan::effective_threads(ck.config));

    const mgan::ImageRGB lr = mgan::load_image(a.input);
    const auto t0 = std::chrono::steady_clock::now();
    const mgan::ImageRGB sr =
        a.ensemble ? mgan::infer_ensemble(model, lr) : mgan::infer(model, lr);
    const double secs = seconds_since(t0);
    mgan::save_image(sr, a.output);
    std::printf("%lldx%lld -> %lldx%lld (x%d%s) in %.3f s\n", static_cast<long long>(lr.height),
                static_cast<long long>(lr.width), static_cast<long long>(sr.height),
                static_cast<long long>(sr.width), ck.config.model.scale,
                a.ensemble ? ", self-ensemble" : "", secs);
}

struct EvalArgs {
    std::string ckpt, baseline, data, degradation = "bi", report;
    int scale = 0;
    int shave = -1;
    bool ensemble = false;
};

void run_eval(const EvalArgs& a) {
    if (a.ckpt.empty() == a.baseline.empty())
        throw mgan::ConfigError("pass exactly one of --ckpt or --baseline");
    const mgan::Degradation kind = mgan::degradation_from_string(a.degradation);

    mgan::EvalReport report;
    if (!a.baseline.empty()) {
        if (a.baseline != "bicubic")
            throw mgan::ConfigError("unknown baseline '" + a.baseline + "' (only: bicubic)");
        if (a.scale < 1) throw mgan::ConfigError("--baseline needs --scale");
        const mgan::Dataset ds = mgan::Dataset::load(a.data, kind, a.scale);
        report = mgan::evaluate_bicubic(ds, kind, a.shave);
    } else {
        const mgan::Checkpoint ck = mgan::load_checkpoint(a.ckpt);
        if (a.scale > 0 && a.scale != ck.config.model.scale)
            throw mgan::ConfigError("--scale " + std::to_string(a.scale) +
                                    " disagrees with the checkpoint's x" +
                                    std::to_string(ck.config.model.scale));
        const mgan::MganModel<float> model = model_from(ck);
        mgan::runtime::set_thread_count(mgan::effective_threads(ck.config));
        const mgan::Dataset ds = mgan::Dataset::load(a.data, kind, ck.config.model.scale);
        report = mgan::evaluate(model, ds, kind, a.ensemble, a.shave);
    }
    if (!a.report.empty()) mgan::write_report_csv(report, a.report);
    std::printf("%s x%d, %zu image(s): mean PSNR %.4f dB, mean SSIM %.6f\n",
                report.degradation.c_str(), report.scale, report.rows.size(), report.mean_psnr,
                report.mean_ssim);
}

void run_params(const std::string& config_path) {
    const mgan::RunConfig cfg = mgan::parse_config_file(config_path);
    const mgan::MganModel<float> model(cfg.model, cfg.seed);
    std::printf("total parameters: %lld\n", static_cast<long long>(model.param_count()));
    for (const auto& [section, count] : model.param_breakdown())
        std::printf("  %-12s %10lld\n", section.c_str(), static_cast<long long>(count));
}

struct DegradeArgs {
    std::string input, output, degradation = "bi";
    int scale = 0;
};

void run_degrade(const DegradeArgs& a) {
    if (a.scale < 1) throw mgan::ConfigError("--scale must be >= 1");
    const mgan::Degradation kind = mgan::degradation_from_string(a.degradation);
    const mgan::ImageRGB hr = mgan::center_crop_to_multiple(mgan::load_image(a.input), a.scale);
    const mgan::ImageRGB lr = mgan::degrade(hr, kind, a.scale);
    mgan::save_image(lr, a.output);
    std::printf("%lldx%lld -> %lldx%lld (%s, x%d)\n", static_cast<long long>(hr.height),
                static_cast<long long>(hr.width), static_cast<long long>(lr.height),
                static_cast<long long>(lr.width), a.degradation.c_str(), a.scale);
}

void run_inspect(const std::string& ckpt_path) {
    const mgan::Checkpoint ck = mgan::load_checkpoint(ckpt_path);
    long long total = 0;
    for (const auto& t : ck.tensors) total += t.numel();
    std::printf("epoch: %d\n", ck.epoch);
    std::printf("tensors: %zu (%lld parameters)\n", ck.tensors.size(), total);
    if (ck.has_adam)
        std::printf("optimizer: adam, step %lld\n", static_cast<long long>(ck.adam.step));
    else
        std::printf("optimizer: none\n");
    std::printf("config:\n");
    std::string line;
    for (char c : mgan::serialize_config(ck.config)) {
        if (c == '\n') {
            std::printf("  %s\n", line.c_str());
            line.clear();
        } else {
            line += c;
        }
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mgan: multi-grained attention network for single-image super-resolution"};
    app.require_subcommand(1);
    app.footer(config_key_footer());

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train a model (checkpoints + loss.csv)");
    train->add_option("--config", train_args.config, "run configuration file");
    train->add_option("--data", train_args.data, "training manifest (overrides the config)");
    train->add_option("--out", train_args.out, "output directory")->required();
    train->add_option("--resume", train_args.resume, "checkpoint to continue from");

    SrArgs sr_args;
    CLI::App* sr = app.add_subcommand("sr", "Super-resolve one image");
    sr->add_option("--ckpt", sr_args.ckpt, "model checkpoint")->required();
    sr->add_option("--input", sr_args.input, "low-resolution input image")->required();
    sr->add_option("--output", sr_args.output, "output image path (.png or .bmp)")->required();
    sr->add_flag("--self-ensemble", sr_args.ensemble, "average the 8 dihedral passes");

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Score a model or baseline on a manifest");
    eval->add_option("--ckpt", eval_args.ckpt, "model checkpoint");
    eval->add_option("--baseline", eval_args.baseline, "reference method (bicubic)");
    eval->add_option("--data", eval_args.data, "evaluation manifest")->required();
    eval->add_option("--scale", eval_args.scale, "upscaling factor (required for --baseline)");
    eval->add_option("--degradation", eval_args.degradation, "bi or bd [bi]");
    eval->add_option("--report", eval_args.report, "write the CSV report here");
    eval->add_option("--shave", eval_args.shave, "border pixels to ignore [scale]");
    eval->add_flag("--self-ensemble", eval_args.ensemble, "average the 8 dihedral passes");

    std::string params_config;
    CLI::App* params = app.add_subcommand("params", "Print the parameter count breakdown");
    params->add_option("--config", params_config, "run configuration file")->required();

    DegradeArgs degrade_args;
    CLI::App* degrade = app.add_subcommand("degrade", "Produce the LR rendition of an image");
    degrade->add_option("--input", degrade_args.input, "high-resolution image")->required();
    degrade->add_option("--output", degrade_args.output, "low-resolution output path")->required();
    degrade->add_option("--scale", degrade_args.scale, "downscaling factor")->required();
    degrade->add_option("--degradation", degrade_args.degradation, "bi or bd [bi]");

    std::string inspect_ckpt;
    CLI::App* inspect = app.add_subcommand("inspect", "Describe a checkpoint file");
    inspect->add_option("--ckpt", inspect_ckpt, "checkpoint to describe")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // 2 for any usage problem, 0 for --help
    }

    try {
        if (train->parsed()) run_train(train_args);
        if (sr->parsed()) run_sr(sr_args);
        if (eval->parsed()) run_eval(eval_args);
        if (params->parsed()) run_params(params_config);
        if (degrade->parsed()) run_degrade(degrade_args);
        if (inspect->parsed()) run_inspect(inspect_ckpt);
        return 0;
    } catch (const mgan::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mgan::ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const mgan::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
