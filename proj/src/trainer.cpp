#include "mgan/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mgan/checkpoint.hpp"
#include "mgan/ops.hpp"

namespace mgan {

void adam_apply(MganModel<float>& model, AdamState& state, double lr, const TrainConfig& tc,
                double grad_scale) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(tc.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(tc.beta2, static_cast<double>(state.step));
    for (const auto& name : model.param_names()) {
        Tensor<float>& p = model.param(name);
        p.ensure_grad();
        const std::vector<float>& g = p.grad();
        std::vector<float>& m = state.m[name];
        std::vector<float>& v = state.v[name];
        if (m.size() != g.size()) m.assign(g.size(), 0.0f);
        if (v.size() != g.size()) v.assign(g.size(), 0.0f);
        float* value = p.data();
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double gi = static_cast<double>(g[i]) * grad_scale;
            if (!std::isfinite(gi))
                throw NumericError("non-finite gradient in " + name);
            const double mi = tc.beta1 * m[i] + (1.0 - tc.beta1) * gi;
            const double vi = tc.beta2 * v[i] + (1.0 - tc.beta2) * gi * gi;
            m[i] = static_cast<float>(mi);
            v[i] = static_cast<float>(vi);
            const double m_hat = mi / bc1;
            const double v_hat = vi / bc2;
            value[i] -= static_cast<float>(lr * m_hat / (std::sqrt(v_hat) + tc.epsilon));
        }
    }
}

namespace {
const RunConfig& validated(const RunConfig& cfg) {
    cfg.validate();
    return cfg;
}
}  // namespace

Trainer::Trainer(RunConfig cfg)
    : cfg_(std::move(cfg)), model_(validated(cfg_).model, cfg_.seed), rng_(cfg_.seed) {}

Trainer Trainer::resume(const std::string& checkpoint_path) {
    Checkpoint ck = load_checkpoint(checkpoint_path);
    Trainer t(ck.config);
    load_into_model(ck, t.model_);
    t.rng_.restore_state(ck.rng_state);
    t.epoch_ = ck.epoch;
    if (ck.has_adam) t.adam_ = std::move(ck.adam);
    return t;
}

float Trainer::train_step(const Dataset& ds, double lr) {
    model_.zero_grads();
    const int lr_patch = cfg_.train.patch;  // LR edge; sample_patch crops HR at patch * scale
    double loss_sum = 0.0;
    for (int b = 0; b < cfg_.train.batch; ++b) {
        SamplePair pair = ds.sample_patch(rng_, lr_patch, cfg_.train.augment);
        Tape<float> tape;  // one sample per tape keeps activation memory flat
        Tensor<float> pred = model_.forward(pair.lr, &tape);
        Tensor<float> loss = l1_loss(pred, pair.hr, &tape);
        const float value = loss.data()[0];
        if (!std::isfinite(value)) throw NumericError("non-finite training loss");
        loss_sum += value;
        tape.backward(loss);
    }
    adam_apply(model_, adam_, lr, cfg_.train, 1.0 / cfg_.train.batch);
    return static_cast<float>(loss_sum / cfg_.train.batch);
}

void Trainer::run(const Dataset& ds, const std::string& out_dir,
                  const std::function<void(int epoch, float mean_loss)>& on_epoch,
                  int until_epoch) {
    if (until_epoch < 0) until_epoch = cfg_.train.epochs;
    std::filesystem::create_directories(out_dir);
    const std::string log_path = out_dir + "/loss.csv";
    const bool fresh_log = !std::filesystem::exists(log_path);
    std::ofstream log(log_path, std::ios::app);
    if (!log) throw IoError("cannot open " + log_path);
    if (fresh_log) log << "step,epoch,lr,loss\n";

    for (int epoch = epoch_ + 1; epoch <= until_epoch; ++epoch) {
        const double lr = lr_at_epoch(cfg_.train, epoch - 1);
        double epoch_loss = 0.0;
        for (int i = 0; i < cfg_.train.batches_per_epoch; ++i) {
            const float loss = train_step(ds, lr);
            epoch_loss += loss;
            char row[96];
            std::snprintf(row, sizeof(row), "%lld,%d,%s,%.6f\n",
                          static_cast<long long>(adam_.step), epoch, render_double(lr).c_str(),
                          static_cast<double>(loss));
            log << row;
        }
        log.flush();
        epoch_ = epoch;
        save_checkpoint(out_dir + "/ckpt-epoch-" + std::to_string(epoch) + ".bin", model_, cfg_,
                        epoch_, rng_.save_state(), &adam_);
        if (on_epoch)
            on_epoch(epoch, static_cast<float>(epoch_loss / cfg_.train.batches_per_epoch));
    }
}

}  // namespace mgan
