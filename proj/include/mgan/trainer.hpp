#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mgan/config.hpp"
#include "mgan/dataset.hpp"
#include "mgan/model.hpp"
#include "mgan/rng.hpp"

namespace mgan {

// Adam moment buffers, keyed by parameter name. `step` counts applied
// updates and drives the bias correction.
struct AdamState {
    std::int64_t step = 0;
    std::map<std::string, std::vector<float>> m;
    std::map<std::string, std::vector<float>> v;
};

// One Adam update from the gradients currently stored on the parameters,
// scaled by grad_scale (1/batch for mean-loss semantics). Non-finite
// gradients abort with NumericError.
void adam_apply(MganModel<float>& model, AdamState& state, double lr, const TrainConfig& tc,
                double grad_scale);

// Patch-based trainer: every step samples `batch` aligned pairs, accumulates
// L1 gradients one sample at a time (so memory stays at one tape), and
// applies Adam. Checkpoints are written after every epoch and the per-step
// loss log appends to <out_dir>/loss.csv.
class Trainer {
public:
    explicit Trainer(RunConfig cfg);

    // Restores model weights, optimizer moments, RNG stream and epoch count;
    // the run configuration comes from the checkpoint itself.
    static Trainer resume(const std::string& checkpoint_path);

    MganModel<float>& model() { return model_; }
    const MganModel<float>& model() const { return model_; }
    const RunConfig& config() const { return cfg_; }
    int completed_epochs() const { return epoch_; }
    std::int64_t global_step() const { return adam_.step; }
    Rng& rng() { return rng_; }
    AdamState& adam_state() { return adam_; }

    float train_step(const Dataset& ds, double lr);

    // Trains up to `until_epoch` (the configured epoch count when negative).
    // Picks up after completed_epochs(), so resumed runs continue seamlessly.
    void run(const Dataset& ds, const std::string& out_dir,
             const std::function<void(int epoch, float mean_loss)>& on_epoch = {},
             int until_epoch = -1);

private:
    RunConfig cfg_;
    MganModel<float> model_;
    Rng rng_;
    AdamState adam_;
    int epoch_ = 0;
};

}  // namespace mgan
