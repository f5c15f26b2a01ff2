#pragma once

#include <string>
#include <vector>

#include "mgan/config.hpp"
#include "mgan/model.hpp"
#include "mgan/trainer.hpp"

namespace mgan {

// Self-describing binary snapshot: magic "MGANCKPT", format version, the
// serialized run configuration, completed epoch count, the sampler's RNG
// stream, a table of named float tensors, and (optionally) Adam moments in
// the same parameter order. All integers and floats are little-endian;
// save -> load -> save reproduces the file byte for byte.
struct Checkpoint {
    RunConfig config;
    int epoch = 0;
    std::string rng_state;
    std::vector<std::string> names;
    std::vector<Tensor<float>> tensors;
    bool has_adam = false;
    AdamState adam;
};

void save_checkpoint(const std::string& path, const MganModel<float>& model,
                     const RunConfig& cfg, int epoch, const std::string& rng_state,
                     const AdamState* adam);

Checkpoint load_checkpoint(const std::string& path);

// Copies checkpoint tensors into a model built from the same configuration;
// any name or shape mismatch raises IoError.
void load_into_model(const Checkpoint& ckpt, MganModel<float>& model);

}  // namespace mgan
