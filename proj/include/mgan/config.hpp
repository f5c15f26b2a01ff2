#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgan/degrade.hpp"
#include "mgan/model.hpp"

namespace mgan {

// Optimization schedule: Adam with the learning rate halved on a fixed epoch
// cadence; an epoch is batches_per_epoch sampled batches of LR patches.
struct TrainConfig {
    int epochs = 1000;
    int batches_per_epoch = 1000;
    int batch = 16;
    int patch = 48;  // LR patch edge; HR patches are patch * scale
    double lr = 1e-4;
    int lr_half_every = 200;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    bool augment = true;

    void validate() const;
};

double lr_at_epoch(const TrainConfig& tc, int epoch);

struct DataConfig {
    Degradation degradation = Degradation::bi;
    std::string train_manifest;
    std::string eval_manifest;
};

// Everything one run needs, loadable from a flat "key = value" file. Lines
// starting with '#' and blank lines are ignored; unknown or repeated keys are
// errors. serialize_config(parse_config_text(s)) is a fixed point.
struct RunConfig {
    ModelConfig model;
    TrainConfig train;
    DataConfig data;
    std::uint64_t seed = 0;
    int threads = 0;  // 0 = all hardware threads

    void validate() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// One "key=value" assignment, as accepted on the command line.
void apply_override(RunConfig& cfg, const std::string& assignment);

std::string serialize_config(const RunConfig& cfg);

struct ConfigDoc {
    std::string key;
    std::string doc;
    std::string value;  // default, rendered
};
std::vector<ConfigDoc> config_docs();

// The threads key, unless the MGAN_THREADS environment variable overrides it.
int effective_threads(const RunConfig& cfg);

// Shortest decimal form that parses back to exactly the same double.
std::string render_double(double v);

}  // namespace mgan
