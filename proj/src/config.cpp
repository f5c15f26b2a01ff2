#include "mgan/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mgan/errors.hpp"

namespace mgan {

void TrainConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError("invalid train config: " + field + " " + why);
    };
    if (epochs < 1) fail("train.epochs", "must be >= 1");
    if (batches_per_epoch < 1) fail("train.batches_per_epoch", "must be >= 1");
    if (batch < 1) fail("train.batch", "must be >= 1");
    if (patch < 16) fail("train.patch", "must be >= 16");
    if (!(lr > 0.0)) fail("train.lr", "must be positive");
    if (lr_half_every < 1) fail("train.lr_half_every", "must be >= 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("train.beta1", "must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("train.beta2", "must be in [0, 1)");
    if (!(epsilon > 0.0)) fail("train.epsilon", "must be positive");
}

double lr_at_epoch(const TrainConfig& tc, int epoch) {
    const int halvings = epoch / tc.lr_half_every;
    return tc.lr * std::pow(0.5, static_cast<double>(halvings));
}

void RunConfig::validate() const {
    model.validate();
    train.validate();
    if (threads < 0) throw ConfigError("invalid config: threads must be >= 0");
}

std::string render_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last)
        throw ConfigError("config key '" + key + "': cannot parse '" + value + "'");
    return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "1") return true;
    if (value == "0") return false;
    throw ConfigError("config key '" + key + "': expected 0 or 1, got '" + value + "'");
}

// Comma-separated ints; "px" stands for the per-pixel attention grain.
std::vector<int> parse_int_list(const std::string& key, const std::string& value,
                                bool allow_px) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = strip(item);
        if (allow_px && item == "px") {
            out.push_back(ModelConfig::kPerPixelGrain);
        } else {
            out.push_back(parse_number<int>(key, item));
        }
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::string render_int_list(const std::vector<int>& v, bool use_px) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        if (use_px && v[i] == ModelConfig::kPerPixelGrain)
            out += "px";
        else
            out += std::to_string(v[i]);
    }
    return out;
}

struct Entry {
    const char* key;
    const char* doc;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {"model.blocks", "number of attention blocks in the trunk",
         [](const RunConfig& c) { return std::to_string(c.model.num_blocks); },
         [](RunConfig& c, const std::string& v) {
             c.model.num_blocks = parse_number<int>("model.blocks", v);
         }},
        {"model.channels", "feature channels carried between blocks",
         [](const RunConfig& c) { return std::to_string(c.model.channels); },
         [](RunConfig& c, const std::string& v) {
             c.model.channels = parse_number<int>("model.channels", v);
         }},
        {"model.units", "dense multi-scale units per block",
         [](const RunConfig& c) { return std::to_string(c.model.units_per_path); },
         [](RunConfig& c, const std::string& v) {
             c.model.units_per_path = parse_number<int>("model.units", v);
         }},
        {"model.path_kernels", "comma-separated odd kernel sizes of the parallel paths",
         [](const RunConfig& c) { return render_int_list(c.model.path_kernels, false); },
         [](RunConfig& c, const std::string& v) {
             c.model.path_kernels = parse_int_list("model.path_kernels", v, false);
         }},
        {"model.grains", "attention grid sizes, ascending; 'px' = one region per pixel",
         [](const RunConfig& c) { return render_int_list(c.model.grains, true); },
         [](RunConfig& c, const std::string& v) {
             c.model.grains = parse_int_list("model.grains", v, true);
         }},
        {"model.reduction", "channel reduction ratio inside the attention gates",
         [](const RunConfig& c) { return std::to_string(c.model.reduction_ratio); },
         [](RunConfig& c, const std::string& v) {
             c.model.reduction_ratio = parse_number<int>("model.reduction", v);
         }},
        {"model.scale", "upscaling factor (2, 3, 4 or 8)",
         [](const RunConfig& c) { return std::to_string(c.model.scale); },
         [](RunConfig& c, const std::string& v) {
             c.model.scale = parse_number<int>("model.scale", v);
         }},
        {"model.multi_scale_dense", "1 = densely linked parallel-kernel units, 0 = plain trunk",
         [](const RunConfig& c) { return std::string(c.model.multi_scale_dense ? "1" : "0"); },
         [](RunConfig& c, const std::string& v) {
             c.model.multi_scale_dense = parse_bool("model.multi_scale_dense", v);
         }},
        {"model.hierarchical_fusion", "1 = fuse every block output before the global residual",
         [](const RunConfig& c) { return std::string(c.model.hierarchical_fusion ? "1" : "0"); },
         [](RunConfig& c, const std::string& v) {
             c.model.hierarchical_fusion = parse_bool("model.hierarchical_fusion", v);
         }},
        {"model.attention", "1 = apply grain attention inside each block",
         [](const RunConfig& c) { return std::string(c.model.attention ? "1" : "0"); },
         [](RunConfig& c, const std::string& v) {
             c.model.attention = parse_bool("model.attention", v);
         }},
        {"train.epochs", "total training epochs",
         [](const RunConfig& c) { return std::to_string(c.train.epochs); },
         [](RunConfig& c, const std::string& v) {
             c.train.epochs = parse_number<int>("train.epochs", v);
         }},
        {"train.batches_per_epoch", "optimizer steps per epoch",
         [](const RunConfig& c) { return std::to_string(c.train.batches_per_epoch); },
         [](RunConfig& c, const std::string& v) {
             c.train.batches_per_epoch = parse_number<int>("train.batches_per_epoch", v);
         }},
        {"train.batch", "patches per optimizer step",
         [](const RunConfig& c) { return std::to_string(c.train.batch); },
         [](RunConfig& c, const std::string& v) {
             c.train.batch = parse_number<int>("train.batch", v);
         }},
        {"train.patch", "LR patch edge in pixels (HR patches are patch * scale)",
         [](const RunConfig& c) { return std::to_string(c.train.patch); },
         [](RunConfig& c, const std::string& v) {
             c.train.patch = parse_number<int>("train.patch", v);
         }},
        {"train.lr", "initial Adam learning rate",
         [](const RunConfig& c) { return render_double(c.train.lr); },
         [](RunConfig& c, const std::string& v) {
             c.train.lr = parse_number<double>("train.lr", v);
         }},
        {"train.lr_half_every", "halve the learning rate every this many epochs",
         [](const RunConfig& c) { return std::to_string(c.train.lr_half_every); },
         [](RunConfig& c, const std::string& v) {
             c.train.lr_half_every = parse_number<int>("train.lr_half_every", v);
         }},
        {"train.beta1", "Adam first-moment decay",
         [](const RunConfig& c) { return render_double(c.train.beta1); },
         [](RunConfig& c, const std::string& v) {
             c.train.beta1 = parse_number<double>("train.beta1", v);
         }},
        {"train.beta2", "Adam second-moment decay",
         [](const RunConfig& c) { return render_double(c.train.beta2); },
         [](RunConfig& c, const std::string& v) {
             c.train.beta2 = parse_number<double>("train.beta2", v);
         }},
        {"train.epsilon", "Adam denominator offset",
         [](const RunConfig& c) { return render_double(c.train.epsilon); },
         [](RunConfig& c, const std::string& v) {
             c.train.epsilon = parse_number<double>("train.epsilon", v);
         }},
        {"train.augment", "1 = random flips/rotations of training patches",
         [](const RunConfig& c) { return std::string(c.train.augment ? "1" : "0"); },
         [](RunConfig& c, const std::string& v) {
             c.train.augment = parse_bool("train.augment", v);
         }},
        {"data.degradation", "how LR inputs are made from HR images: bi or bd",
         [](const RunConfig& c) { return to_string(c.data.degradation); },
         [](RunConfig& c, const std::string& v) {
             c.data.degradation = degradation_from_string(v);
         }},
        {"data.train_manifest", "manifest listing training images",
         [](const RunConfig& c) { return c.data.train_manifest; },
         [](RunConfig& c, const std::string& v) { c.data.train_manifest = v; }},
        {"data.eval_manifest", "manifest listing evaluation images",
         [](const RunConfig& c) { return c.data.eval_manifest; },
         [](RunConfig& c, const std::string& v) { c.data.eval_manifest = v; }},
        {"seed", "seed for weight init and patch sampling",
         [](const RunConfig& c) { return std::to_string(c.seed); },
         [](RunConfig& c, const std::string& v) {
             c.seed = parse_number<std::uint64_t>("seed", v);
         }},
        {"threads", "worker threads; 0 = all hardware threads",
         [](const RunConfig& c) { return std::to_string(c.threads); },
         [](RunConfig& c, const std::string& v) {
             c.threads = parse_number<int>("threads", v);
         }},
    };
    return entries;
}

const Entry& find_entry(const std::string& key) {
    for (const Entry& e : registry()) {
        if (key == e.key) return e;
    }
    throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::set<std::string> seen;
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        const std::string key = strip(line.substr(0, eq));
        const std::string value = strip(line.substr(eq + 1));
        if (!seen.insert(key).second)
            throw ConfigError("config key '" + key + "' appears more than once");
        find_entry(key).set(cfg, value);
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key=value, got '" + assignment + "'");
    const std::string key = strip(assignment.substr(0, eq));
    const std::string value = strip(assignment.substr(eq + 1));
    find_entry(key).set(cfg, value);
}

std::string serialize_config(const RunConfig& cfg) {
    std::string out;
    for (const Entry& e : registry()) out += std::string(e.key) + " = " + e.get(cfg) + "\n";
    return out;
}

std::vector<ConfigDoc> config_docs() {
    const RunConfig defaults;
    std::vector<ConfigDoc> docs;
    for (const Entry& e : registry()) docs.push_back({e.key, e.doc, e.get(defaults)});
    return docs;
}

int effective_threads(const RunConfig& cfg) {
    if (const char* env = std::getenv("MGAN_THREADS")) {
        return parse_number<int>("MGAN_THREADS", std::string(env));
    }
    return cfg.threads;
}

}  // namespace mgan
