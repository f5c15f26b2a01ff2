#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mgan/ops.hpp"
#include "mgan/rng.hpp"

namespace mgan {

// Architectural hyperparameters. The defaults are the reference configuration:
// 8 blocks of 64 channels, 3 units per path with 3x3/5x5 paths, attention at
// grains 1/2/4 with reduction ratio 16.
struct ModelConfig {
    int num_blocks = 8;
    int channels = 64;
    int units_per_path = 3;
    std::vector<int> path_kernels = {3, 5};
    std::vector<int> grains = {1, 2, 4};
    int reduction_ratio = 16;
    int scale = 4;
    int input_channels = 3;
    bool multi_scale_dense = true;
    bool hierarchical_fusion = true;
    bool attention = true;

    // Grain value meaning "one region per pixel"; clamped to min(H,W) at run
    // time so the same model accepts any input size.
    static constexpr int kPerPixelGrain = std::numeric_limits<int>::max();

    void validate() const {
        auto fail = [](const std::string& field, const std::string& why) {
            throw ConfigError("invalid model config: " + field + " " + why);
        };
        if (num_blocks < 1) fail("model.blocks", "must be >= 1");
        if (channels < 1) fail("model.channels", "must be >= 1");
        if (units_per_path < 1) fail("model.units", "must be >= 1");
        if (reduction_ratio < 1) fail("model.reduction", "must be >= 1");
        if (channels % reduction_ratio != 0)
            fail("model.channels", "must be divisible by model.reduction");
        if (path_kernels.empty()) fail("model.path_kernels", "must not be empty");
        for (int k : path_kernels)
            if (k < 1 || k % 2 == 0) fail("model.path_kernels", "entries must be odd and >= 1");
        if (grains.empty()) fail("model.grains", "must not be empty");
        for (std::size_t i = 0; i < grains.size(); ++i) {
            if (grains[i] < 1) fail("model.grains", "entries must be >= 1");
            if (i > 0 && grains[i] <= grains[i - 1])
                fail("model.grains", "must be strictly ascending");
        }
        if (scale != 2 && scale != 3 && scale != 4 && scale != 8)
            fail("model.scale", "must be one of 2, 3, 4, 8");
        if (input_channels < 1) fail("model.input_channels", "must be >= 1");
    }

    // Upsampling is staged: x2 and x3 use a single sub-pixel stage, x4 two r=2
    // stages, x8 three r=2 stages.
    std::vector<int> upsample_stages() const {
        switch (scale) {
            case 2: return {2};
            case 3: return {3};
            case 4: return {2, 2};
            default: return {2, 2, 2};
        }
    }

    // Table-style ablation presets P1..P6 over the reference backbone.
    //   P1: dense multi-scale trunk only
    //   P2: + hierarchical feature fusion
    //   P3: + channel attention               (grains [1])
    //   P4: channel + per-pixel attention     (grains [1, per-pixel])
    //   P5: channel + grain-2 attention       (grains [1, 2])
    //   P6: channel + grain-2/4 attention     (grains [1, 2, 4])
    static ModelConfig ablation_variant(int p) {
        if (p < 1 || p > 6) throw ConfigError("ablation variant must be 1..6");
        ModelConfig cfg;  // reference backbone
        switch (p) {
            case 1:
                cfg.hierarchical_fusion = false;
                cfg.attention = false;
                break;
            case 2: cfg.attention = false; break;
            case 3: cfg.grains = {1}; break;
            case 4: cfg.grains = {1, kPerPixelGrain}; break;
            case 5: cfg.grains = {1, 2}; break;
            case 6: break;
        }
        return cfg;
    }
};

template <typename T>
struct ConvParams {
    Tensor<T> weight;
    Tensor<T> bias;
};

template <typename T>
struct SeParams {
    ConvParams<T> reduce;  // 1x1, C -> C/ratio
    ConvParams<T> expand;  // 1x1, C/ratio -> C
};

template <typename T>
struct MgaParams {
    std::vector<int> grains;
    std::vector<SeParams<T>> gates;  // one shared gate per grain
    ConvParams<T> fuse;              // 1x1, |grains|*C -> C
};

template <typename T>
struct BlockParams {
    // units[i][p]: conv for path p (kernel path_kernels[p]) of unit i
    std::vector<std::vector<ConvParams<T>>> units;
    ConvParams<T> fuse;  // local feature fusion 1x1
    std::optional<MgaParams<T>> att;
};

// Two-layer gate on pooled region statistics: 1x1 reduce, ReLU, 1x1 expand,
// sigmoid. Applied positionwise, so one weight pair serves every region.
template <typename T>
Tensor<T> se_unit(const Tensor<T>& pooled, const SeParams<T>& se, Tape<T>* tape = nullptr) {
    Tensor<T> h = relu(conv2d(pooled, se.reduce.weight, se.reduce.bias, 1, 0, tape), tape);
    return sigmoid(conv2d(h, se.expand.weight, se.expand.bias, 1, 0, tape), tape);
}

// Per-grain recalibration: pool into an SxS grid, gate, re-scale the feature
// map region-wise; the per-grain results are concatenated and fused back to C
// channels by a 1x1 conv. Grains larger than the feature map clamp to min(H,W).
template <typename T>
Tensor<T> mga_unit(const Tensor<T>& x, const MgaParams<T>& mga, Tape<T>* tape = nullptr) {
    const std::int64_t spatial = std::min(x.dim(2), x.dim(3));
    std::vector<Tensor<T>> recalibrated;
    recalibrated.reserve(mga.grains.size());
    for (std::size_t gi = 0; gi < mga.grains.size(); ++gi) {
        std::int64_t grid = mga.grains[gi];
        if (grid > spatial) {
            if (mga.grains[gi] != ModelConfig::kPerPixelGrain) {
                runtime::warn_once(
                    "grain-clamp-" + std::to_string(grid) + "-" + std::to_string(spatial),
                    "attention grain " + std::to_string(grid) + " exceeds feature extent " +
                        std::to_string(spatial) + "; clamping");
            }
            grid = spatial;
        }
        Tensor<T> pooled = region_avg_pool(x, grid, tape);
        Tensor<T> alpha = se_unit(pooled, mga.gates[gi], tape);
        recalibrated.push_back(scale_regions(x, alpha, tape));
    }
    Tensor<T> cat = concat_channels(std::span<const Tensor<T>>(recalibrated), tape);
    return conv2d(cat, mga.fuse.weight, mga.fuse.bias, 1, 0, tape);
}

// One attention block: dense multi-scale units, local feature fusion, grain
// attention, residual add with the block input.
template <typename T>
Tensor<T> mgab_forward(const Tensor<T>& x, const BlockParams<T>& bp, bool multi_scale_dense,
                       Tape<T>* tape = nullptr) {
    Tensor<T> fused;
    if (multi_scale_dense) {
        std::vector<Tensor<T>> feats{x};  // grows with every unit's concatenated paths
        for (const auto& unit : bp.units) {
            Tensor<T> in =
                feats.size() == 1 ? x : concat_channels(std::span<const Tensor<T>>(feats), tape);
            std::vector<Tensor<T>> paths;
            paths.reserve(unit.size());
            for (const auto& path : unit) {
                const std::int64_t k = path.weight.dim(2);
                paths.push_back(relu(conv2d(in, path.weight, path.bias, 1, k / 2, tape), tape));
            }
            feats.push_back(concat_channels(std::span<const Tensor<T>>(paths), tape));
        }
        Tensor<T> all = concat_channels(std::span<const Tensor<T>>(feats), tape);
        fused = conv2d(all, bp.fuse.weight, bp.fuse.bias, 1, 0, tape);
    } else {
        // Plain sequential trunk: first path kernel only, no dense links.
        Tensor<T> cur = x;
        for (const auto& unit : bp.units) {
            const auto& path = unit.front();
            const std::int64_t k = path.weight.dim(2);
            cur = relu(conv2d(cur, path.weight, path.bias, 1, k / 2, tape), tape);
        }
        fused = conv2d(cur, bp.fuse.weight, bp.fuse.bias, 1, 0, tape);
    }
    Tensor<T> refined = bp.att ? mga_unit(fused, *bp.att, tape) : fused;
    return add(x, refined, tape);
}

// Full network: shallow feature conv, num_blocks attention blocks, optional
// hierarchical fusion over all block outputs, global residual to the shallow
// features, staged sub-pixel upsampling, reconstruction conv.
template <typename T>
class MganModel {
public:
    MganModel(ModelConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)) {
        cfg_.validate();
        Rng rng(seed);
        const int C = cfg_.channels;
        head_ = make_conv("head", cfg_.input_channels, C, 3, rng);
        blocks_.resize(static_cast<std::size_t>(cfg_.num_blocks));
        for (int d = 0; d < cfg_.num_blocks; ++d) {
            const std::string bn = "block" + std::to_string(d);
            auto& bp = blocks_[static_cast<std::size_t>(d)];
            const int paths = static_cast<int>(cfg_.path_kernels.size());
            bp.units.resize(static_cast<std::size_t>(cfg_.units_per_path));
            int fuse_in = C;
            for (int i = 0; i < cfg_.units_per_path; ++i) {
                const int in_ch = cfg_.multi_scale_dense ? C + i * paths * C : C;
                auto& unit = bp.units[static_cast<std::size_t>(i)];
                if (cfg_.multi_scale_dense) {
                    for (int k : cfg_.path_kernels) {
                        unit.push_back(make_conv(
                            bn + ".unit" + std::to_string(i) + ".k" + std::to_string(k), in_ch, C,
                            k, rng));
                    }
                    fuse_in += paths * C;
                } else {
                    const int k = cfg_.path_kernels.front();
                    unit.push_back(make_conv(
                        bn + ".unit" + std::to_string(i) + ".k" + std::to_string(k), in_ch, C, k,
                        rng));
                    fuse_in = C;
                }
            }
            bp.fuse = make_conv(bn + ".fuse", fuse_in, C, 1, rng);
            if (cfg_.attention) {
                MgaParams<T> mga;
                mga.grains = cfg_.grains;
                for (int g : cfg_.grains) {
                    const std::string gn =
                        bn + ".att.s" +
                        (g == ModelConfig::kPerPixelGrain ? std::string("px") : std::to_string(g));
                    SeParams<T> se;
                    se.reduce = make_conv(gn + ".w1", C, C / cfg_.reduction_ratio, 1, rng);
                    se.expand = make_conv(gn + ".w2", C / cfg_.reduction_ratio, C, 1, rng);
                    mga.gates.push_back(std::move(se));
                }
                mga.fuse = make_conv(bn + ".att.fuse", static_cast<int>(cfg_.grains.size()) * C, C,
                                     1, rng);
                bp.att = std::move(mga);
            }
        }
        if (cfg_.hierarchical_fusion) {
            trunk_fuse_ = make_conv("trunk_fuse", cfg_.num_blocks * C, C, 1, rng);
        }
        const auto stages = cfg_.upsample_stages();
        for (std::size_t s = 0; s < stages.size(); ++s) {
            upsample_.push_back(
                make_conv("up" + std::to_string(s), C, C * stages[s] * stages[s], 3, rng));
        }
        tail_ = make_conv("tail", C, cfg_.input_channels, 3, rng);
        for (const auto& name : names_) {
            if (!params_.at(name).all_finite())
                throw NumericError("non-finite initialization in " + name);
        }
    }

    const ModelConfig& config() const { return cfg_; }

    const std::vector<std::string>& param_names() const { return names_; }

    Tensor<T>& param(const std::string& name) {
        auto it = params_.find(name);
        if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
        return it->second;
    }
    const Tensor<T>& param(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
        return it->second;
    }

    std::int64_t param_count() const {
        std::int64_t total = 0;
        for (const auto& name : names_) total += params_.at(name).numel();
        return total;
    }

    // Element counts grouped by the leading name segment (head, blockN, ...),
    // in first-appearance order.
    std::vector<std::pair<std::string, std::int64_t>> param_breakdown() const {
        std::vector<std::pair<std::string, std::int64_t>> out;
        for (const auto& name : names_) {
            const std::string section = name.substr(0, name.find('.'));
            if (out.empty() || out.back().first != section) out.emplace_back(section, 0);
            out.back().second += params_.at(name).numel();
        }
        return out;
    }

    void zero_grads() {
        for (const auto& name : names_) params_.at(name).zero_grad();
    }

    const std::vector<BlockParams<T>>& blocks() const { return blocks_; }
    std::vector<BlockParams<T>>& blocks() { return blocks_; }
    const ConvParams<T>& head() const { return head_; }
    const ConvParams<T>& tail() const { return tail_; }

    Tensor<T> forward(const Tensor<T>& lr_image, Tape<T>* tape = nullptr) const {
        detail::require_rank4(lr_image, "model forward");
        if (lr_image.dim(1) != cfg_.input_channels) {
            throw ShapeError("model expects " + std::to_string(cfg_.input_channels) +
                             " input channels, got " + shape_str(lr_image.shape()));
        }
        if (lr_image.dim(2) < 16 || lr_image.dim(3) < 16) {
            throw ShapeError("model forward requires spatial extents >= 16, got " +
                             shape_str(lr_image.shape()));
        }
        Tensor<T> shallow = conv2d(lr_image, head_.weight, head_.bias, 1, 1, tape);
        Tensor<T> cur = shallow;
        std::vector<Tensor<T>> block_outs;
        block_outs.reserve(blocks_.size());
        for (const auto& bp : blocks_) {
            cur = mgab_forward(cur, bp, cfg_.multi_scale_dense, tape);
            block_outs.push_back(cur);
        }
        Tensor<T> trunk;
        if (cfg_.hierarchical_fusion) {
            Tensor<T> cat = concat_channels(std::span<const Tensor<T>>(block_outs), tape);
            trunk = conv2d(cat, trunk_fuse_->weight, trunk_fuse_->bias, 1, 0, tape);
        } else {
            trunk = cur;
        }
        trunk = add(trunk, shallow, tape);
        const auto stages = cfg_.upsample_stages();
        for (std::size_t s = 0; s < stages.size(); ++s) {
            trunk = conv2d(trunk, upsample_[s].weight, upsample_[s].bias, 1, 1, tape);
            trunk = pixel_shuffle(trunk, stages[s], tape);
        }
        return conv2d(trunk, tail_.weight, tail_.bias, 1, 1, tape);
    }

private:
    ConvParams<T> make_conv(const std::string& name, int in_ch, int out_ch, int k, Rng& rng) {
        if (in_ch < 1 || out_ch < 1) {
            throw ConfigError("invalid model config: conv " + name +
                              " has non-positive channel count");
        }
        ConvParams<T> p;
        p.weight = Tensor<T>::zeros({out_ch, in_ch, k, k});
        const double stddev = std::sqrt(2.0 / (static_cast<double>(in_ch) * k * k));
        for (auto& v : p.weight.values()) v = static_cast<T>(rng.normal() * stddev);
        p.bias = Tensor<T>::zeros({out_ch});
        p.weight.set_trainable(true);
        p.bias.set_trainable(true);
        register_param(name + ".weight", p.weight);
        register_param(name + ".bias", p.bias);
        return p;
    }

    void register_param(const std::string& name, const Tensor<T>& t) {
        if (!params_.emplace(name, t).second)
            throw ConfigError("duplicate parameter name: " + name);
        names_.push_back(name);
    }

    ModelConfig cfg_;
    ConvParams<T> head_;
    std::vector<BlockParams<T>> blocks_;
    std::optional<ConvParams<T>> trunk_fuse_;
    std::vector<ConvParams<T>> upsample_;
    ConvParams<T> tail_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, Tensor<T>> params_;
};

}  // namespace mgan
