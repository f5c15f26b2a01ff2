#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mgan/degrade.hpp"
#include "mgan/image.hpp"
#include "mgan/rng.hpp"
#include "mgan/tensor.hpp"

namespace mgan {

// An aligned training example: lr is [1, C, p, p], hr is [1, C, p*s, p*s].
struct SamplePair {
    Tensor<float> lr;
    Tensor<float> hr;
};

// Image list backed by a manifest file. Each non-empty, non-comment ('#')
// line names an HR image, optionally followed by a tab and a pre-rendered LR
// image; relative paths resolve against the manifest's directory. HR images
// are center-cropped to a multiple of the scale at load; missing LR images
// are synthesized by the configured degradation and kept in float.
class Dataset {
public:
    static Dataset load(const std::string& manifest_path, Degradation kind, int scale);

    std::size_t size() const { return hr_.size(); }
    int scale() const { return scale_; }
    const ImageRGB& hr(std::size_t i) const { return hr_[i]; }
    const ImageRGB& lr(std::size_t i) const { return lr_[i]; }
    const std::string& name(std::size_t i) const { return names_[i]; }

    // Draws one aligned patch pair. Consumes the generator in a fixed order:
    // image index, LR row, LR column, then (when augmenting) a dihedral code.
    SamplePair sample_patch(Rng& rng, int lr_patch, bool augment) const;

private:
    int scale_ = 1;
    std::vector<ImageRGB> hr_;
    std::vector<ImageRGB> lr_;
    std::vector<std::string> names_;
};

}  // namespace mgan
