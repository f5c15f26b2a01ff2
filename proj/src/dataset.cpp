#include "mgan/dataset.hpp"

#include <filesystem>
#include <fstream>

#include "mgan/errors.hpp"

namespace fs = std::filesystem;

namespace mgan {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    if (path.is_absolute()) return path.string();
    return (base / path).string();
}

ImageRGB crop_patch(const ImageRGB& img, std::int64_t y0, std::int64_t x0, std::int64_t size) {
    ImageRGB out(img.channels, size, size);
    for (std::int64_t c = 0; c < img.channels; ++c)
        for (std::int64_t y = 0; y < size; ++y)
            for (std::int64_t x = 0; x < size; ++x)
                out.at(c, y, x) = img.at(c, y0 + y, x0 + x);
    return out;
}

}  // namespace

Dataset Dataset::load(const std::string& manifest_path, Degradation kind, int scale) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest " + manifest_path);
    const fs::path base = fs::path(manifest_path).parent_path();

    Dataset ds;
    ds.scale_ = scale;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip(line);
        if (line.empty() || line[0] == '#') continue;
        const auto tab = line.find('\t');
        const std::string hr_rel = strip(tab == std::string::npos ? line : line.substr(0, tab));
        const std::string lr_rel =
            tab == std::string::npos ? "" : strip(line.substr(tab + 1));
        if (hr_rel.empty())
            throw IoError("manifest " + manifest_path + " line " + std::to_string(lineno) +
                          ": missing HR path");

        ImageRGB hr = center_crop_to_multiple(load_image(resolve(base, hr_rel)), scale);
        ImageRGB lr;
        if (lr_rel.empty()) {
            lr = degrade(hr, kind, scale);
        } else {
            lr = load_image(resolve(base, lr_rel));
            if (lr.height != hr.height / scale || lr.width != hr.width / scale)
                throw ShapeError("manifest " + manifest_path + " line " +
                                 std::to_string(lineno) + ": LR is " +
                                 std::to_string(lr.height) + "x" + std::to_string(lr.width) +
                                 " but HR/" + std::to_string(scale) + " is " +
                                 std::to_string(hr.height / scale) + "x" +
                                 std::to_string(hr.width / scale));
        }
        ds.hr_.push_back(std::move(hr));
        ds.lr_.push_back(std::move(lr));
        ds.names_.push_back(fs::path(hr_rel).filename().string());
    }
    // readable but useless content is a configuration problem, not an I/O one
    if (ds.hr_.empty()) throw ConfigError("manifest " + manifest_path + " lists no images");
    return ds;
}

SamplePair Dataset::sample_patch(Rng& rng, int lr_patch, bool augment) const {
    if (lr_patch < 1) throw ShapeError("patch size must be positive");
    const std::size_t idx = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::int64_t>(hr_.size())));
    const ImageRGB& lr = lr_[idx];
    const ImageRGB& hr = hr_[idx];
    if (lr.height < lr_patch || lr.width < lr_patch)
        throw ShapeError("image " + names_[idx] + " gives a " + std::to_string(lr.height) +
                         "x" + std::to_string(lr.width) + " LR map, smaller than the patch " +
                         std::to_string(lr_patch));
    const std::int64_t y = rng.uniform_int(lr.height - lr_patch + 1);
    const std::int64_t x = rng.uniform_int(lr.width - lr_patch + 1);

    ImageRGB lr_patch_img = crop_patch(lr, y, x, lr_patch);
    ImageRGB hr_patch_img =
        crop_patch(hr, y * scale_, x * scale_, static_cast<std::int64_t>(lr_patch) * scale_);
    if (augment) {
        const int code = static_cast<int>(rng.uniform_int(8));
        lr_patch_img = dihedral(lr_patch_img, code);
        hr_patch_img = dihedral(hr_patch_img, code);
    }
    return {image_to_tensor(lr_patch_img), image_to_tensor(hr_patch_img)};
}

}  // namespace mgan
