#include "mgan/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "mgan/errors.hpp"

namespace mgan {

namespace {

constexpr char kMagic[8] = {'M', 'G', 'A', 'N', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint serialization assumes a little-endian host");

class Writer {
public:
    explicit Writer(const std::string& path) : f_(path, std::ios::binary) {
        if (!f_) throw IoError("cannot write " + path);
        path_ = path;
    }
    void bytes(const void* p, std::size_t n) {
        f_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
        if (!f_) throw IoError("failed to write " + path_);
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void str(const std::string& s) {
        u64(s.size());
        bytes(s.data(), s.size());
    }
    void floats(const float* p, std::size_t n) { bytes(p, n * sizeof(float)); }

private:
    std::ofstream f_;
    std::string path_;
};

class Reader {
public:
    explicit Reader(const std::string& path) : f_(path, std::ios::binary), path_(path) {
        if (!f_) throw IoError("cannot open " + path);
    }
    void bytes(void* p, std::size_t n) {
        f_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
        if (f_.gcount() != static_cast<std::streamsize>(n))
            throw IoError("truncated checkpoint " + path_);
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        bytes(&v, 4);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        bytes(&v, 8);
        return v;
    }
    std::string str(std::uint64_t max_len = std::uint64_t(1) << 32) {
        const std::uint64_t n = u64();
        if (n > max_len) throw IoError("corrupt checkpoint " + path_);
        std::string s(static_cast<std::size_t>(n), '\0');
        bytes(s.data(), s.size());
        return s;
    }
    void floats(float* p, std::size_t n) { bytes(p, n * sizeof(float)); }
    bool at_end() {
        f_.peek();
        return f_.eof();
    }

private:
    std::ifstream f_;
    std::string path_;
};

}  // namespace

void save_checkpoint(const std::string& path, const MganModel<float>& model,
                     const RunConfig& cfg, int epoch, const std::string& rng_state,
                     const AdamState* adam) {
    Writer w(path);
    w.bytes(kMagic, sizeof(kMagic));
    w.u32(kVersion);
    w.str(serialize_config(cfg));
    w.u32(static_cast<std::uint32_t>(epoch));
    w.str(rng_state);

    const auto& names = model.param_names();
    w.u64(names.size());
    for (const auto& name : names) {
        const Tensor<float>& t = model.param(name);
        w.str(name);
        w.u8(0);  // dtype: f32
        w.u32(static_cast<std::uint32_t>(t.rank()));
        for (std::size_t d = 0; d < t.rank(); ++d)
            w.u64(static_cast<std::uint64_t>(t.dim(d)));
        w.floats(t.data(), static_cast<std::size_t>(t.numel()));
    }

    w.u8(adam ? 1 : 0);
    if (adam) {
        w.u64(static_cast<std::uint64_t>(adam->step));
        for (const auto& name : names) {
            const auto mit = adam->m.find(name);
            const auto vit = adam->v.find(name);
            const std::size_t numel = static_cast<std::size_t>(model.param(name).numel());
            if (mit == adam->m.end() || vit == adam->v.end() || mit->second.size() != numel ||
                vit->second.size() != numel)
                throw IoError("optimizer state does not cover parameter " + name);
            w.floats(mit->second.data(), numel);
            w.floats(vit->second.data(), numel);
        }
    }
}

Checkpoint load_checkpoint(const std::string& path) {
    Reader r(path);
    char magic[8];
    r.bytes(magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw IoError(path + " is not a checkpoint file");
    const std::uint32_t version = r.u32();
    if (version != kVersion)
        throw IoError(path + " uses unsupported checkpoint version " + std::to_string(version));

    Checkpoint ck;
    ck.config = parse_config_text(r.str());
    ck.epoch = static_cast<int>(r.u32());
    ck.rng_state = r.str();

    const std::uint64_t count = r.u64();
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::string name = r.str(4096);
        const std::uint8_t dtype = r.u8();
        if (dtype != 0) throw IoError(path + ": unsupported tensor dtype");
        const std::uint32_t rank = r.u32();
        if (rank > 8) throw IoError("corrupt checkpoint " + path);
        Shape shape(rank);
        for (auto& d : shape) d = static_cast<std::int64_t>(r.u64());
        Tensor<float> t = Tensor<float>::zeros(shape);
        r.floats(t.data(), static_cast<std::size_t>(t.numel()));
        ck.names.push_back(name);
        ck.tensors.push_back(std::move(t));
    }

    ck.has_adam = r.u8() != 0;
    if (ck.has_adam) {
        ck.adam.step = static_cast<std::int64_t>(r.u64());
        for (std::uint64_t i = 0; i < count; ++i) {
            const std::size_t numel = static_cast<std::size_t>(ck.tensors[i].numel());
            std::vector<float> m(numel), v(numel);
            r.floats(m.data(), numel);
            r.floats(v.data(), numel);
            ck.adam.m[ck.names[i]] = std::move(m);
            ck.adam.v[ck.names[i]] = std::move(v);
        }
    }
    if (!r.at_end()) throw IoError(path + " has trailing data");
    return ck;
}

void load_into_model(const Checkpoint& ckpt, MganModel<float>& model) {
    const auto& names = model.param_names();
    if (names.size() != ckpt.names.size())
        throw IoError("checkpoint holds " + std::to_string(ckpt.names.size()) +
                      " tensors but the model has " + std::to_string(names.size()));
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] != ckpt.names[i])
            throw IoError("checkpoint tensor '" + ckpt.names[i] +
                          "' does not match model parameter '" + names[i] + "'");
        Tensor<float>& dst = model.param(names[i]);
        const Tensor<float>& src = ckpt.tensors[i];
        if (dst.shape() != src.shape())
            throw IoError("checkpoint tensor '" + names[i] + "' has shape " +
                          shape_str(src.shape()) + ", expected " + shape_str(dst.shape()));
        std::copy(src.data(), src.data() + src.numel(), dst.data());
    }
}

}  // namespace mgan
