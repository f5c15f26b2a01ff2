#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>

#include "mgan/errors.hpp"

namespace mgan {

// Seeded generator with portable derived draws. The raw engine is mt19937_64;
// uniform/normal are derived here rather than through std::*_distribution so
// that sequences are identical across standard library implementations.
class Rng {
    std::mt19937_64 engine_;

public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::int64_t uniform_int(std::int64_t n) {
        if (n <= 0) throw ConfigError("uniform_int needs a positive bound");
        const std::uint64_t un = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % un;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::int64_t>(x % un);
    }

    // Standard normal via Box-Muller; two engine draws per value, no cached spare.
    double normal() {
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;        // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    // Textual engine state, exact round trip.
    std::string save_state() const {
        std::ostringstream os;
        os << engine_;
        return os.str();
    }

    void restore_state(const std::string& state) {
        std::istringstream is(state);
        is >> engine_;
        if (is.fail()) throw ConfigError("invalid RNG state string");
    }
};

}  // namespace mgan
