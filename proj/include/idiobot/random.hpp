#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace idiobot {

/// Seeded generator whose derived draws are bit-identical across platforms.
/// The standard distributions are implementation-defined, so the uniform and
/// index draws are built directly from the engine output.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform index in [0, n). n must be positive.
    std::size_t index(std::size_t n) {
        auto k = static_cast<std::size_t>(uniform() * static_cast<double>(n));
        return k < n ? k : n - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace idiobot
