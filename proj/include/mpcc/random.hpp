#pragma once

#include <cstdint>
#include <random>

#include "mpcc/core_model.hpp"

namespace mpcc {

/// Reproducible generator keyed by (base, stream, substream).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq. The
/// distributions below are hand-written and give the same sequences with
/// every standard library.
class Rng {
public:
    explicit Rng(Seed seed, std::uint64_t substream = 0);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Uniform integer in [0, n), unbiased by rejection.
    std::uint64_t index(std::uint64_t n);

private:
    std::mt19937_64 engine_;
};

}  // namespace mpcc
