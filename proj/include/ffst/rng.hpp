// rng.hpp — SplitMix64 stream generator for reproducible disorder ensembles
//
// Every ensemble draw is a pure function of (seed, stream): the generator
// state is initialized by mixing the stream index into the seed, and each
// subsequent output is one SplitMix64 step. Pure 64-bit integer arithmetic,
// so sequences are identical on every platform. The stream index is the
// disorder realization index.

#pragma once

#include <cstdint>
#include <cmath>

namespace ffst {

class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(seed + 0x9E3779B97F4A7C15ull * (stream + 1))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix(state_);
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in [-1, 1).
    double uniform_symmetric() {
        return 2.0 * uniform01() - 1.0;
    }

    // Standard normal via Box-Muller. Always consumes exactly two uniforms
    // and discards the sine branch, so draw counts stay call-pattern independent.
    double gaussian() {
        double u1 = uniform01();
        double u2 = uniform01();
        if (u1 < 0x1.0p-60) u1 = 0x1.0p-60;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

} // namespace ffst
