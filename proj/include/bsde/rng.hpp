#pragma once

#include <cstdint>
#include <cmath>

namespace bsde {

// SplitMix64 — the project-wide pseudo-random generator.
//
// Every randomized artifact (lattices, audit probes) derives its stream from
// a 64-bit seed through this generator, so results are a pure function of
// (seed, configuration) and reproduce bit-identically across runs and worker
// counts. Gaussian draws use the Box-Muller transform with two fresh uniforms
// per call (no cached spare), keeping the stream position independent of the
// call pattern.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in (0, 1]; never returns 0 so log() below is safe.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller: z = sqrt(-2 ln u1) * cos(2 pi u2).
    double next_normal() {
        const double u1 = next_uniform();
        const double u2 = next_uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    double next_normal(double mean, double stddev) {
        return mean + stddev * next_normal();
    }

private:
    std::uint64_t state_;
};

// Derives an independent substream seed, e.g. one stream per path or one per
// named purpose. Two rounds of SplitMix from the combined words.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed ^ (0xD6E8FEB86659FD93ULL * (stream + 1)));
    g.next_u64();
    return g.next_u64();
}

} // namespace bsde
