#pragma once

#include <cstdint>
#include <stdexcept>

namespace rainbow {

// 64-bit finalizer from MurmurHash3 (fmix64). Bijective on uint64_t.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 33;
    z *= 0xFF51AFD7ED558CCDull;
    z ^= z >> 33;
    z *= 0xC4CEB9FE1A85EC53ull;
    z ^= z >> 33;
    return z;
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// Maps (master_seed, trial_index, layer_index) to a stream id by chained
// avalanche mixing. mix64 is a bijection, so for a fixed master seed the
// map is injective in trial_index, and for a fixed trial injective in
// layer_index. The constants are part of the output format: two builds
// with equal inputs must agree bit for bit.
constexpr std::uint64_t derive_stream_id(std::uint64_t master_seed,
                                         std::uint64_t trial_index,
                                         std::uint64_t layer_index) noexcept {
    std::uint64_t h = mix64(master_seed ^ kGoldenGamma);
    h = mix64(h ^ trial_index);
    h = mix64(h ^ layer_index);
    return h;
}

/// Deterministic counter-based generator (splitmix64 core). Unlike the
/// standard-library distributions, every draw method here is specified
/// exactly, so identical (seed, stream_id) pairs reproduce identical
/// sequences on any platform. Single-owner: never shared across workers.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : state_(mix64(mix64(seed) ^ mix64(stream_id ^ kGoldenGamma))),
          stream_id_(stream_id) {}

    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() noexcept {
        std::uint64_t z = (state_ += kGoldenGamma);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Uniform in [0,1), 53 significant bits.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) {
        if (p < 0.0 || p > 1.0) {
            throw std::invalid_argument("bernoulli: probability outside [0,1]");
        }
        return next_double() < p;
    }

    // Uniform in {0, ..., bound-1}, unbiased via bitmask rejection.
    std::uint32_t uniform_int(std::uint32_t bound) {
        if (bound == 0) {
            throw std::invalid_argument("uniform_int: bound must be positive");
        }
        if (bound == 1) return 0;
        std::uint32_t mask = bound - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        for (;;) {
            std::uint32_t r = static_cast<std::uint32_t>(next_u64()) & mask;
            if (r < bound) return r;
        }
    }

private:
    std::uint64_t state_;
    std::uint64_t stream_id_;
};

}  // namespace rainbow
