#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace causalfront {

// Splittable PRNG: xoshiro256** streams derived from a root key via splitmix64.
// Disjoint roles (parent draws, operator choice, operator internals, ...) get
// their own child stream so that adding consumers in one role never shifts the
// sequence seen by another.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : key_(seed) {
        std::uint64_t x = seed;
        for (auto& w : state_) w = splitmix64(x);
    }

    // Derive an independent stream; deterministic in (key of this stream, tag).
    RngStream child(std::uint64_t tag) const {
        return RngStream(mix(key_, tag));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform double in [0,1), 53 bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n); n >= 1.
    int uniform_int(int n) {
        return static_cast<int>(static_cast<std::uint64_t>(
            uniform() * static_cast<double>(n)));
    }

    // Zero-mean Gaussian via Box-Muller (one sample per call, second discarded).
    double normal(double sigma) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return sigma * r * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t key() const { return key_; }

private:
    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        std::uint64_t x = a ^ (0x9E3779B97F4A7C15ull + b);
        std::uint64_t z = splitmix64(x);
        return z ^ splitmix64(x);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
    std::uint64_t key_;
};

}  // namespace causalfront
