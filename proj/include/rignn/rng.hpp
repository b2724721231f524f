#pragma once

#include <cstdint>

// Portable RNG: xoshiro256** seeded through splitmix64. Identical streams
// on every platform, which std::mt19937 + distributions do not guarantee.
namespace rignn {

class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            // splitmix64
            x += 0x9E3779B97F4A7C15ull;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            word = z ^ (z >> 31);
        }
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

    // uniform in [0, 1)
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [0, bound) without modulo bias
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = -bound % bound;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % bound;
        }
    }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // derived stream for per-item parallel determinism
    Rng fork(std::uint64_t stream) const {
        Rng child(0);
        child.state_[0] = state_[0] ^ (0x9E3779B97F4A7C15ull * (stream + 1));
        child.state_[1] = state_[1] + stream;
        child.state_[2] = state_[2] ^ stream;
        child.state_[3] = state_[3] + (stream << 32 | 1);
        child.next_u64();
        child.next_u64();
        return child;
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }
    std::uint64_t state_[4];
};

}  // namespace rignn
