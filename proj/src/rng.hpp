#pragma once

#include <cmath>
#include <cstdint>

namespace boostq {

// Counter-based generator (SplitMix64 output function over a Weyl sequence).
// Streams are keyed by (seed, stream id), so every random stream in a run is
// reproducible independently of how many draws other streams consumed.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix(seed + 0x9E3779B97F4A7C15ULL * (stream + 1))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    // uniform on [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1); safe as a log/quantile argument
    double uniform_open() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) { return -std::log(uniform_open()) / rate; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform_open()));
        double a = 6.283185307179586476925286766559 * uniform();
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ULL;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Stream ids used by the simulator; keep stable so traces are reproducible.
namespace stream {
inline constexpr std::uint64_t arrivals = 1;
inline constexpr std::uint64_t sizes = 2;
inline constexpr std::uint64_t noise = 3;
inline constexpr std::uint64_t scratch = 100;
} // namespace stream

} // namespace boostq
