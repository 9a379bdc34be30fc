#pragma once

#include <cmath>
#include <cstdint>

namespace ilidar {

// Counter-based random stream built on the splitmix64 finalizer
// (Steele, Lea, Flood 2014). Output i of a stream with key k is
// mix(k + i * GOLDEN), so any position can be generated without
// sequencing and the same (seed, stream) reproduces on every platform.
namespace rng_detail {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

}  // namespace rng_detail

// Derives a child stream key from a parent seed and up to two indices.
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t a,
                                   std::uint64_t b = 0) {
    using namespace rng_detail;
    std::uint64_t k = mix64(seed + kGolden);
    k = mix64(k ^ (a + kGolden));
    k = mix64(k ^ (b + kGolden));
    return k;
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() {
        using namespace rng_detail;
        return mix64(key_ + (counter_++) * kGolden);
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    // Inclusive integer range.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(next_u64() % span);
    }

    // Box-Muller; consumes two uniforms per call, no cached spare so the
    // stream position is a pure function of the call count.
    double gaussian(double mean, double sigma) {
        double u1 = next_double();
        double u2 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * M_PI * u2);
    }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace ilidar
