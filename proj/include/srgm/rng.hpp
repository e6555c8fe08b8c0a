#pragma once

// Counter-based random source. Output i of a generator keyed by k is
// splitmix64(k + (i+1) * golden), so a stream is fully determined by its key
// and reproducible on every platform. `split` derives independent keys.

#include <cmath>
#include <cstdint>

namespace srgm {

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + kGolden))) {}

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z += kGolden;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() noexcept { return mix(key_ + kGolden * ++counter_); }

    /// Uniform on the open interval (0, 1).
    double uniform() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Log-uniform on [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) noexcept {
        return std::exp(uniform(std::log(lo), std::log(hi)));
    }

    /// Standard exponential.
    double exponential() noexcept { return -std::log(uniform()); }

    CounterRng split(std::uint64_t stream) const noexcept { return CounterRng(key_, stream + 1); }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace srgm
