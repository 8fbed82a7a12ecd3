#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>

namespace sncf {

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator, so the
/// <random> distributions can draw from it directly.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed = 0) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Independent child stream. Does not advance this generator.
    [[nodiscard]] Rng split(std::uint64_t stream) const noexcept {
        return Rng(mix(state_ ^ mix(stream + 0xD1B54A32D192ED03ULL)));
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(*this); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(*this); }
    double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(*this); }
    double beta(double a, double b) {
        const double x = gamma(a);
        const double y = gamma(b);
        return x / (x + y);
    }
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(*this);
    }
    template <class It>
    void shuffle(It first, It last) {
        std::shuffle(first, last, *this);
    }

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

}  // namespace sncf
