// random.hpp
//
// Counter-based deterministic random numbers. std:: distributions are
// implementation-defined, so the variates used for sweeps and trials are
// generated here to keep output identical across standard libraries.
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace entbound {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Hashes a seed and any number of indices into a stream key.
inline constexpr std::uint64_t stream_key(std::uint64_t seed, std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = splitmix64(seed);
    for (std::uint64_t p : parts) h = splitmix64(h ^ splitmix64(p + 0x632BE59BD9B4E019ULL));
    return h;
}

/// SplitMix64 in counter mode: output i is mix(key + i * golden), so any
/// (key, counter) pair can be reproduced without replaying the stream.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) : key_(key) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ + 0x9E3779B97F4A7C15ULL * counter_++); }

    std::uint64_t counter() const noexcept { return counter_; }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    /// Integer in [0, bound).
    std::uint64_t below(std::uint64_t bound) {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(bound)) % bound;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

    /// Gamma(shape, 1) by Marsaglia-Tsang, with the U^(1/a) boost for a < 1.
    double gamma(double shape) {
        if (shape < 1.0) {
            const double g = gamma(shape + 1.0);
            return g * std::pow(uniform(), 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        while (true) {
            double x = 0.0;
            double v = 0.0;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace entbound
