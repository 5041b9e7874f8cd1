#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace crowdhub {

// Thin wrapper over mt19937_64. The conversions below are written out instead of
// using <random> distributions so that streams are identical across standard
// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling removes modulo bias.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    // Index drawn proportionally to non-negative weights. Returns weights.size()
    // when every weight is zero.
    std::size_t weighted(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) return weights.size();
        const double u = uniform() * total;
        double acc = 0.0;
        std::size_t last = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last = i;
            if (u < acc) return i;
        }
        return last;
    }

    // Knuth for small means, normal approximation (rounded, clamped) above 64.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean < 64.0) {
            const double limit = std::exp(-mean);
            std::uint64_t k = 0;
            double p = uniform();
            while (p > limit) {
                ++k;
                p *= uniform();
            }
            return k;
        }
        const double g = gaussian();
        const double x = std::round(mean + std::sqrt(mean) * g);
        return x < 0.0 ? 0 : static_cast<std::uint64_t>(x);
    }

    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

private:
    std::mt19937_64 engine_;
};

// Independent stream seed for (base, stream): two splitmix64 rounds.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(base) ^ stream);
}

// Cumulative table for repeated categorical draws (binary search per draw).
class CategoricalSampler {
public:
    explicit CategoricalSampler(std::span<const double> weights) : cumulative_(weights.size()) {
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i] > 0.0 ? weights[i] : 0.0;
            cumulative_[i] = acc;
        }
    }

    bool empty() const { return cumulative_.empty() || !(cumulative_.back() > 0.0); }

    std::size_t draw(Rng& rng) const {
        const double u = rng.uniform() * cumulative_.back();
        std::size_t lo = 0, hi = cumulative_.size() - 1;
        while (lo < hi) {
            const std::size_t mid = (lo + hi) / 2;
            if (u < cumulative_[mid]) hi = mid;
            else lo = mid + 1;
        }
        return lo;
    }

private:
    std::vector<double> cumulative_;
};

}  // namespace crowdhub
