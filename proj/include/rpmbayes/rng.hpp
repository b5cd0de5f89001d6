#pragma once
// Counter-based random number generation with explicit, cheap-to-derive
// streams. Every stochastic result in the library is reproducible from a
// (seed, stream) pair alone, so replicates can run on any number of threads
// in any order without changing output. Generator: SplitMix64 ("splitmix64/v1"),
// one avalanche-mixed starting point per stream.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace rpmbayes {

inline constexpr char kRngName[] = "splitmix64/v1";

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace detail

// Combines substream labels into a single stream index, e.g.
// substream(truth_index, replicate) inside an experiment.
inline constexpr std::uint64_t substream(std::uint64_t a, std::uint64_t b) noexcept {
    return detail::mix64(a * detail::kGolden + b + 1);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept
        : state_(detail::mix64(seed + detail::kGolden * (stream + 1)) ^
                 detail::mix64(stream + detail::kGolden)) {}

    std::uint64_t next_u64() noexcept {
        state_ += detail::kGolden;
        return detail::mix64(state_);
    }

    // Uniform on [0,1), 53-bit resolution.
    double next_double() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0,1]; safe to feed into log().
    double next_open() noexcept { return 1.0 - next_double(); }

private:
    std::uint64_t state_;
};

inline double uniform_sample(double lo, double hi, RngStream& rng) {
    if (!(lo < hi)) throw std::domain_error("uniform_sample requires lo < hi");
    return lo + (hi - lo) * rng.next_double();
}

inline double normal_sample(RngStream& rng) noexcept {
    // Box-Muller, cosine branch only; two uniforms per variate.
    const double u1 = rng.next_open();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// One exact Poisson draw. Knuth multiplication below mean 10, Hormann's
// PTRS transformed rejection above; no normal approximation anywhere.
inline std::int64_t poisson_sample(double mean, RngStream& rng) {
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw std::domain_error("poisson_sample requires a finite mean >= 0");
    if (mean == 0.0) return 0;

    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::int64_t k = 0;
        double prod = rng.next_double();
        while (prod > limit) {
            ++k;
            prod *= rng.next_double();
        }
        return k;
    }

    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_mean = std::log(mean);
    for (;;) {
        const double u = rng.next_double() - 0.5;
        const double v = rng.next_double();
        const double us = 0.5 - std::abs(u);
        const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
        if (kf < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
            kf * log_mean - mean - std::lgamma(kf + 1.0))
            return static_cast<std::int64_t>(kf);
    }
}

// Marsaglia-Tsang; shape < 1 boosted through shape+1.
inline double gamma_sample(double shape, RngStream& rng) {
    if (!(shape > 0.0)) throw std::domain_error("gamma_sample requires shape > 0");
    if (shape < 1.0) {
        const double u = rng.next_open();
        return gamma_sample(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
        const double x = normal_sample(rng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.next_open();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

inline std::vector<double> dirichlet_sample(std::span<const double> alpha, RngStream& rng) {
    if (alpha.empty()) throw std::domain_error("dirichlet_sample requires nonempty alpha");
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma_sample(alpha[i], rng);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

} // namespace rpmbayes
