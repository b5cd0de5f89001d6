#pragma once
// Energy-spectrum algebra. An EnergySpectrum is a point on the B-window
// probability simplex; a MaterialClass carries per-window emission rates for
// one unit of material at zero distance. Mixing is noninterfering: rates add
// component-wise, and any common geometry factor cancels on normalization.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rpmbayes {

inline constexpr double kSimplexTolerance = 1e-12;

class EnergySpectrum {
public:
    explicit EnergySpectrum(std::vector<double> probs) : probs_(std::move(probs)) {
        if (probs_.size() < 2)
            throw std::domain_error("spectrum needs at least 2 windows");
        double sum = 0.0;
        for (double p : probs_) {
            if (!(p >= 0.0) || p > 1.0)
                throw std::domain_error("spectrum entries must lie in [0,1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > kSimplexTolerance)
            throw std::domain_error("spectrum must sum to 1");
    }

    std::size_t windows() const noexcept { return probs_.size(); }
    double operator[](std::size_t b) const noexcept { return probs_[b]; }
    const std::vector<double>& probs() const noexcept { return probs_; }

    bool strictly_positive() const noexcept {
        for (double p : probs_)
            if (p <= 0.0) return false;
        return true;
    }

    // Floors every window at eps and renormalizes; used to make spectra
    // admissible for log-likelihood scoring. Off by default everywhere.
    EnergySpectrum floored(double eps = 1e-12) const {
        std::vector<double> v = probs_;
        double sum = 0.0;
        for (double& p : v) {
            if (p < eps) p = eps;
            sum += p;
        }
        for (double& p : v) p /= sum;
        return EnergySpectrum(std::move(v));
    }

    friend bool operator==(const EnergySpectrum& a, const EnergySpectrum& b) = default;

private:
    std::vector<double> probs_;
};

struct MaterialClass {
    std::string label;
    std::vector<double> rates;   // counts per unit quantity per time step, d = 0
    bool dangerous = false;

    double total_rate() const noexcept {
        double sum = 0.0;
        for (double r : rates) sum += r;
        return sum;
    }

    void validate() const {
        if (rates.size() < 2)
            throw std::domain_error("material '" + label + "' needs at least 2 windows");
        for (double r : rates)
            if (!(r >= 0.0) || !std::isfinite(r))
                throw std::domain_error("material '" + label + "' has a negative or non-finite rate");
        if (!(total_rate() > 0.0))
            throw std::domain_error("material '" + label + "' has zero total rate");
    }
};

struct MixtureComponent {
    MaterialClass material;
    double quantity = 0.0;
};

// Noninterfering mixture: quantities scale each component's rates.
struct MixtureSpec {
    std::vector<MixtureComponent> components;

    void validate() const {
        if (components.empty())
            throw std::domain_error("mixture needs at least one component");
        bool any = false;
        std::size_t windows = components.front().material.rates.size();
        for (const auto& c : components) {
            c.material.validate();
            if (!(c.quantity >= 0.0))
                throw std::domain_error("mixture quantities must be nonnegative");
            if (c.material.rates.size() != windows)
                throw std::domain_error("mixture components disagree on window count");
            if (c.quantity > 0.0) any = true;
        }
        if (!any)
            throw std::domain_error("mixture needs a component with positive quantity");
    }

    // Combined per-window rates at unit geometry factor.
    std::vector<double> combined_rates() const {
        validate();
        std::vector<double> rates(components.front().material.rates.size(), 0.0);
        for (const auto& c : components)
            for (std::size_t b = 0; b < rates.size(); ++b)
                rates[b] += c.quantity * c.material.rates[b];
        return rates;
    }
};

inline EnergySpectrum normalize(std::span<const double> rates) {
    if (rates.size() < 2)
        throw std::domain_error("normalize needs at least 2 windows");
    double sum = 0.0;
    for (double r : rates) {
        if (!(r >= 0.0))
            throw std::domain_error("normalize requires nonnegative rates");
        sum += r;
    }
    if (!(sum > 0.0))
        throw std::domain_error("normalize requires a positive total rate");
    std::vector<double> probs(rates.size());
    for (std::size_t b = 0; b < rates.size(); ++b) probs[b] = rates[b] / sum;
    return EnergySpectrum(std::move(probs));
}

inline EnergySpectrum normalize(const std::vector<double>& rates) {
    return normalize(std::span<const double>(rates));
}

inline EnergySpectrum spectrum_of(const MaterialClass& material) {
    material.validate();
    return normalize(material.rates);
}

inline EnergySpectrum mix(const MixtureSpec& mixture) {
    return normalize(mixture.combined_rates());
}

// Kullback-Leibler divergence sum_b p_b log(p_b/q_b), with 0 log 0 := 0.
// Returns +infinity when q has a zero window where p does not.
inline double kl_divergence(const EnergySpectrum& p, const EnergySpectrum& q) {
    if (p.windows() != q.windows())
        throw std::domain_error("kl_divergence requires equal window counts");
    double sum = 0.0;
    for (std::size_t b = 0; b < p.windows(); ++b) {
        if (p[b] == 0.0) continue;
        if (q[b] == 0.0) return std::numeric_limits<double>::infinity();
        sum += p[b] * std::log(p[b] / q[b]);
    }
    return sum < 0.0 ? 0.0 : sum;   // clamp float residue on p == q
}

inline double symmetrized_kl(const EnergySpectrum& p, const EnergySpectrum& q) {
    return kl_divergence(p, q) + kl_divergence(q, p);
}

// Quantity M with M * rates[0] at the requested first-window rate.
inline double solve_quantity(const MaterialClass& material, double target_first_window_rate) {
    material.validate();
    if (!(target_first_window_rate > 0.0))
        throw std::domain_error("solve_quantity requires a positive target rate");
    if (!(material.rates[0] > 0.0))
        throw std::domain_error("material '" + material.label + "' has zero first-window rate");
    return target_first_window_rate / material.rates[0];
}

} // namespace rpmbayes
