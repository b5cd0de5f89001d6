#pragma once
// Dirichlet-conjugate spectrum estimation from labeled scans. Counts pool
// additively across scans and distances, so batch and sequential updates
// agree exactly.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpmbayes/simulate.hpp"
#include "rpmbayes/spectrum.hpp"

namespace rpmbayes {

struct DirichletPrior {
    std::vector<double> theta;

    void validate() const {
        if (theta.size() < 2)
            throw std::domain_error("Dirichlet prior needs at least 2 windows");
        for (double t : theta)
            if (!(t > 0.0))
                throw std::domain_error("Dirichlet parameters must be positive");
    }

    static DirichletPrior uniform(std::size_t windows) {
        return DirichletPrior{std::vector<double>(windows, 1.0)};
    }

    // Prior (or posterior) mean spectrum theta / sum(theta).
    EnergySpectrum mean() const {
        validate();
        return normalize(theta);
    }
};

struct TrainingSet {
    std::string label;
    std::vector<ScanMatrix> scans;

    void validate(std::size_t windows) const {
        for (const auto& scan : scans)
            if (scan.windows() != windows)
                throw std::domain_error("training scan window count mismatch for '" + label + "'");
    }

    // Pooled counts per window over all scans and time steps.
    std::vector<std::int64_t> pooled_counts(std::size_t windows) const {
        validate(windows);
        std::vector<std::int64_t> pooled(windows, 0);
        for (const auto& scan : scans) {
            const auto sums = scan.row_sums();
            for (std::size_t b = 0; b < windows; ++b) pooled[b] += sums[b];
        }
        return pooled;
    }
};

// Full conjugate update: theta'_b = theta_b + pooled counts.
inline DirichletPrior posterior_parameters(const DirichletPrior& prior, const TrainingSet& data) {
    prior.validate();
    const auto pooled = data.pooled_counts(prior.theta.size());
    DirichletPrior out = prior;
    for (std::size_t b = 0; b < pooled.size(); ++b)
        out.theta[b] += static_cast<double>(pooled[b]);
    return out;
}

// Posterior-mean spectrum estimate; strictly positive by construction.
inline EnergySpectrum posterior_spectrum(const DirichletPrior& prior, const TrainingSet& data) {
    return posterior_parameters(prior, data).mean();
}

} // namespace rpmbayes
