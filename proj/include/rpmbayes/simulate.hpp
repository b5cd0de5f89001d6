#pragma once
// Scan simulation under the Poisson emission model: each matrix entry (b,t)
// is an independent Poisson draw with mean sum_j g(d_t, M_j) * rate_{b,j}.
// The geometry factor g never enters classification; it exists here only to
// generate realistic count profiles.

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpmbayes/rng.hpp"
#include "rpmbayes/spectrum.hpp"

namespace rpmbayes {

enum class Attenuation {
    Linear,        // g(d,M) = (1-d) * M, defined for d in [0,1]
    InverseSquare, // g(d,M) = M / (1+d)^2
};

inline const char* attenuation_name(Attenuation a) noexcept {
    return a == Attenuation::Linear ? "linear" : "inverse-square";
}

inline Attenuation attenuation_from_name(const std::string& name) {
    if (name == "linear") return Attenuation::Linear;
    if (name == "inverse-square") return Attenuation::InverseSquare;
    throw std::domain_error("unknown attenuation form '" + name + "'");
}

struct GeometryProfile {
    Attenuation attenuation = Attenuation::Linear;
    std::vector<double> distances;

    void validate() const {
        if (distances.empty())
            throw std::domain_error("geometry profile needs at least one distance");
        for (double d : distances) {
            if (!(d >= 0.0))
                throw std::domain_error("geometry profile distances must be nonnegative");
            if (attenuation == Attenuation::Linear && d > 1.0)
                throw std::domain_error("linear attenuation requires distances <= 1");
        }
    }

    double g(double distance, double quantity) const noexcept {
        switch (attenuation) {
        case Attenuation::Linear:
            return (1.0 - distance) * quantity;
        case Attenuation::InverseSquare:
            return quantity / ((1.0 + distance) * (1.0 + distance));
        }
        return 0.0;
    }

    std::size_t steps() const noexcept { return distances.size(); }

    // sum_t g(d_t, 1); the expected-count multiplier for one unit.
    double total_exposure() const noexcept {
        double sum = 0.0;
        for (double d : distances) sum += g(d, 1.0);
        return sum;
    }
};

// The 20-step symmetric drive-through schedule with linear attenuation:
// d = 0.9, 0.8, ..., 0.1, 0, 0, 0.1, ..., 0.9.
inline GeometryProfile default_portal_profile() {
    GeometryProfile profile;
    profile.attenuation = Attenuation::Linear;
    profile.distances.reserve(20);
    for (int i = 9; i >= 1; --i) profile.distances.push_back(i / 10.0);
    profile.distances.push_back(0.0);
    profile.distances.push_back(0.0);
    for (int i = 1; i <= 9; ++i) profile.distances.push_back(i / 10.0);
    return profile;
}

struct ScanMetadata {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::string profile;
    std::string source;
    std::vector<std::string> window_labels;
};

// B x T matrix of radiation counts; rows are energy windows, columns are
// time steps (equivalently, distances).
class ScanMatrix {
public:
    ScanMatrix(std::size_t windows, std::size_t steps)
        : windows_(windows), steps_(steps), counts_(windows * steps, 0) {
        if (windows < 1 || steps < 1)
            throw std::domain_error("scan matrix needs at least one window and one step");
    }

    std::size_t windows() const noexcept { return windows_; }
    std::size_t steps() const noexcept { return steps_; }

    std::int64_t& at(std::size_t b, std::size_t t) { return counts_[b * steps_ + t]; }
    std::int64_t at(std::size_t b, std::size_t t) const { return counts_[b * steps_ + t]; }

    // L_b: pooled counts per window.
    std::vector<std::int64_t> row_sums() const {
        std::vector<std::int64_t> sums(windows_, 0);
        for (std::size_t b = 0; b < windows_; ++b)
            for (std::size_t t = 0; t < steps_; ++t) sums[b] += at(b, t);
        return sums;
    }

    // N_d: total counts per time step.
    std::vector<std::int64_t> column_sums() const {
        std::vector<std::int64_t> sums(steps_, 0);
        for (std::size_t b = 0; b < windows_; ++b)
            for (std::size_t t = 0; t < steps_; ++t) sums[t] += at(b, t);
        return sums;
    }

    std::int64_t total() const {
        return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0});
    }

    friend bool operator==(const ScanMatrix& a, const ScanMatrix& b) {
        return a.windows_ == b.windows_ && a.steps_ == b.steps_ && a.counts_ == b.counts_;
    }

    ScanMetadata meta;

private:
    std::size_t windows_;
    std::size_t steps_;
    std::vector<std::int64_t> counts_;
};

inline ScanMatrix simulate_scan(const MixtureSpec& source, const GeometryProfile& profile,
                                RngStream& rng) {
    profile.validate();
    source.validate();
    const std::size_t windows = source.components.front().material.rates.size();
    ScanMatrix scan(windows, profile.steps());
    for (std::size_t t = 0; t < profile.steps(); ++t) {
        // per-component geometry factors at this distance
        for (std::size_t b = 0; b < windows; ++b) {
            double mean = 0.0;
            for (const auto& c : source.components)
                mean += profile.g(profile.distances[t], c.quantity) * c.material.rates[b];
            scan.at(b, t) = poisson_sample(mean, rng);
        }
    }
    scan.meta.profile = attenuation_name(profile.attenuation);
    return scan;
}

} // namespace rpmbayes
