#pragma once
// Greedy selection of benchmark classes for dangerous/nondangerous
// screening. The driver is asymptotic: a class missing from the model is
// assigned to the KL-nearest class that is in the model, so a side's
// benchmarks must stay KL-closer to every unselected member of that side
// than the other side's benchmarks are.
//
// Seeding takes the symmetrized-KL-nearest dangerous/nondangerous pair; each
// iteration then adds, per side, the misclassification-risk class nearest to
// the opposing benchmarks. All ties break lexicographically by label so runs
// are deterministic.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpmbayes/classifier.hpp"
#include "rpmbayes/spectrum.hpp"

namespace rpmbayes {

struct CatalogClass {
    std::string label;
    EnergySpectrum spectrum;
    bool dangerous = false;
};

class ClassCatalog {
public:
    explicit ClassCatalog(std::vector<CatalogClass> classes) : classes_(std::move(classes)) {
        bool any_dangerous = false, any_safe = false;
        for (const auto& c : classes_) {
            if (!c.spectrum.strictly_positive())
                throw std::domain_error("catalog class '" + c.label +
                                        "' spectrum must be strictly positive");
            (c.dangerous ? any_dangerous : any_safe) = true;
        }
        if (!any_dangerous || !any_safe)
            throw std::domain_error("catalog needs both dangerous and nondangerous classes");
        for (std::size_t i = 0; i < classes_.size(); ++i)
            for (std::size_t j = i + 1; j < classes_.size(); ++j) {
                if (classes_[i].label == classes_[j].label)
                    throw std::domain_error("duplicate catalog label '" + classes_[i].label + "'");
                if (classes_[i].spectrum == classes_[j].spectrum)
                    throw std::domain_error("catalog classes '" + classes_[i].label + "' and '" +
                                            classes_[j].label + "' share a spectrum");
            }
    }

    const std::vector<CatalogClass>& classes() const noexcept { return classes_; }
    std::size_t size() const noexcept { return classes_.size(); }

    std::vector<std::size_t> side(bool dangerous) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (classes_[i].dangerous == dangerous) out.push_back(i);
        return out;
    }

private:
    std::vector<CatalogClass> classes_;
};

inline double kl_to_set(const EnergySpectrum& p, std::span<const EnergySpectrum> set) {
    if (set.empty())
        throw std::domain_error("kl_to_set requires a nonempty set");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : set) best = std::min(best, kl_divergence(p, q));
    return best;
}

struct SelectionStep {
    int iteration = 0;
    std::vector<std::string> at_risk_dangerous;     // AD_{i+1}
    std::vector<std::string> at_risk_nondangerous;  // AND_{i+1}
    std::string added_dangerous;                    // empty if none
    std::string added_nondangerous;
};

struct BenchmarkResult {
    std::vector<std::string> dangerous;     // D*
    std::vector<std::string> nondangerous;  // ND*
    std::vector<SelectionStep> steps;

    std::vector<std::string> all() const {
        std::vector<std::string> out = dangerous;
        out.insert(out.end(), nondangerous.begin(), nondangerous.end());
        return out;
    }
};

namespace detail {

struct SelectionState {
    const ClassCatalog* catalog;
    std::vector<std::size_t> dangerous_all;
    std::vector<std::size_t> nondangerous_all;
    std::vector<std::size_t> selected_d;
    std::vector<std::size_t> selected_nd;

    double dist(std::size_t from, const std::vector<std::size_t>& to) const {
        double best = std::numeric_limits<double>::infinity();
        const auto& cs = catalog->classes();
        for (std::size_t j : to)
            best = std::min(best, kl_divergence(cs[from].spectrum, cs[j].spectrum));
        return best;
    }

    bool selected(std::size_t i) const {
        return std::find(selected_d.begin(), selected_d.end(), i) != selected_d.end() ||
               std::find(selected_nd.begin(), selected_nd.end(), i) != selected_nd.end();
    }
};

} // namespace detail

inline BenchmarkResult select_benchmarks(const ClassCatalog& catalog) {
    detail::SelectionState st{&catalog, catalog.side(true), catalog.side(false), {}, {}};
    const auto& cs = catalog.classes();

    // seed: symmetrized-KL-nearest dangerous/nondangerous pair,
    // lexicographically smallest label pair on ties
    double best = std::numeric_limits<double>::infinity();
    std::size_t seed_d = st.dangerous_all.front();
    std::size_t seed_nd = st.nondangerous_all.front();
    for (std::size_t i : st.dangerous_all)
        for (std::size_t j : st.nondangerous_all) {
            const double v = symmetrized_kl(cs[i].spectrum, cs[j].spectrum);
            const bool better =
                v < best ||
                (v == best && std::pair(cs[i].label, cs[j].label) <
                                  std::pair(cs[seed_d].label, cs[seed_nd].label));
            if (better) {
                best = v;
                seed_d = i;
                seed_nd = j;
            }
        }
    st.selected_d.push_back(seed_d);
    st.selected_nd.push_back(seed_nd);

    BenchmarkResult result;
    const auto at_risk = [&](const std::vector<std::size_t>& all,
                             const std::vector<std::size_t>& own,
                             const std::vector<std::size_t>& foe) {
        std::vector<std::size_t> out;
        for (std::size_t i : all)
            if (!st.selected(i) && st.dist(i, own) - st.dist(i, foe) > 0.0) out.push_back(i);
        return out;
    };
    const auto pick = [&](const std::vector<std::size_t>& candidates,
                          const std::vector<std::size_t>& foe) {
        std::size_t best_i = candidates.front();
        double best_v = st.dist(best_i, foe);
        for (std::size_t i : candidates) {
            const double v = st.dist(i, foe);
            if (v < best_v || (v == best_v && cs[i].label < cs[best_i].label)) {
                best_v = v;
                best_i = i;
            }
        }
        return best_i;
    };

    const int max_iterations = static_cast<int>(catalog.size());
    for (int iteration = 1; iteration <= max_iterations; ++iteration) {
        const auto ad = at_risk(st.dangerous_all, st.selected_d, st.selected_nd);
        const auto and_ = at_risk(st.nondangerous_all, st.selected_nd, st.selected_d);
        if (ad.empty() && and_.empty()) break;

        SelectionStep step;
        step.iteration = iteration;
        for (std::size_t i : ad) step.at_risk_dangerous.push_back(cs[i].label);
        for (std::size_t i : and_) step.at_risk_nondangerous.push_back(cs[i].label);

        // both additions are evaluated against the sets as of this iteration
        const std::vector<std::size_t> d_before = st.selected_d;
        if (!ad.empty()) {
            const std::size_t k = pick(ad, st.selected_nd);
            st.selected_d.push_back(k);
            step.added_dangerous = cs[k].label;
        }
        if (!and_.empty()) {
            const std::size_t k = pick(and_, d_before);
            st.selected_nd.push_back(k);
            step.added_nondangerous = cs[k].label;
        }
        result.steps.push_back(std::move(step));
    }

    for (std::size_t i : st.selected_d) result.dangerous.push_back(cs[i].label);
    for (std::size_t i : st.selected_nd) result.nondangerous.push_back(cs[i].label);
    return result;
}

// Re-checks the termination condition on the returned sets; used by tests
// and by callers that load stored results.
inline bool termination_certificate(const ClassCatalog& catalog, const BenchmarkResult& result) {
    detail::SelectionState st{&catalog, catalog.side(true), catalog.side(false), {}, {}};
    const auto& cs = catalog.classes();
    const auto index_of = [&](const std::string& label) {
        for (std::size_t i = 0; i < cs.size(); ++i)
            if (cs[i].label == label) return i;
        throw std::domain_error("benchmark label '" + label + "' not in catalog");
    };
    for (const auto& l : result.dangerous) st.selected_d.push_back(index_of(l));
    for (const auto& l : result.nondangerous) st.selected_nd.push_back(index_of(l));
    for (std::size_t i : st.dangerous_all)
        if (!st.selected(i) && st.dist(i, st.selected_d) > st.dist(i, st.selected_nd))
            return false;
    for (std::size_t i : st.nondangerous_all)
        if (!st.selected(i) && st.dist(i, st.selected_nd) > st.dist(i, st.selected_d))
            return false;
    return true;
}

// Classifier over the benchmark classes only, uniform priors.
inline ClassifierModel benchmark_model(const ClassCatalog& catalog,
                                       const BenchmarkResult& result) {
    std::vector<ClassEntry> entries;
    const auto add = [&](const std::string& label) {
        for (const auto& c : catalog.classes())
            if (c.label == label) {
                entries.push_back({c.label, c.spectrum, 1.0, c.dangerous});
                return;
            }
        throw std::domain_error("benchmark label '" + label + "' not in catalog");
    };
    for (const auto& l : result.dangerous) add(l);
    for (const auto& l : result.nondangerous) add(l);
    for (auto& e : entries) e.prior = 1.0 / static_cast<double>(entries.size());
    return ClassifierModel(std::move(entries));
}

// Dangerous/nondangerous verdict: the flag of the winning benchmark class.
inline bool screen(const ClassifierModel& benchmarks, const ScanMatrix& scan) {
    const Decision d = classify(benchmarks, scan);
    return benchmarks.entry(d.index).dangerous;
}

} // namespace rpmbayes
