#pragma once
// Declarative Monte Carlo studies: simulate every truth class for a fixed
// number of replicates, classify each scan, and tabulate empirical
// assignment probabilities. Replicates draw from per-(truth, replicate)
// RNG streams, so results are byte-identical for any worker count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rpmbayes/benchmark.hpp"
#include "rpmbayes/catalog.hpp"
#include "rpmbayes/classifier.hpp"
#include "rpmbayes/rng.hpp"
#include "rpmbayes/simulate.hpp"

namespace rpmbayes {

enum class PriorsPreset {
    Uniform,
    RareDangerous, // 1e-9 for each dangerous class, remainder split equally
};

inline const char* priors_preset_name(PriorsPreset p) noexcept {
    return p == PriorsPreset::Uniform ? "uniform" : "rare-dangerous";
}

inline PriorsPreset priors_preset_from_name(const std::string& name) {
    if (name == "uniform") return PriorsPreset::Uniform;
    if (name == "rare-dangerous") return PriorsPreset::RareDangerous;
    throw std::domain_error("unknown priors preset '" + name + "'");
}

inline std::vector<double> preset_priors(PriorsPreset preset,
                                         const std::vector<bool>& dangerous) {
    const std::size_t n = dangerous.size();
    std::vector<double> priors(n, 1.0 / static_cast<double>(n));
    if (preset == PriorsPreset::RareDangerous) {
        std::size_t n_dangerous = 0;
        for (bool d : dangerous) n_dangerous += d ? 1 : 0;
        if (n_dangerous == 0 || n_dangerous == n)
            return priors; // preset degenerates to uniform
        const double rest =
            (1.0 - 1e-9 * static_cast<double>(n_dangerous)) / static_cast<double>(n - n_dangerous);
        for (std::size_t k = 0; k < n; ++k) priors[k] = dangerous[k] ? 1e-9 : rest;
    }
    return priors;
}

struct ExperimentConfig {
    std::string name = "custom";
    StudyCatalog catalog;
    std::vector<std::string> truth_labels; // empty = simulate every catalog class
    int replicates = 10000;
    GeometryProfile profile = default_portal_profile();
    PriorsPreset priors = PriorsPreset::Uniform;
    std::uint64_t seed = 20100501;
    std::optional<LossMatrix> loss;
    bool benchmark_screening = false;
    int threads = 1;

    std::vector<TruthClass> truths() const {
        if (truth_labels.empty()) return catalog.classes;
        std::vector<TruthClass> out;
        out.reserve(truth_labels.size());
        for (const auto& label : truth_labels) out.push_back(catalog.at(label));
        return out;
    }

    void validate() const {
        if (catalog.classes.empty())
            throw std::domain_error("experiment needs at least one truth class");
        if (replicates < 1)
            throw std::domain_error("experiment needs at least one replicate");
        if (threads < 1)
            throw std::domain_error("experiment needs at least one thread");
        truths(); // unknown truth labels -> domain error
        profile.validate();
    }

    // Canonical text form; hashed into reports for provenance.
    std::string canonical_description() const {
        std::string s = "name=" + name + ";replicates=" + std::to_string(replicates) +
                        ";profile=" + attenuation_name(profile.attenuation) + ":";
        for (double d : profile.distances) s += std::to_string(d) + ",";
        s += ";priors=" + std::string(priors_preset_name(priors));
        s += ";seed=" + std::to_string(seed);
        s += ";screening=" + std::to_string(benchmark_screening ? 1 : 0);
        s += ";loss=" + std::to_string(loss.has_value() ? 1 : 0);
        for (const auto& c : catalog.classes) {
            s += ";class=" + c.label + (c.dangerous ? ":d" : ":n");
            for (const auto& comp : c.mixture.components)
                s += ":" + comp.material.label + "@" + std::to_string(comp.quantity);
        }
        for (const auto& label : truth_labels) s += ";truth=" + label;
        return s;
    }
};

inline std::uint64_t fnv1a_hash(const std::string& text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

class ConfusionMatrix {
public:
    ConfusionMatrix(std::vector<std::string> truth_labels, std::vector<std::string> assigned_labels,
                    std::vector<bool> truth_dangerous, std::vector<bool> assigned_dangerous,
                    int replicates)
        : truth_labels_(std::move(truth_labels)), assigned_labels_(std::move(assigned_labels)),
          truth_dangerous_(std::move(truth_dangerous)),
          assigned_dangerous_(std::move(assigned_dangerous)), replicates_(replicates),
          counts_(truth_labels_.size() * assigned_labels_.size(), 0) {}

    std::size_t rows() const noexcept { return truth_labels_.size(); }
    std::size_t cols() const noexcept { return assigned_labels_.size(); }
    int replicates() const noexcept { return replicates_; }

    const std::vector<std::string>& truth_labels() const noexcept { return truth_labels_; }
    const std::vector<std::string>& assigned_labels() const noexcept { return assigned_labels_; }
    bool truth_dangerous(std::size_t i) const { return truth_dangerous_.at(i); }
    bool assigned_dangerous(std::size_t j) const { return assigned_dangerous_.at(j); }

    std::int64_t& count(std::size_t i, std::size_t j) { return counts_[i * cols() + j]; }
    std::int64_t count(std::size_t i, std::size_t j) const { return counts_[i * cols() + j]; }

    double probability(std::size_t i, std::size_t j) const {
        return static_cast<double>(count(i, j)) / static_cast<double>(replicates_);
    }

    // Binomial Monte Carlo standard error of the (i,j) cell estimate.
    double standard_error(std::size_t i, std::size_t j) const {
        const double p = probability(i, j);
        return std::sqrt(p * (1.0 - p) / static_cast<double>(replicates_));
    }

    double probability(const std::string& truth, const std::string& assigned) const {
        return probability(truth_index(truth), assigned_index(assigned));
    }

    // Probability a scan of truth class i is assigned to any dangerous class.
    double dangerous_rate(std::size_t i) const {
        double p = 0.0;
        for (std::size_t j = 0; j < cols(); ++j)
            if (assigned_dangerous_[j]) p += probability(i, j);
        return p;
    }

    std::size_t truth_index(const std::string& label) const {
        for (std::size_t i = 0; i < truth_labels_.size(); ++i)
            if (truth_labels_[i] == label) return i;
        throw std::domain_error("unknown truth class '" + label + "'");
    }

    std::size_t assigned_index(const std::string& label) const {
        for (std::size_t j = 0; j < assigned_labels_.size(); ++j)
            if (assigned_labels_[j] == label) return j;
        throw std::domain_error("unknown assigned class '" + label + "'");
    }

    friend bool operator==(const ConfusionMatrix& a, const ConfusionMatrix& b) = default;

private:
    std::vector<std::string> truth_labels_;
    std::vector<std::string> assigned_labels_;
    std::vector<bool> truth_dangerous_;
    std::vector<bool> assigned_dangerous_;
    int replicates_;
    std::vector<std::int64_t> counts_;
};

struct ConfusionResult {
    ConfusionMatrix matrix;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::string config_name;
    std::string priors;
    std::string profile;
    std::vector<std::string> benchmark_labels; // empty unless screening mode
};

inline ClassifierModel experiment_model(const ExperimentConfig& config,
                                        std::vector<std::string>* benchmark_labels = nullptr) {
    const ClassCatalog catalog = config.catalog.class_catalog();
    std::vector<CatalogClass> model_classes;
    if (config.benchmark_screening) {
        const BenchmarkResult picked = select_benchmarks(catalog);
        for (const auto& label : picked.all()) {
            for (const auto& c : catalog.classes())
                if (c.label == label) model_classes.push_back(c);
            if (benchmark_labels) benchmark_labels->push_back(label);
        }
    } else {
        model_classes = catalog.classes();
    }
    std::vector<bool> dangerous;
    dangerous.reserve(model_classes.size());
    for (const auto& c : model_classes) dangerous.push_back(c.dangerous);
    const auto priors = preset_priors(config.priors, dangerous);
    std::vector<ClassEntry> entries;
    entries.reserve(model_classes.size());
    for (std::size_t k = 0; k < model_classes.size(); ++k)
        entries.push_back({model_classes[k].label, model_classes[k].spectrum, priors[k],
                           model_classes[k].dangerous});
    return ClassifierModel(std::move(entries));
}

inline ConfusionResult run_confusion(const ExperimentConfig& config) {
    config.validate();
    ConfusionResult result{
        ConfusionMatrix({}, {}, {}, {}, config.replicates), config.seed,
        fnv1a_hash(config.canonical_description()), config.name,
        priors_preset_name(config.priors), attenuation_name(config.profile.attenuation), {}};

    const ClassifierModel model = experiment_model(config, &result.benchmark_labels);
    const std::vector<TruthClass> truths = config.truths();

    std::vector<std::string> truth_labels, assigned_labels;
    std::vector<bool> truth_dangerous, assigned_dangerous;
    for (const auto& c : truths) {
        truth_labels.push_back(c.label);
        truth_dangerous.push_back(c.dangerous);
    }
    for (const auto& e : model.entries()) {
        assigned_labels.push_back(e.label);
        assigned_dangerous.push_back(e.dangerous);
    }
    ConfusionMatrix matrix(truth_labels, assigned_labels, truth_dangerous, assigned_dangerous,
                           config.replicates);

    const std::size_t n_truth = truths.size();
    const std::size_t total_jobs = n_truth * static_cast<std::size_t>(config.replicates);
    const int n_threads = std::min<int>(config.threads, static_cast<int>(total_jobs));

    // Per-thread tallies merge by addition, so scheduling cannot matter.
    std::vector<std::vector<std::int64_t>> tallies(
        n_threads, std::vector<std::int64_t>(n_truth * model.size(), 0));

    const auto worker = [&](int which) {
        auto& tally = tallies[which];
        for (std::size_t job = which; job < total_jobs; job += n_threads) {
            const std::size_t truth = job / config.replicates;
            const std::size_t replicate = job % config.replicates;
            RngStream rng(config.seed, substream(truth, replicate));
            const ScanMatrix scan = simulate_scan(truths[truth].mixture, config.profile, rng);
            const Decision d = config.loss ? classify_with_loss(model, scan, *config.loss)
                                           : classify(model, scan);
            ++tally[truth * model.size() + d.index];
        }
    };
    if (n_threads == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (int w = 0; w < n_threads; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }

    for (const auto& tally : tallies)
        for (std::size_t i = 0; i < n_truth; ++i)
            for (std::size_t j = 0; j < model.size(); ++j)
                matrix.count(i, j) += tally[i * model.size() + j];

    result.matrix = std::move(matrix);
    return result;
}

// Summary statistics over a sample of values.
struct SampleStats {
    double mean = 0.0;
    double median = 0.0;
    double sd = 0.0;
    double mad = 0.0; // median absolute deviation
    std::size_t n = 0;
};

inline SampleStats sample_stats(std::vector<double> values) {
    SampleStats s;
    s.n = values.size();
    if (values.empty()) return s;
    for (double v : values) s.mean += v;
    s.mean /= static_cast<double>(values.size());
    for (double v : values) s.sd += (v - s.mean) * (v - s.mean);
    s.sd = values.size() > 1 ? std::sqrt(s.sd / static_cast<double>(values.size() - 1)) : 0.0;
    std::sort(values.begin(), values.end());
    const auto median_of = [](const std::vector<double>& sorted) {
        const std::size_t n = sorted.size();
        return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    };
    s.median = median_of(values);
    std::vector<double> dev(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) dev[i] = std::abs(values[i] - s.median);
    std::sort(dev.begin(), dev.end());
    s.mad = median_of(dev);
    return s;
}

struct ScreeningStudyResult {
    int sets = 0;
    int replicates = 0;
    std::uint64_t seed = 0;
    SampleStats benchmark_counts;                // per generated catalog
    SampleStats dangerous_miss_rates;            // per dangerous class, pooled
    SampleStats nondangerous_false_alarm_rates;  // per nondangerous class, pooled
    std::vector<int> benchmark_count_by_set;
};

// Generates `sets` random catalogs, selects benchmarks in each, and screens
// every class of the catalog through its benchmark model.
inline ScreeningStudyResult run_screening_study(const RandomCatalogSpec& spec, int sets,
                                                int replicates, int threads = 1) {
    if (sets < 1) throw std::domain_error("screening study needs at least one set");
    if (replicates < 1) throw std::domain_error("screening study needs replicates");
    ScreeningStudyResult out;
    out.sets = sets;
    out.replicates = replicates;
    out.seed = spec.seed;

    std::vector<double> bench_counts;
    std::vector<double> miss, false_alarm;
    for (int set = 0; set < sets; ++set) {
        ExperimentConfig config;
        config.name = "screening-set-" + std::to_string(set);
        config.catalog = generate_random_catalog(spec, static_cast<std::uint64_t>(set));
        config.replicates = replicates;
        config.priors = PriorsPreset::Uniform;
        config.seed = RngStream(spec.seed, substream(0x5eedu, set)).next_u64();
        config.benchmark_screening = true;
        config.threads = threads;
        const ConfusionResult run = run_confusion(config);
        bench_counts.push_back(static_cast<double>(run.benchmark_labels.size()));
        out.benchmark_count_by_set.push_back(static_cast<int>(run.benchmark_labels.size()));
        for (std::size_t i = 0; i < run.matrix.rows(); ++i) {
            const double dangerous_rate = run.matrix.dangerous_rate(i);
            if (run.matrix.truth_dangerous(i))
                miss.push_back(1.0 - dangerous_rate);
            else
                false_alarm.push_back(dangerous_rate);
        }
    }
    out.benchmark_counts = sample_stats(std::move(bench_counts));
    out.dangerous_miss_rates = sample_stats(std::move(miss));
    out.nondangerous_false_alarm_rates = sample_stats(std::move(false_alarm));
    return out;
}

} // namespace rpmbayes
