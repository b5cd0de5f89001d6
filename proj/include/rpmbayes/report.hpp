#pragma once
// Report rendering: confusion matrices and screening-study summaries as
// JSON (machine use, schema under docs/) and as aligned text tables. Counts
// are serialized exactly; probabilities are derived values.

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "rpmbayes/error.hpp"
#include "rpmbayes/experiment.hpp"
#include "rpmbayes/rng.hpp"

namespace rpmbayes {

inline std::string hash_hex(std::uint64_t h) {
    std::ostringstream os;
    os << "0x" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline nlohmann::json confusion_to_json(const ConfusionResult& result) {
    const ConfusionMatrix& m = result.matrix;
    nlohmann::json j;
    j["kind"] = "confusion";
    j["config"] = {
        {"name", result.config_name},   {"seed", result.seed},
        {"hash", hash_hex(result.config_hash)}, {"priors", result.priors},
        {"profile", result.profile},    {"replicates", m.replicates()},
        {"rng", kRngName},
    };
    if (!result.benchmark_labels.empty()) j["benchmarks"] = result.benchmark_labels;
    auto classes = [](const auto& labels, const auto& flag_of) {
        nlohmann::json arr = nlohmann::json::array();
        for (std::size_t i = 0; i < labels.size(); ++i)
            arr.push_back({{"label", labels[i]}, {"dangerous", flag_of(i)}});
        return arr;
    };
    j["truth_classes"] =
        classes(m.truth_labels(), [&](std::size_t i) { return m.truth_dangerous(i); });
    j["assigned_classes"] =
        classes(m.assigned_labels(), [&](std::size_t i) { return m.assigned_dangerous(i); });
    nlohmann::json counts = nlohmann::json::array();
    nlohmann::json probs = nlohmann::json::array();
    nlohmann::json errs = nlohmann::json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        nlohmann::json crow = nlohmann::json::array();
        nlohmann::json prow = nlohmann::json::array();
        nlohmann::json erow = nlohmann::json::array();
        for (std::size_t k = 0; k < m.cols(); ++k) {
            crow.push_back(m.count(i, k));
            prow.push_back(m.probability(i, k));
            erow.push_back(m.standard_error(i, k));
        }
        counts.push_back(std::move(crow));
        probs.push_back(std::move(prow));
        errs.push_back(std::move(erow));
    }
    j["counts"] = std::move(counts);
    j["probabilities"] = std::move(probs);
    j["standard_errors"] = std::move(errs);
    return j;
}

inline ConfusionResult confusion_from_json(const nlohmann::json& j) {
    if (j.value("kind", "") != "confusion") throw ParseError("not a confusion report");
    const auto& cfg = j.at("config");
    std::vector<std::string> truth_labels, assigned_labels;
    std::vector<bool> truth_dangerous, assigned_dangerous;
    for (const auto& c : j.at("truth_classes")) {
        truth_labels.push_back(c.at("label").get<std::string>());
        truth_dangerous.push_back(c.at("dangerous").get<bool>());
    }
    for (const auto& c : j.at("assigned_classes")) {
        assigned_labels.push_back(c.at("label").get<std::string>());
        assigned_dangerous.push_back(c.at("dangerous").get<bool>());
    }
    ConfusionMatrix m(truth_labels, assigned_labels, truth_dangerous, assigned_dangerous,
                      cfg.at("replicates").get<int>());
    const auto& counts = j.at("counts");
    if (counts.size() != m.rows()) throw ParseError("counts row count mismatch");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (counts[i].size() != m.cols()) throw ParseError("counts column count mismatch");
        for (std::size_t k = 0; k < m.cols(); ++k)
            m.count(i, k) = counts[i][k].get<std::int64_t>();
    }
    ConfusionResult result{std::move(m),
                           cfg.at("seed").get<std::uint64_t>(),
                           std::stoull(cfg.at("hash").get<std::string>(), nullptr, 16),
                           cfg.at("name").get<std::string>(),
                           cfg.at("priors").get<std::string>(),
                           cfg.at("profile").get<std::string>(),
                           {}};
    if (j.contains("benchmarks"))
        result.benchmark_labels = j.at("benchmarks").get<std::vector<std::string>>();
    return result;
}

inline std::string confusion_to_text(const ConfusionResult& result) {
    const ConfusionMatrix& m = result.matrix;
    std::size_t label_width = 10;
    for (const auto& l : m.truth_labels()) label_width = std::max(label_width, l.size());
    std::ostringstream os;
    os << "# " << result.config_name << "  seed=" << result.seed
       << "  replicates=" << m.replicates() << "  priors=" << result.priors
       << "  profile=" << result.profile << "  hash=" << hash_hex(result.config_hash) << "\n";
    if (!result.benchmark_labels.empty()) {
        os << "# benchmarks:";
        for (const auto& b : result.benchmark_labels) os << " [" << b << "]";
        os << "\n";
    }
    os << std::left << std::setw(static_cast<int>(label_width) + 2) << "true\\assigned";
    for (const auto& l : m.assigned_labels())
        os << std::right << std::setw(std::max<int>(8, static_cast<int>(l.size()) + 2)) << l;
    os << "\n";
    os << std::fixed << std::setprecision(4);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << std::left << std::setw(static_cast<int>(label_width) + 2) << m.truth_labels()[i];
        for (std::size_t k = 0; k < m.cols(); ++k) {
            const auto& l = m.assigned_labels()[k];
            os << std::right << std::setw(std::max<int>(8, static_cast<int>(l.size()) + 2))
               << m.probability(i, k);
        }
        os << "\n";
    }
    return os.str();
}

inline nlohmann::json stats_to_json(const SampleStats& s) {
    return {{"mean", s.mean}, {"median", s.median}, {"sd", s.sd}, {"mad", s.mad}, {"n", s.n}};
}

inline nlohmann::json screening_to_json(const ScreeningStudyResult& r) {
    nlohmann::json j;
    j["kind"] = "screening-study";
    j["config"] = {{"sets", r.sets},
                   {"replicates", r.replicates},
                   {"seed", r.seed},
                   {"rng", kRngName}};
    j["benchmark_counts"] = stats_to_json(r.benchmark_counts);
    j["benchmark_counts"]["by_set"] = r.benchmark_count_by_set;
    j["dangerous_miss"] = stats_to_json(r.dangerous_miss_rates);
    j["nondangerous_false_alarm"] = stats_to_json(r.nondangerous_false_alarm_rates);
    return j;
}

inline std::string screening_to_text(const ScreeningStudyResult& r) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "# screening study  sets=" << r.sets << "  replicates=" << r.replicates
       << "  seed=" << r.seed << "\n";
    const auto row = [&](const char* name, const SampleStats& s) {
        os << std::left << std::setw(26) << name << " mean=" << s.mean << " median=" << s.median
           << " sd=" << s.sd << " mad=" << s.mad << " n=" << s.n << "\n";
    };
    row("benchmark count", r.benchmark_counts);
    row("dangerous->nondangerous", r.dangerous_miss_rates);
    row("nondangerous->dangerous", r.nondangerous_false_alarm_rates);
    return os.str();
}

} // namespace rpmbayes
