#pragma once
// The conditional-multinomial naive Bayes rule. Conditioning each time-step
// count vector on its total removes the unknown geometry factor, so the
// log score of class k needs only the pooled window counts L_b:
//
//     score_k = sum_b L_b log p_{b,k} + log P(Y=k).
//
// The multinomial coefficient is class-independent and dropped. All
// likelihood work stays in log space; posteriors use max-subtracted softmax.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rpmbayes/simulate.hpp"
#include "rpmbayes/spectrum.hpp"
#include "rpmbayes/stats.hpp"

namespace rpmbayes {

struct ClassEntry {
    std::string label;
    EnergySpectrum spectrum;
    double prior = 0.0;
    bool dangerous = false;
};

// Cost of assigning class k' when the truth is k; zero diagonal.
class LossMatrix {
public:
    LossMatrix(std::size_t classes, std::vector<double> costs)
        : classes_(classes), costs_(std::move(costs)) {
        if (classes_ < 2 || costs_.size() != classes_ * classes_)
            throw std::domain_error("loss matrix must be K x K with K >= 2");
        bool any_positive = false;
        for (std::size_t a = 0; a < classes_; ++a) {
            for (std::size_t t = 0; t < classes_; ++t) {
                const double w = at(a, t);
                if (!(w >= 0.0))
                    throw std::domain_error("loss matrix entries must be nonnegative");
                if (a == t && w != 0.0)
                    throw std::domain_error("loss matrix diagonal must be zero");
                if (a != t && w > 0.0) any_positive = true;
            }
        }
        if (!any_positive)
            throw std::domain_error("loss matrix needs a positive off-diagonal entry");
    }

    static LossMatrix zero_one(std::size_t classes) {
        std::vector<double> costs(classes * classes, 1.0);
        for (std::size_t k = 0; k < classes; ++k) costs[k * classes + k] = 0.0;
        return LossMatrix(classes, std::move(costs));
    }

    std::size_t classes() const noexcept { return classes_; }
    double at(std::size_t assigned, std::size_t truth) const {
        return costs_[assigned * classes_ + truth];
    }

private:
    std::size_t classes_;
    std::vector<double> costs_;
};

class ClassifierModel {
public:
    explicit ClassifierModel(std::vector<ClassEntry> classes) : classes_(std::move(classes)) {
        if (classes_.size() < 2)
            throw std::domain_error("classifier model needs at least 2 classes");
        const std::size_t windows = classes_.front().spectrum.windows();
        double prior_sum = 0.0;
        for (const auto& entry : classes_) {
            if (entry.spectrum.windows() != windows)
                throw std::domain_error("class spectra disagree on window count");
            if (!entry.spectrum.strictly_positive())
                throw std::domain_error("class '" + entry.label +
                                        "' spectrum must be strictly positive per window");
            if (!(entry.prior > 0.0))
                throw std::domain_error("class '" + entry.label + "' needs a positive prior");
            prior_sum += entry.prior;
        }
        if (std::abs(prior_sum - 1.0) > 1e-9)
            throw std::domain_error("class priors must sum to 1");
        for (std::size_t i = 0; i < classes_.size(); ++i)
            for (std::size_t j = i + 1; j < classes_.size(); ++j) {
                if (classes_[i].label == classes_[j].label)
                    throw std::domain_error("duplicate class label '" + classes_[i].label + "'");
                if (classes_[i].spectrum == classes_[j].spectrum)
                    throw std::domain_error("classes '" + classes_[i].label + "' and '" +
                                            classes_[j].label + "' share a spectrum");
            }
        // cache log p and log prior for the scoring hot path
        log_probs_.resize(classes_.size() * windows);
        log_priors_.resize(classes_.size());
        for (std::size_t k = 0; k < classes_.size(); ++k) {
            log_priors_[k] = std::log(classes_[k].prior);
            for (std::size_t b = 0; b < windows; ++b)
                log_probs_[k * windows + b] = std::log(classes_[k].spectrum[b]);
        }
    }

    std::size_t size() const noexcept { return classes_.size(); }
    std::size_t windows() const noexcept { return classes_.front().spectrum.windows(); }
    const ClassEntry& entry(std::size_t k) const { return classes_.at(k); }
    const std::vector<ClassEntry>& entries() const noexcept { return classes_; }

    std::optional<std::size_t> index_of(const std::string& label) const {
        for (std::size_t k = 0; k < classes_.size(); ++k)
            if (classes_[k].label == label) return k;
        return std::nullopt;
    }

    double log_prob(std::size_t k, std::size_t b) const noexcept {
        return log_probs_[k * windows() + b];
    }
    double log_prior(std::size_t k) const noexcept { return log_priors_[k]; }

private:
    std::vector<ClassEntry> classes_;
    std::vector<double> log_probs_;
    std::vector<double> log_priors_;
};

struct Decision {
    std::string label;
    std::size_t index = 0;
    std::vector<double> log_scores;
    std::vector<double> posteriors;
    std::optional<std::vector<double>> expected_losses;
    std::optional<double> gof_statistic;
    std::optional<double> gof_p_value;
};

inline std::vector<double> log_scores(const ClassifierModel& model,
                                      std::span<const std::int64_t> window_counts) {
    if (window_counts.size() != model.windows())
        throw std::domain_error("scan has " + std::to_string(window_counts.size()) +
                                " windows, model has " + std::to_string(model.windows()));
    std::vector<double> scores(model.size());
    for (std::size_t k = 0; k < model.size(); ++k) {
        double s = model.log_prior(k);
        for (std::size_t b = 0; b < window_counts.size(); ++b)
            s += static_cast<double>(window_counts[b]) * model.log_prob(k, b);
        scores[k] = s;
    }
    return scores;
}

inline std::vector<double> log_scores(const ClassifierModel& model, const ScanMatrix& scan) {
    const auto sums = scan.row_sums();
    return log_scores(model, std::span<const std::int64_t>(sums));
}

// Max-subtracted softmax of the log scores.
inline std::vector<double> posteriors_from_scores(std::span<const double> scores) {
    const double top = *std::max_element(scores.begin(), scores.end());
    std::vector<double> post(scores.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < scores.size(); ++k) {
        post[k] = std::exp(scores[k] - top);
        sum += post[k];
    }
    for (double& p : post) p /= sum;
    return post;
}

inline std::vector<double> posterior_probabilities(const ClassifierModel& model,
                                                   const ScanMatrix& scan) {
    const auto scores = log_scores(model, scan);
    return posteriors_from_scores(scores);
}

// Ties break toward the lowest class index.
inline std::size_t argmax_index(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] > values[best]) best = k;
    return best;
}

inline std::size_t argmin_index(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] < values[best]) best = k;
    return best;
}

inline Decision classify(const ClassifierModel& model, const ScanMatrix& scan) {
    Decision d;
    d.log_scores = log_scores(model, scan);
    d.posteriors = posteriors_from_scores(d.log_scores);
    d.index = argmax_index(d.log_scores);
    d.label = model.entry(d.index).label;
    return d;
}

inline Decision classify_with_loss(const ClassifierModel& model, const ScanMatrix& scan,
                                   const LossMatrix& loss) {
    if (loss.classes() != model.size())
        throw std::domain_error("loss matrix size does not match class count");
    Decision d;
    d.log_scores = log_scores(model, scan);
    d.posteriors = posteriors_from_scores(d.log_scores);
    std::vector<double> losses(model.size(), 0.0);
    for (std::size_t assigned = 0; assigned < model.size(); ++assigned)
        for (std::size_t truth = 0; truth < model.size(); ++truth)
            losses[assigned] += loss.at(assigned, truth) * d.posteriors[truth];
    d.index = argmin_index(losses);
    d.label = model.entry(d.index).label;
    d.expected_losses = std::move(losses);
    return d;
}

struct GoodnessOfFit {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Pearson chi-squared of pooled window counts against a fully specified
// spectrum; B-1 degrees of freedom since nothing is estimated from the scan.
inline GoodnessOfFit goodness_of_fit(const ScanMatrix& scan, const EnergySpectrum& spectrum) {
    if (scan.windows() != spectrum.windows())
        throw std::domain_error("scan and spectrum disagree on window count");
    const auto counts = scan.row_sums();
    const double total = static_cast<double>(scan.total());
    if (!(total > 0.0))
        throw std::domain_error("goodness of fit is undefined for an empty scan");
    double stat = 0.0;
    for (std::size_t b = 0; b < spectrum.windows(); ++b) {
        const double expected = total * spectrum[b];
        if (!(expected > 0.0))
            throw std::domain_error("goodness of fit requires positive expected counts");
        const double diff = static_cast<double>(counts[b]) - expected;
        stat += diff * diff / expected;
    }
    return {stat, chi_squared_survival(stat, static_cast<double>(spectrum.windows() - 1))};
}

} // namespace rpmbayes
