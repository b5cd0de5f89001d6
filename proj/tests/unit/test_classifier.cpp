#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rpmbayes/classifier.hpp"
#include "rpmbayes/simulate.hpp"

using namespace rpmbayes;

namespace {

ClassifierModel two_class_model(double prior1 = 0.5) {
    return ClassifierModel({
        {"peaked", EnergySpectrum({0.9, 0.1}), prior1, true},
        {"flat", EnergySpectrum({0.5, 0.5}), 1.0 - prior1, false},
    });
}

ScanMatrix scan_from_counts(const std::vector<std::int64_t>& counts) {
    ScanMatrix scan(counts.size(), 1);
    for (std::size_t b = 0; b < counts.size(); ++b) scan.at(b, 0) = counts[b];
    return scan;
}

} // namespace

TEST_CASE("model validation") {
    CHECK_THROWS_AS(ClassifierModel({{"only", EnergySpectrum({0.5, 0.5}), 1.0, false}}),
                    std::domain_error);
    // zero window
    CHECK_THROWS_AS(ClassifierModel({{"a", EnergySpectrum({1.0, 0.0}), 0.5, false},
                                     {"b", EnergySpectrum({0.5, 0.5}), 0.5, false}}),
                    std::domain_error);
    // priors off the simplex
    CHECK_THROWS_AS(ClassifierModel({{"a", EnergySpectrum({0.9, 0.1}), 0.6, false},
                                     {"b", EnergySpectrum({0.5, 0.5}), 0.6, false}}),
                    std::domain_error);
    // identical spectra
    CHECK_THROWS_AS(ClassifierModel({{"a", EnergySpectrum({0.5, 0.5}), 0.5, false},
                                     {"b", EnergySpectrum({0.5, 0.5}), 0.5, false}}),
                    std::domain_error);
    // duplicate labels
    CHECK_THROWS_AS(ClassifierModel({{"a", EnergySpectrum({0.9, 0.1}), 0.5, false},
                                     {"a", EnergySpectrum({0.5, 0.5}), 0.5, false}}),
                    std::domain_error);
}

TEST_CASE("log scores") {
    const auto model = two_class_model();

    SECTION("empty scan scores the priors") {
        const auto scores = log_scores(model, scan_from_counts({0, 0}));
        CHECK(scores[0] == Catch::Approx(std::log(0.5)).epsilon(1e-12));
        CHECK(scores[1] == Catch::Approx(std::log(0.5)).epsilon(1e-12));
    }

    SECTION("hand-computed score difference") {
        // L = (10, 0): difference is 10 log(0.9/0.5) ~ 5.878
        const auto scores = log_scores(model, scan_from_counts({10, 0}));
        CHECK(scores[0] - scores[1] ==
              Catch::Approx(10.0 * std::log(0.9 / 0.5)).epsilon(1e-12));
        CHECK(scores[0] - scores[1] == Catch::Approx(5.8778).margin(1e-4));
    }

    SECTION("column permutation leaves scores unchanged") {
        ScanMatrix scan(2, 3);
        scan.at(0, 0) = 4; scan.at(0, 1) = 9; scan.at(0, 2) = 1;
        scan.at(1, 0) = 2; scan.at(1, 1) = 0; scan.at(1, 2) = 5;
        ScanMatrix permuted(2, 3);
        permuted.at(0, 0) = 1; permuted.at(0, 1) = 4; permuted.at(0, 2) = 9;
        permuted.at(1, 0) = 5; permuted.at(1, 1) = 2; permuted.at(1, 2) = 0;
        CHECK(log_scores(model, scan) == log_scores(model, permuted));
    }

    SECTION("dimension mismatch") {
        CHECK_THROWS_AS(log_scores(model, scan_from_counts({1, 2, 3})), std::domain_error);
    }
}

TEST_CASE("classify argmax and tie break") {
    const auto model = two_class_model();
    // N = 0 with uniform priors ties; the lowest index wins
    const auto d = classify(model, scan_from_counts({0, 0}));
    CHECK(d.index == 0);
    CHECK(d.label == "peaked");

    const auto d2 = classify(model, scan_from_counts({1, 9}));
    CHECK(d2.label == "flat");
}

TEST_CASE("posterior probabilities") {
    SECTION("empty scan returns the priors") {
        const auto model = two_class_model(0.3);
        const auto post = posterior_probabilities(model, scan_from_counts({0, 0}));
        CHECK(post[0] == Catch::Approx(0.3).epsilon(1e-12));
        CHECK(post[1] == Catch::Approx(0.7).epsilon(1e-12));
    }

    SECTION("two-class winner follows the logistic of the score gap") {
        const auto model = two_class_model();
        for (const auto& counts :
             {std::vector<std::int64_t>{3, 1}, {10, 0}, {0, 7}, {25, 13}}) {
            const auto scores = log_scores(model, scan_from_counts(counts));
            const auto post = posterior_probabilities(model, scan_from_counts(counts));
            const double gap = scores[0] - scores[1];
            CHECK(post[0] == Catch::Approx(1.0 / (1.0 + std::exp(-gap))).epsilon(1e-12));
            CHECK(post[0] + post[1] == Catch::Approx(1.0).margin(1e-12));
        }
    }

    SECTION("matches exact enumeration on tiny scans") {
        // brute force in extended precision over all scans with N <= 5
        const auto model = two_class_model(0.4);
        for (std::int64_t n = 0; n <= 5; ++n) {
            for (std::int64_t l1 = 0; l1 <= n; ++l1) {
                const std::int64_t l2 = n - l1;
                const auto post = posterior_probabilities(model, scan_from_counts({l1, l2}));
                const long double w1 =
                    0.4L * powl(0.9L, static_cast<long double>(l1)) *
                    powl(0.1L, static_cast<long double>(l2));
                const long double w2 =
                    0.6L * powl(0.5L, static_cast<long double>(l1)) *
                    powl(0.5L, static_cast<long double>(l2));
                const double expected = static_cast<double>(w1 / (w1 + w2));
                CHECK(post[0] == Catch::Approx(expected).epsilon(1e-9));
            }
        }
    }

    SECTION("score shift invariance") {
        std::vector<double> scores{-3.0, 1.5, 0.2};
        auto base = posteriors_from_scores(scores);
        for (double& s : scores) s += 1234.5;
        const auto shifted = posteriors_from_scores(scores);
        for (std::size_t k = 0; k < 3; ++k)
            CHECK(shifted[k] == Catch::Approx(base[k]).epsilon(1e-12));
        CHECK(argmax_index(scores) == 1);
    }
}

TEST_CASE("loss-weighted decisions") {
    const auto model = two_class_model();

    SECTION("0-1 loss agrees with the plain argmax") {
        const auto loss = LossMatrix::zero_one(2);
        std::mt19937 gen(5150);
        std::uniform_int_distribution<std::int64_t> count(0, 40);
        for (int trial = 0; trial < 50; ++trial) {
            const auto scan = scan_from_counts({count(gen), count(gen)});
            CHECK(classify(model, scan).index == classify_with_loss(model, scan, loss).index);
        }
    }

    SECTION("asymmetric costs move the decision") {
        // posteriors (0.6, 0.4); assigning class 1 risks W(1,2)*0.4, class 2
        // risks W(2,1)*0.6; with W(1,2)=1, W(2,1)=10 class 1 wins
        ClassifierModel model2({
            {"one", EnergySpectrum({0.9, 0.1}), 0.6, false},
            {"two", EnergySpectrum({0.5, 0.5}), 0.4, false},
        });
        LossMatrix loss(2, {0.0, 1.0, 10.0, 0.0});
        const auto d = classify_with_loss(model2, scan_from_counts({0, 0}), loss);
        REQUIRE(d.expected_losses.has_value());
        CHECK((*d.expected_losses)[0] == Catch::Approx(1.0 * 0.4).epsilon(1e-12));
        CHECK((*d.expected_losses)[1] == Catch::Approx(10.0 * 0.6).epsilon(1e-12));
        CHECK(d.label == "one");
    }

    SECTION("degenerate loss matrices are rejected") {
        CHECK_THROWS_AS(LossMatrix(2, {0.0, 0.0, 0.0, 0.0}), std::domain_error);
        CHECK_THROWS_AS(LossMatrix(2, {1.0, 1.0, 1.0, 1.0}), std::domain_error);
        CHECK_THROWS_AS(LossMatrix(2, {0.0, -1.0, 1.0, 0.0}), std::domain_error);
    }
}

TEST_CASE("goodness of fit") {
    SECTION("exact proportions give statistic 0 and p-value 1") {
        const EnergySpectrum spectrum({0.6, 0.4});
        const auto gof = goodness_of_fit(scan_from_counts({60, 40}), spectrum);
        CHECK(gof.statistic == Catch::Approx(0.0).margin(1e-12));
        CHECK(gof.p_value == Catch::Approx(1.0).margin(1e-12));
    }

    SECTION("hand-computed statistic") {
        // B=2, N=100, p=(0.5,0.5), L=(60,40): chi2 = 4
        const auto gof = goodness_of_fit(scan_from_counts({60, 40}), EnergySpectrum({0.5, 0.5}));
        CHECK(gof.statistic == Catch::Approx(4.0).epsilon(1e-12));
        CHECK(gof.p_value == Catch::Approx(chi_squared_survival(4.0, 1.0)).epsilon(1e-12));
    }

    SECTION("empty scan is an error") {
        CHECK_THROWS_AS(goodness_of_fit(scan_from_counts({0, 0}), EnergySpectrum({0.5, 0.5})),
                        std::domain_error);
    }

    SECTION("p-values are roughly uniform under the true class") {
        const EnergySpectrum spectrum({0.954, 0.033, 0.013});
        const int replicates = 2000;
        std::vector<double> pvals;
        for (int r = 0; r < replicates; ++r) {
            RngStream rng(55, static_cast<std::uint64_t>(r));
            ScanMatrix scan(3, 1);
            for (std::size_t b = 0; b < 3; ++b)
                scan.at(b, 0) = poisson_sample(20000.0 * spectrum[b], rng);
            pvals.push_back(goodness_of_fit(scan, spectrum).p_value);
        }
        // Kolmogorov-Smirnov against uniform at alpha far below any noise
        std::sort(pvals.begin(), pvals.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < pvals.size(); ++i) {
            const double ecdf_hi = static_cast<double>(i + 1) / replicates;
            const double ecdf_lo = static_cast<double>(i) / replicates;
            ks = std::max({ks, std::abs(ecdf_hi - pvals[i]), std::abs(pvals[i] - ecdf_lo)});
        }
        CHECK(ks < 2.0 / std::sqrt(static_cast<double>(replicates)));
    }
}
