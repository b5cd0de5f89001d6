#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rpmbayes/simulate.hpp"

using namespace rpmbayes;

namespace {

const MaterialClass kHeu{"HEU", {17700.0, 616.0, 247.0}, true};

} // namespace

TEST_CASE("default portal profile") {
    const auto profile = default_portal_profile();
    REQUIRE(profile.steps() == 20);
    CHECK(profile.attenuation == Attenuation::Linear);
    // palindrome schedule
    for (std::size_t t = 0; t < 20; ++t)
        CHECK(profile.distances[t] == Catch::Approx(profile.distances[19 - t]));
    // hand sum: 2 * (0.1 + ... + 0.9) + 2 * 1.0
    CHECK(profile.total_exposure() == Catch::Approx(11.0).margin(1e-12));
}

TEST_CASE("profile validation") {
    GeometryProfile empty;
    empty.distances.clear();
    CHECK_THROWS_AS(empty.validate(), std::domain_error);

    GeometryProfile beyond;
    beyond.distances = {0.5, 1.5};
    CHECK_THROWS_AS(beyond.validate(), std::domain_error);

    beyond.attenuation = Attenuation::InverseSquare;
    CHECK_NOTHROW(beyond.validate());
    CHECK(beyond.g(1.0, 2.0) == Catch::Approx(0.5));
}

TEST_CASE("all-zero geometry yields an all-zero scan") {
    GeometryProfile profile;
    profile.distances = {1.0, 1.0, 1.0}; // (1-d) = 0 everywhere
    RngStream rng(1, 0);
    const auto scan = simulate_scan(MixtureSpec{{{kHeu, 2.0}}}, profile, rng);
    CHECK(scan.total() == 0);
}

TEST_CASE("scan matrix bookkeeping") {
    ScanMatrix m(2, 3);
    m.at(0, 0) = 5;
    m.at(0, 2) = 7;
    m.at(1, 1) = 11;
    CHECK(m.row_sums() == std::vector<std::int64_t>{12, 11});
    CHECK(m.column_sums() == std::vector<std::int64_t>{5, 11, 7});
    CHECK(m.total() == 23);
}

TEST_CASE("simulated first-window counts match the analytic mean") {
    // one unit through the portal: E[L_1] = 17700 * sum_t (1-d_t) = 194700
    const auto profile = default_portal_profile();
    const double expected = 17700.0 * profile.total_exposure();
    const int replicates = 10000;
    double sum = 0.0;
    for (int r = 0; r < replicates; ++r) {
        RngStream rng(77, static_cast<std::uint64_t>(r));
        const auto scan = simulate_scan(MixtureSpec{{{kHeu, 1.0}}}, profile, rng);
        sum += static_cast<double>(scan.row_sums()[0]);
    }
    const double mean = sum / replicates;
    CHECK(std::abs(mean - expected) / expected < 0.01);
}

TEST_CASE("column totals follow the per-distance mean") {
    const auto profile = default_portal_profile();
    const double lambda = 17700.0 + 616.0 + 247.0;
    const int replicates = 4000;
    std::vector<double> sums(profile.steps(), 0.0);
    for (int r = 0; r < replicates; ++r) {
        RngStream rng(123, static_cast<std::uint64_t>(r));
        const auto scan = simulate_scan(MixtureSpec{{{kHeu, 0.1}}}, profile, rng);
        const auto cols = scan.column_sums();
        for (std::size_t t = 0; t < cols.size(); ++t) sums[t] += static_cast<double>(cols[t]);
    }
    for (std::size_t t = 0; t < profile.steps(); ++t) {
        const double expected = profile.g(profile.distances[t], 0.1) * lambda;
        const double mean = sums[t] / replicates;
        if (expected == 0.0) {
            CHECK(mean == 0.0);
        } else {
            // 4 sigma Monte Carlo band
            const double sigma = std::sqrt(expected / replicates);
            CHECK(std::abs(mean - expected) <= 4.0 * sigma + 1e-9);
        }
    }
}

TEST_CASE("pooled window shares concentrate near the class spectrum") {
    const auto profile = default_portal_profile();
    RngStream rng(9, 4);
    const auto scan = simulate_scan(MixtureSpec{{{kHeu, 1.0}}}, profile, rng);
    const auto sums = scan.row_sums();
    const double total = static_cast<double>(scan.total());
    const std::vector<double> expected{0.954, 0.033, 0.013};
    for (std::size_t b = 0; b < 3; ++b)
        CHECK(static_cast<double>(sums[b]) / total ==
              Catch::Approx(expected[b]).margin(0.005));
}

TEST_CASE("identical streams give identical scans") {
    const auto profile = default_portal_profile();
    RngStream a(2718, 5), b(2718, 5), c(2718, 6);
    const auto scan_a = simulate_scan(MixtureSpec{{{kHeu, 1.0}}}, profile, a);
    const auto scan_b = simulate_scan(MixtureSpec{{{kHeu, 1.0}}}, profile, b);
    const auto scan_c = simulate_scan(MixtureSpec{{{kHeu, 1.0}}}, profile, c);
    CHECK(scan_a == scan_b);
    CHECK_FALSE(scan_a == scan_c);
}
