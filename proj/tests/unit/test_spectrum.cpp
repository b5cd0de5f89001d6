#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "rpmbayes/catalog.hpp"
#include "rpmbayes/spectrum.hpp"

using namespace rpmbayes;

namespace {

// Independent three-term evaluation of the divergence sum, kept apart from
// the library implementation on purpose.
double kl_brute(const std::vector<double>& p, const std::vector<double>& q) {
    double sum = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b)
        if (p[b] > 0.0) sum += p[b] * std::log(p[b] / q[b]);
    return sum;
}

std::vector<double> random_simplex(std::mt19937& gen, std::size_t windows) {
    std::uniform_real_distribution<double> unit(0.01, 1.0);
    std::vector<double> v(windows);
    double sum = 0.0;
    for (double& x : v) {
        x = unit(gen);
        sum += x;
    }
    for (double& x : v) x /= sum;
    return v;
}

} // namespace

TEST_CASE("normalize divides by the total rate") {
    const auto heu = normalize(std::vector<double>{17700.0, 616.0, 247.0});
    CHECK(heu[0] == Catch::Approx(0.954).margin(0.001));
    CHECK(heu[1] == Catch::Approx(0.033).margin(0.001));
    CHECK(heu[2] == Catch::Approx(0.013).margin(0.001));

    const auto flat = normalize(std::vector<double>{1.0, 1.0, 1.0, 1.0});
    for (std::size_t b = 0; b < 4; ++b) CHECK(flat[b] == Catch::Approx(0.25));

    // direct arithmetic on the rounded fertilizer rates
    const auto fert = normalize(std::vector<double>{2720.0, 1000.0, 519.0});
    CHECK(fert[0] == Catch::Approx(0.6415).margin(0.001));
    CHECK(fert[1] == Catch::Approx(0.2359).margin(0.001));
    CHECK(fert[2] == Catch::Approx(0.1224).margin(0.001));
}

TEST_CASE("normalize rejects degenerate input") {
    CHECK_THROWS_AS(normalize(std::vector<double>{0.0, 0.0}), std::domain_error);
    CHECK_THROWS_AS(normalize(std::vector<double>{1.0, -0.5}), std::domain_error);
    CHECK_THROWS_AS(normalize(std::vector<double>{1.0}), std::domain_error);
}

TEST_CASE("normalize is idempotent") {
    std::mt19937 gen(411);
    for (int trial = 0; trial < 50; ++trial) {
        std::uniform_real_distribution<double> rate(0.0, 5000.0);
        std::vector<double> rates(3);
        for (double& r : rates) r = rate(gen);
        if (rates[0] + rates[1] + rates[2] == 0.0) continue;
        const auto once = normalize(rates);
        const auto twice = normalize(once.probs());
        for (std::size_t b = 0; b < 3; ++b)
            CHECK(std::abs(once[b] - twice[b]) <= 1e-12);
    }
}

TEST_CASE("mix pools component rates and drops geometry") {
    MaterialClass heu{"HEU", {17700.0, 616.0, 247.0}, true};
    MaterialClass fertilizer{"Fertilizer", {2720.0, 1000.0, 519.0}, false};
    MaterialClass wgpu{"WGPu", {60900.0, 3900.0, 285.0}, true};

    SECTION("small HEU in fertilizer filler") {
        // window totals by hand: (3002.0, 956.4, 494.6)
        const auto spectrum = mix(MixtureSpec{{{heu, 0.025}, {fertilizer, 0.941}}});
        const double total = 3002.02 + 956.4 + 494.554;
        CHECK(spectrum[0] == Catch::Approx(3002.02 / total).epsilon(1e-9));
        CHECK(spectrum[1] == Catch::Approx(956.4 / total).epsilon(1e-9));
        CHECK(spectrum[2] == Catch::Approx(494.554 / total).epsilon(1e-9));
        CHECK(spectrum[0] == Catch::Approx(0.674).margin(0.001));
        CHECK(spectrum[1] == Catch::Approx(0.215).margin(0.001));
        CHECK(spectrum[2] == Catch::Approx(0.111).margin(0.001));
    }

    SECTION("single component equals the class spectrum at any quantity") {
        const auto pure = spectrum_of(heu);
        for (double m : {0.01, 1.0, 250.0}) {
            const auto mixed = mix(MixtureSpec{{{heu, m}}});
            for (std::size_t b = 0; b < 3; ++b)
                CHECK(mixed[b] == Catch::Approx(pure[b]).epsilon(1e-12));
        }
    }

    SECTION("half and half man-made mixture") {
        // window totals by hand: (39300, 2258, 266)
        const auto spectrum = mix(MixtureSpec{{{wgpu, 0.5}, {heu, 0.5}}});
        CHECK(spectrum[0] == Catch::Approx(0.9397).margin(0.0001));
        CHECK(spectrum[1] == Catch::Approx(0.0540).margin(0.0001));
        CHECK(spectrum[2] == Catch::Approx(0.0064).margin(0.0001));
    }

    SECTION("empty component list is rejected") {
        CHECK_THROWS_AS(mix(MixtureSpec{}), std::domain_error);
    }

    SECTION("uniform quantity scaling cancels") {
        std::mt19937 gen(7);
        std::uniform_real_distribution<double> qd(0.01, 3.0);
        for (int trial = 0; trial < 25; ++trial) {
            const double q1 = qd(gen), q2 = qd(gen), alpha = qd(gen);
            const auto base = mix(MixtureSpec{{{heu, q1}, {fertilizer, q2}}});
            const auto scaled = mix(MixtureSpec{{{heu, alpha * q1}, {fertilizer, alpha * q2}}});
            for (std::size_t b = 0; b < 3; ++b)
                CHECK(scaled[b] == Catch::Approx(base[b]).margin(1e-12));
        }
    }
}

TEST_CASE("kl divergence basics") {
    const auto heu = normalize(std::vector<double>{17700.0, 616.0, 247.0});
    const auto fert = EnergySpectrum({0.635, 0.243, 0.122});

    CHECK(kl_divergence(heu, heu) == 0.0);
    CHECK(kl_divergence(fert, fert) == 0.0);

    const double expected = kl_brute(heu.probs(), fert.probs());
    CHECK(kl_divergence(heu, fert) == Catch::Approx(expected).epsilon(1e-12));
    CHECK(expected > 0.0);

    const EnergySpectrum point({1.0, 0.0});
    const EnergySpectrum half({0.5, 0.5});
    CHECK(kl_divergence(point, half) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(std::isinf(kl_divergence(half, point)));
}

TEST_CASE("kl divergence is nonnegative on random simplex pairs") {
    std::mt19937 gen(2025);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = EnergySpectrum(random_simplex(gen, 3));
        const auto q = EnergySpectrum(random_simplex(gen, 3));
        const double v = kl_divergence(p, q);
        CHECK(v >= 0.0);
        if (!(p == q)) CHECK(v > 0.0);
    }
}

TEST_CASE("symmetrized divergence") {
    std::mt19937 gen(99);
    const auto p = EnergySpectrum(random_simplex(gen, 4));
    const auto q = EnergySpectrum(random_simplex(gen, 4));
    CHECK(symmetrized_kl(p, p) == 0.0);
    CHECK(symmetrized_kl(p, q) == Catch::Approx(symmetrized_kl(q, p)).epsilon(1e-12));
    CHECK(symmetrized_kl(p, q) ==
          Catch::Approx(kl_divergence(p, q) + kl_divergence(q, p)).epsilon(1e-12));
    CHECK(std::isinf(symmetrized_kl(EnergySpectrum({1.0, 0.0}), EnergySpectrum({0.5, 0.5}))));
}

TEST_CASE("window refinement never decreases divergence") {
    // split window 0 of both spectra with the same ratio; divergence must
    // not drop (it is unchanged for proportional splits, larger otherwise)
    std::mt19937 gen(31337);
    std::uniform_real_distribution<double> ratio(0.05, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_simplex(gen, 3);
        const auto q = random_simplex(gen, 3);
        const double before = kl_brute(p, q);
        const double r = ratio(gen);
        const std::vector<double> p2{p[0] * r, p[0] * (1.0 - r), p[1], p[2]};
        const std::vector<double> q2{q[0] * r, q[0] * (1.0 - r), q[1], q[2]};
        const double after = kl_divergence(EnergySpectrum(p2), EnergySpectrum(q2));
        CHECK(after >= before - 1e-12);
        CHECK(after == Catch::Approx(before).margin(1e-12)); // proportional split

        const double rp = ratio(gen), rq = ratio(gen);
        const std::vector<double> p3{p[0] * rp, p[0] * (1.0 - rp), p[1], p[2]};
        const std::vector<double> q3{q[0] * rq, q[0] * (1.0 - rq), q[1], q[2]};
        CHECK(kl_divergence(EnergySpectrum(p3), EnergySpectrum(q3)) >= before - 1e-12);
    }
}

TEST_CASE("solve_quantity inverts the first-window rate") {
    MaterialClass kitty{"Kitty litter", {1700.0, 790.0, 208.0}, false};
    MaterialClass fertilizer{"Fertilizer", {2720.0, 1000.0, 519.0}, false};

    CHECK(solve_quantity(kitty, 3000.0) == Catch::Approx(3000.0 / 1700.0).epsilon(1e-12));
    CHECK(solve_quantity(kitty, 3000.0) == Catch::Approx(1.759).margin(0.01));
    CHECK(solve_quantity(kitty, kitty.rates[0]) == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(solve_quantity(fertilizer, 3000.0) == Catch::Approx(1.1029).margin(0.0001));

    MaterialClass zero_first{"x", {0.0, 1.0}, false};
    CHECK_THROWS_AS(solve_quantity(zero_first, 100.0), std::domain_error);
}

TEST_CASE("spectrum floor keeps the simplex") {
    const EnergySpectrum s({0.5, 0.5, 0.0});
    const auto floored = s.floored(1e-12);
    CHECK(floored.strictly_positive());
    double sum = 0.0;
    for (std::size_t b = 0; b < 3; ++b) sum += floored[b];
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
}
