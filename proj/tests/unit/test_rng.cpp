#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rpmbayes/rng.hpp"

using namespace rpmbayes;

TEST_CASE("streams are reproducible and distinct") {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    int agreements_c = 0, agreements_d = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto va = a.next_u64();
        CHECK(va == b.next_u64());
        agreements_c += va == c.next_u64() ? 1 : 0;
        agreements_d += va == d.next_u64() ? 1 : 0;
    }
    CHECK(agreements_c == 0);
    CHECK(agreements_d == 0);
}

TEST_CASE("uniform doubles stay in range") {
    RngStream rng(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.next_double();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    RngStream rng2(1, 1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng2.next_open();
        CHECK(u > 0.0);
        CHECK(u <= 1.0);
    }
}

TEST_CASE("poisson edge cases") {
    RngStream rng(5, 0);
    for (int i = 0; i < 100; ++i) CHECK(poisson_sample(0.0, rng) == 0);
    CHECK_THROWS_AS(poisson_sample(-1.0, rng), std::domain_error);
    CHECK_THROWS_AS(poisson_sample(std::nan(""), rng), std::domain_error);
    CHECK_THROWS_AS(poisson_sample(std::numeric_limits<double>::infinity(), rng),
                    std::domain_error);
}

TEST_CASE("poisson moments match at small and large means") {
    // sample mean within 3 sigma of the mean, variance/mean near 1
    for (const double mean : {0.7, 3.0, 9.99, 10.0, 37.5, 1000.0}) {
        RngStream rng(2024, static_cast<std::uint64_t>(mean * 100));
        const int n = 100000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(poisson_sample(mean, rng));
            sum += k;
            sumsq += k * k;
        }
        const double sample_mean = sum / n;
        const double sample_var = sumsq / n - sample_mean * sample_mean;
        const double tol = 3.0 * std::sqrt(mean / n);
        INFO("mean " << mean);
        CHECK(std::abs(sample_mean - mean) <= tol);
        CHECK(sample_var / mean > 0.95);
        CHECK(sample_var / mean < 1.05);
    }
}

TEST_CASE("poisson sequence is deterministic per stream") {
    RngStream a(99, 3), b(99, 3);
    for (int i = 0; i < 200; ++i)
        CHECK(poisson_sample(123.0, a) == poisson_sample(123.0, b));
}

TEST_CASE("gamma moments") {
    // shape < 1 exercises the boost path used for Dirichlet(0.25) draws
    for (const double shape : {0.25, 1.0, 4.5}) {
        RngStream rng(7, static_cast<std::uint64_t>(shape * 4));
        const int n = 200000;
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double x = gamma_sample(shape, rng);
            sum += x;
            sumsq += x * x;
        }
        const double mean = sum / n;
        const double var = sumsq / n - mean * mean;
        INFO("shape " << shape);
        CHECK(mean == Catch::Approx(shape).margin(4.0 * std::sqrt(shape / n)));
        CHECK(var == Catch::Approx(shape).epsilon(0.05));
    }
}

TEST_CASE("dirichlet draws live on the simplex") {
    const std::vector<double> alpha{0.25, 0.25, 0.25, 0.25};
    RngStream rng(11, 0);
    std::vector<double> mean(4, 0.0);
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto w = dirichlet_sample(alpha, rng);
        double sum = 0.0;
        for (double v : w) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == Catch::Approx(1.0).margin(1e-12));
        for (std::size_t j = 0; j < 4; ++j) mean[j] += w[j];
    }
    for (std::size_t j = 0; j < 4; ++j)
        CHECK(mean[j] / n == Catch::Approx(0.25).margin(0.01));
}

TEST_CASE("substream combiner separates indices") {
    CHECK(substream(0, 0) != substream(0, 1));
    CHECK(substream(1, 0) != substream(0, 1));
    CHECK(substream(3, 4) == substream(3, 4));
}
