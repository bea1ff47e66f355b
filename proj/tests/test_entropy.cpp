#include <cmath>
#include <random>
#include <vector>

#include "diqkd/entropy.hpp"
#include "diqkd/errors.hpp"
#include "doctest.h"

using namespace diqkd;

namespace {

// Reference binary entropy through natural logarithms.
double h_ref(double z) {
    double s = 0.0;
    if (z > 0.0) s -= z * std::log(z);
    if (z < 1.0) s -= (1.0 - z) * std::log(1.0 - z);
    return s / std::log(2.0);
}

}  // namespace

TEST_CASE("binary entropy values") {
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.11) == doctest::Approx(0.499916).epsilon(1e-6));
    for (double z : {1e-9, 0.03, 0.2, 0.37, 0.8})
        CHECK(binary_entropy(z) == doctest::Approx(h_ref(z)).epsilon(1e-13));
}

TEST_CASE("binary entropy domain") {
    CHECK_THROWS_AS(binary_entropy(-0.01), DomainError);
    CHECK_THROWS_AS(binary_entropy(1.01), DomainError);
    CHECK(binary_entropy(-1e-13) == 0.0);
    CHECK(binary_entropy(1.0 + 1e-13) == 0.0);
}

TEST_CASE("n_q limits") {
    for (double z : {0.0, 0.2, 0.5, 0.9}) CHECK(n_q(z, 1.0) == doctest::Approx(1.0));
    for (double q : {0.1, 0.5, 1.0}) CHECK(n_q(0.0, q) == 1.0);
    for (double z : {0.1, 0.3, 0.7}) CHECK(n_q(z, 1e-14) == doctest::Approx(std::max(z, 1 - z)).epsilon(1e-7));
}

TEST_CASE("h_q limits and symmetry") {
    for (double z : {0.1, 0.4}) {
        CHECK(h_q(z, 1.0) == doctest::Approx(binary_entropy(z)).epsilon(1e-13));
        CHECK(std::abs(h_q(z, 1e-15)) < 1e-6);
    }
    CHECK(h_q(0.0, 0.3) == 0.0);
    CHECK(h_q(1.0, 0.3) == 0.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const double z = u(rng), q = u(rng) * 0.999 + 0.001;
        CHECK(std::abs(h_q(z, q) - h_q(1.0 - z, q)) < 1e-12);
    }
}

TEST_CASE("h_q is concave in z") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int bad = 0;
    for (int i = 0; i < 20000; ++i) {
        const double z1 = u(rng), z2 = u(rng), t = u(rng), q = u(rng) * 0.999 + 0.001;
        const double lhs = h_q(t * z1 + (1 - t) * z2, q);
        const double rhs = t * h_q(z1, q) + (1 - t) * h_q(z2, q);
        if (lhs < rhs - 1e-10) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("eve_info_bound analytic points") {
    for (double p : {0.0, 0.1, 0.3, 0.5}) CHECK(std::abs(eve_info_bound(kTsirelson, p)) < 1e-12);
    for (double p : {0.1, 0.3}) CHECK(std::abs(eve_info_bound(2.0, p) - (1.0 - h_ref(p))) < 1e-12);
    for (double s : {2.0, 2.3, 2.6}) {
        const double expect = h_ref((1.0 + std::sqrt(s * s / 4.0 - 1.0)) / 2.0);
        CHECK(eve_info_bound(s, 0.0) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("eve_info_bound domain and clamping") {
    CHECK_THROWS_AS(eve_info_bound(1.99, 0.1), DomainError);
    CHECK_THROWS_AS(eve_info_bound(kTsirelson + 1e-6, 0.1), DomainError);
    CHECK(eve_info_bound(kTsirelson + 5e-10, 0.1) == eve_info_bound(kTsirelson, 0.1));
    CHECK_THROWS_AS(eve_info_bound(2.5, 0.6), DomainError);
}

TEST_CASE("eve_info_bound monotone in S and p on a grid") {
    const int n = 50;
    int bad = 0;
    for (int i = 0; i < n; ++i) {
        const double s = 2.0 + (kTsirelson - 2.0) * i / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double p = 0.5 * j / (n - 1);
            const double v = eve_info_bound(s, p);
            if (i + 1 < n && eve_info_bound(2.0 + (kTsirelson - 2.0) * (i + 1) / (n - 1), p) > v + 1e-14) ++bad;
            if (j + 1 < n && eve_info_bound(s, 0.5 * (j + 1) / (n - 1)) > v + 1e-14) ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("1 - eve_info_bound is convex in S") {
    const int n = 200;
    for (double p : {0.0, 0.05, 0.2, 0.4}) {
        int bad = 0;
        const double step = (kTsirelson - 2.0) / (n - 1);
        for (int i = 1; i + 1 < n; ++i) {
            const double s = 2.0 + step * i;
            const double second = (1 - eve_info_bound(s + step, p)) - 2 * (1 - eve_info_bound(s, p)) +
                                  (1 - eve_info_bound(s - step, p));
            if (second < -1e-12) ++bad;
        }
        CHECK(bad == 0);
    }
}

TEST_CASE("shannon and conditional entropy") {
    CHECK(shannon_entropy(std::vector<double>{1, 0, 0, 0}) == 0.0);
    CHECK(shannon_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(shannon_entropy(DistributionTable::single({0.5, 0.25, 0.25})) == doctest::Approx(1.5).epsilon(1e-15));

    CHECK(conditional_entropy(DistributionTable(2, 2, {0.25, 0.25, 0.25, 0.25})) == doctest::Approx(1.0));
    CHECK(conditional_entropy(DistributionTable(2, 2, {0.5, 0.0, 0.0, 0.5})) == doctest::Approx(0.0));
    const double h02 = conditional_entropy(DistributionTable(2, 2, {0.4, 0.1, 0.1, 0.4}));
    CHECK(h02 == doctest::Approx(h_ref(0.2)).epsilon(1e-13));
    CHECK(h02 == doctest::Approx(0.7219).epsilon(1e-4));
}

TEST_CASE("distribution table validation") {
    CHECK_THROWS_AS(DistributionTable(1, 2, {0.6, 0.6}), DomainError);
    CHECK_THROWS_AS(DistributionTable(1, 2, {1.1, -0.1}), DomainError);
    CHECK_THROWS_AS(DistributionTable(2, 2, {1.0}), DomainError);
    const DistributionTable t(1, 2, {1.0 + 5e-13, -5e-13});
    CHECK(t(0, 1) == 0.0);
    CHECK_THROWS_AS(NoiseParam(0.51), DomainError);
    CHECK_THROWS_AS(NoiseParam(-0.01), DomainError);
    CHECK(NoiseParam(0.25).q() == doctest::Approx(0.25));
}
