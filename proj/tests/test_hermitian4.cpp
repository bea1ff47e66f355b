#include <cmath>
#include <random>

#include "diqkd/errors.hpp"
#include "diqkd/hermitian4.hpp"
#include "doctest.h"

using namespace diqkd;

namespace {

Matrix4c random_hermitian(std::mt19937_64& rng, double scale) {
    std::normal_distribution<double> n(0.0, scale);
    Matrix4c m;
    for (int r = 0; r < 4; ++r) {
        m(r, r) = n(rng);
        for (int c = r + 1; c < 4; ++c) {
            m(r, c) = Complex(n(rng), n(rng));
            m(c, r) = std::conj(m(r, c));
        }
    }
    return m;
}

// Random density matrix G G^dag / tr.
Matrix4c random_density(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix4c g;
    for (auto& v : g.a) v = Complex(n(rng), n(rng));
    Matrix4c rho = g * g.adjoint();
    const double tr = rho.trace().real();
    for (auto& v : rho.a) v /= tr;
    return rho;
}

double max_abs_diff(const Matrix4c& x, const Matrix4c& y) {
    double d = 0.0;
    for (std::size_t i = 0; i < 16; ++i) d = std::max(d, std::abs(x.a[i] - y.a[i]));
    return d;
}

}  // namespace

TEST_CASE("reconstruction of random Hermitian matrices") {
    std::mt19937_64 rng(3);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        const Matrix4c m = random_hermitian(rng, i % 2 ? 1.0 : 10.0);
        const Eigensystem4 es = hermitian4_eigensystem(m);
        Matrix4c lam;
        for (int k = 0; k < 4; ++k) lam(k, k) = es.values[static_cast<std::size_t>(k)];
        worst = std::max(worst, max_abs_diff(m, es.vectors * lam * es.vectors.adjoint()));
        CHECK(es.values[0] >= es.values[1]);
        CHECK(es.values[1] >= es.values[2]);
        CHECK(es.values[2] >= es.values[3]);
        // Orthonormal eigenvectors.
        CHECK(max_abs_diff(es.vectors.adjoint() * es.vectors, Matrix4c::identity()) < 1e-12);
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("density matrix eigenvalues sum to one") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 1000; ++i) {
        const auto v = hermitian4_eigenvalues(random_density(rng));
        CHECK(std::abs(v[0] + v[1] + v[2] + v[3] - 1.0) < 1e-10);
        CHECK(v[3] >= 0.0);
    }
}

TEST_CASE("simple spectra") {
    Matrix4c quarter;
    for (int k = 0; k < 4; ++k) quarter(k, k) = 0.25;
    for (double v : hermitian4_eigenvalues(quarter)) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

    Matrix4c d;
    const double l[4] = {0.1, 0.4, 0.2, 0.3};
    for (int k = 0; k < 4; ++k) d(k, k) = l[k];
    const auto v = hermitian4_eigenvalues(d);
    CHECK(v[0] == 0.4);
    CHECK(v[1] == 0.3);
    CHECK(v[2] == 0.2);
    CHECK(v[3] == 0.1);
}

TEST_CASE("degenerate spectrum") {
    // Unitary conjugation of diag(0.5, 0.5, 0, 0).
    std::mt19937_64 rng(9);
    const Eigensystem4 basis = hermitian4_eigensystem(random_hermitian(rng, 1.0));
    Matrix4c d;
    d(0, 0) = 0.5;
    d(1, 1) = 0.5;
    const Matrix4c m = basis.vectors * d * basis.vectors.adjoint();
    const auto v = hermitian4_eigenvalues(m);
    CHECK(v[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(v[2]) < 1e-12);
    CHECK(std::abs(v[3]) < 1e-12);
}

TEST_CASE("input validation") {
    Matrix4c m = Matrix4c::identity();
    m(0, 1) = 0.1;
    CHECK_THROWS_AS(hermitian4_eigensystem(m), DomainError);
    Matrix4c neg;
    neg(0, 0) = 1.1;
    neg(1, 1) = -0.1;
    CHECK_THROWS_AS(hermitian4_eigenvalues(neg), DomainError);
    Matrix4c tiny;
    tiny(0, 0) = 1.0;
    tiny(1, 1) = -1e-12;
    CHECK(hermitian4_eigenvalues(tiny)[3] == 0.0);
}
