#include "diqkd/hermitian4.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "diqkd/errors.hpp"

namespace diqkd {

Matrix4c Matrix4c::identity() {
    Matrix4c m;
    for (int i = 0; i < 4; ++i) m(i, i) = 1.0;
    return m;
}

Matrix4c Matrix4c::adjoint() const {
    Matrix4c m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) m(r, c) = std::conj((*this)(c, r));
    return m;
}

Complex Matrix4c::trace() const { return (*this)(0, 0) + (*this)(1, 1) + (*this)(2, 2) + (*this)(3, 3); }

Matrix4c operator*(const Matrix4c& x, const Matrix4c& y) {
    Matrix4c m;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            Complex s = 0.0;
            for (int k = 0; k < 4; ++k) s += x(r, k) * y(k, c);
            m(r, c) = s;
        }
    return m;
}

double hermiticity_defect(const Matrix4c& m) {
    double worst = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = r; c < 4; ++c) worst = std::max(worst, std::abs(m(r, c) - std::conj(m(c, r))));
    return worst;
}

namespace {

double off_diagonal_norm(const Matrix4c& m) {
    double s = 0.0;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            if (r != c) s += std::norm(m(r, c));
    return std::sqrt(s);
}

double frobenius_norm(const Matrix4c& m) {
    double s = 0.0;
    for (const auto& v : m.a) s += std::norm(v);
    return std::sqrt(s);
}

// Annihilates a(p,q) with the unitary U = diag-phase * real rotation acting on
// the (p,q) plane: a <- U^H a U, v <- v U.
void rotate(Matrix4c& a, Matrix4c& v, int p, int q) {
    const Complex apq = a(p, q);
    const double mag = std::abs(apq);
    if (mag == 0.0) return;
    const Complex phase = apq / mag;  // e^{i theta}

    const double app = a(p, p).real();
    const double aqq = a(q, q).real();
    const double theta = (aqq - app) / (2.0 * mag);
    const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    // U restricted to (p,q): [[c, s], [-s e^{-i theta}, c e^{-i theta}]]
    const Complex upp = c;
    const Complex upq = s;
    const Complex uqp = -s * std::conj(phase);
    const Complex uqq = c * std::conj(phase);

    // a <- a U (columns p, q)
    for (int k = 0; k < 4; ++k) {
        const Complex akp = a(k, p);
        const Complex akq = a(k, q);
        a(k, p) = akp * upp + akq * uqp;
        a(k, q) = akp * upq + akq * uqq;
        const Complex vkp = v(k, p);
        const Complex vkq = v(k, q);
        v(k, p) = vkp * upp + vkq * uqp;
        v(k, q) = vkp * upq + vkq * uqq;
    }
    // a <- U^H a (rows p, q)
    for (int k = 0; k < 4; ++k) {
        const Complex apk = a(p, k);
        const Complex aqk = a(q, k);
        a(p, k) = std::conj(upp) * apk + std::conj(uqp) * aqk;
        a(q, k) = std::conj(upq) * apk + std::conj(uqq) * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;
    a(p, p) = a(p, p).real();
    a(q, q) = a(q, q).real();
}

}  // namespace

Eigensystem4 hermitian4_eigensystem(const Matrix4c& m, double tol) {
    const double defect = hermiticity_defect(m);
    if (!(defect <= tol)) {
        std::ostringstream os;
        os << "hermitian4_eigensystem: matrix not Hermitian (defect " << defect << ")";
        throw DomainError(os.str());
    }
    Matrix4c a = m;
    // Symmetrize so rounding in the input does not bias the rotations.
    for (int r = 0; r < 4; ++r) {
        a(r, r) = a(r, r).real();
        for (int c = r + 1; c < 4; ++c) {
            const Complex avg = 0.5 * (a(r, c) + std::conj(a(c, r)));
            a(r, c) = avg;
            a(c, r) = std::conj(avg);
        }
    }
    Matrix4c v = Matrix4c::identity();
    const double threshold = 1e-13 * std::max(1.0, frobenius_norm(a));

    constexpr int kMaxSweeps = 64;
    for (int sweep = 0; sweep < kMaxSweeps && off_diagonal_norm(a) > threshold; ++sweep)
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 4; ++q) rotate(a, v, p, q);

    std::array<int, 4> order{0, 1, 2, 3};
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return a(x, x).real() > a(y, y).real(); });
    Eigensystem4 out;
    for (int k = 0; k < 4; ++k) {
        out.values[static_cast<std::size_t>(k)] = a(order[k], order[k]).real();
        for (int r = 0; r < 4; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

std::array<double, 4> hermitian4_eigenvalues(const Matrix4c& m, double tol) {
    auto values = hermitian4_eigensystem(m, tol).values;
    for (double& x : values) {
        if (x < -tol) {
            std::ostringstream os;
            os << "hermitian4_eigenvalues: eigenvalue " << x << " below -" << tol;
            throw DomainError(os.str());
        }
        x = std::max(x, 0.0);
    }
    return values;
}

}  // namespace diqkd
