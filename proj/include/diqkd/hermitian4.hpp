#pragma once

#include <array>
#include <complex>

namespace diqkd {

using Complex = std::complex<double>;

/// Dense 4x4 complex matrix, row-major.
struct Matrix4c {
    std::array<Complex, 16> a{};

    Complex& operator()(int r, int c) { return a[static_cast<std::size_t>(4 * r + c)]; }
    const Complex& operator()(int r, int c) const { return a[static_cast<std::size_t>(4 * r + c)]; }

    static Matrix4c identity();
    Matrix4c adjoint() const;
    Complex trace() const;
    friend Matrix4c operator*(const Matrix4c& x, const Matrix4c& y);
};

struct Eigensystem4 {
    std::array<double, 4> values{};  // descending
    Matrix4c vectors;                // column k pairs with values[k]
};

/// Largest |m(r,c) - conj(m(c,r))|.
double hermiticity_defect(const Matrix4c& m);

/// Cyclic complex Jacobi diagonalization of a Hermitian matrix. Sweeps until
/// the off-diagonal Frobenius norm drops below 1e-13 (scaled by the matrix
/// norm when that exceeds 1). Throws DomainError if `m` is not Hermitian to
/// within `tol`.
Eigensystem4 hermitian4_eigensystem(const Matrix4c& m, double tol = 1e-10);

/// Eigenvalues of a (density) matrix, descending. Values in (-tol, 0) are
/// clamped to 0; anything more negative, or a non-Hermitian input, throws
/// DomainError.
std::array<double, 4> hermitian4_eigenvalues(const Matrix4c& m, double tol = 1e-10);

}  // namespace diqkd
