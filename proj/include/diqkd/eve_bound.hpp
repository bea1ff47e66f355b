#pragma once

// Bell-diagonal adversary model: the purified Bell-diagonal state
// sum_i sqrt(L_i) |Phi_i>|i>_E with Bell basis order {Phi+, Psi-, Phi-, Psi+},
// Bob's key measurement cos(phi) Z + sin(phi) X followed by a flip with
// probability p, and the exact adversary information that results.
//
// The brute-force oracle maximizes that information over every admissible
// strategy so the closed-form eve_info_bound can be certified numerically.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "diqkd/entropy.hpp"
#include "diqkd/hermitian4.hpp"

namespace diqkd {

/// Weights over the Bell basis, with the ordering L1 >= L2 and L3 >= L4.
class BellDiagonalWeights {
public:
    BellDiagonalWeights() = default;

    /// Throws DomainError on negative weights, a sum off 1 by more than 1e-12,
    /// or a violated ordering.
    explicit BellDiagonalWeights(std::array<double, 4> weights);

    /// L1 = P x, L3 = P (1-x), L2 = (1-P) y, L4 = (1-P)(1-y).
    static BellDiagonalWeights from_pxy(double big_p, double x, double y);

    double operator[](std::size_t i) const { return l_[i]; }
    const std::array<double, 4>& values() const { return l_; }

private:
    std::array<double, 4> l_{1.0, 0.0, 0.0, 0.0};
};

/// Maximal CHSH score over Alice's and Bob's second setting:
/// 2 sqrt 2 sqrt((L1-L2)^2 + (L3-L4)^2).
double bell_chsh(const BellDiagonalWeights& l);

/// Adversary's normalized state conditioned on the noisy key bit +1.
Matrix4c eve_conditional_state(const BellDiagonalWeights& l, const NoiseParam& p, double phi);

/// Same state expressed through q = (1-2p)^2 directly; `outcome` = -1 flips
/// the sign of Bob's observable.
Matrix4c eve_conditional_state_q(const BellDiagonalWeights& l, double q, double phi,
                                 int outcome = +1);

/// Coefficients (a0, a1, a2) of det(x I - rho) = x^4 - x^3 + a2 x^2 + a1 x + a0
/// written in closed form from L, q and C = cos(2 phi).
struct CharPolyCoefficients {
    double a0 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
};
CharPolyCoefficients characteristic_polynomial(const BellDiagonalWeights& l, double q, double c);

/// Von Neumann entropy of the conditional state at phi = acos(C)/2. Requires
/// 0 < q <= 1 and -1 <= C <= 1.
double eve_conditional_entropy(const BellDiagonalWeights& l, double q, double c);

/// H(L) - eve_conditional_entropy(L, q, C). p = 1/2 returns 0 (the limit).
double eve_information(const BellDiagonalWeights& l, const NoiseParam& p, double c);

struct OracleGrid {
    int p_points = 64;
    int x_points = 64;
    int y_points = 64;
    /// Values of C sampled on the coarse grid; refinement treats C as free.
    int c_points = 5;
    int refine_starts = 5;
    int refine_max_evals = 4000;
    /// Worker threads for the grid scan; 0 means hardware concurrency.
    unsigned threads = 0;
};

struct OracleResult {
    double value = 0.0;
    BellDiagonalWeights argmax_l;
    double argmax_c = 1.0;
    double argmax_chsh = 0.0;
};

/// Maximizes eve_information over weights with bell_chsh(L) >= S and over
/// C in [-1, 1]: coarse grid over (P, x, y, C), then Nelder-Mead refinement
/// from the best grid points. Infeasible points met by the refinement are
/// pulled toward L = (1,0,0,0) until the CHSH constraint holds.
OracleResult oracle_max_eve_info(double chsh, const NoiseParam& p, const OracleGrid& grid = {});

struct MonotonicityViolation {
    double c_low = 0.0;
    double c_high = 0.0;
    double increase = 0.0;  // entropy(c_high) - entropy(c_low) > slack
};

/// Samples eve_conditional_entropy on an evenly spaced grid of C in [-1, 1]
/// and reports every step where the entropy increases by more than `slack`.
std::vector<MonotonicityViolation> verify_monotonicity(const BellDiagonalWeights& l, double q,
                                                       int samples = 101, double slack = 1e-10);

}  // namespace diqkd
