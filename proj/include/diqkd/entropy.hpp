#pragma once

// Scalar entropy functions (all in bits) and the closed-form bound on the
// adversary's information as a function of the CHSH score and the noisy
// pre-processing flip probability.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace diqkd {

inline constexpr double kTsirelson = 2.0 * std::numbers::sqrt2;

/// Slack below 0 (or above 1) tolerated for probabilities before they are
/// treated as a domain error; values inside the slack are clamped.
inline constexpr double kProbabilitySlack = 1e-12;

/// Slack on the CHSH score used by the bound; scores within it are clamped.
inline constexpr double kChshSlack = 1e-9;

/// Flip probability p of noisy pre-processing, with q = (1-2p)^2.
class NoiseParam {
public:
    NoiseParam() = default;

    /// Throws DomainError unless 0 <= p <= 0.5.
    explicit NoiseParam(double p);

    double p() const { return p_; }
    double q() const { return (1.0 - 2.0 * p_) * (1.0 - 2.0 * p_); }

private:
    double p_ = 0.0;
};

/// Row-major probability table over one or two finite variables.
/// A single-variable distribution is a table with one row.
class DistributionTable {
public:
    DistributionTable() = default;

    /// Validates nonnegativity (entries in (-1e-12, 0) clamped to 0) and
    /// normalization to within `sum_tol`.
    DistributionTable(std::size_t rows, std::size_t cols, std::vector<double> probabilities,
                      double sum_tol = kProbabilitySlack);

    static DistributionTable single(std::vector<double> probabilities,
                                    double sum_tol = kProbabilitySlack);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double operator()(std::size_t r, std::size_t c) const { return p_[r * cols_ + c]; }
    std::span<const double> values() const { return p_; }

    /// Marginal over rows (first variable) and columns (second variable).
    std::vector<double> row_marginal() const;
    std::vector<double> col_marginal() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> p_;
};

/// h(z) = -z log2 z - (1-z) log2(1-z).
double binary_entropy(double z);

/// n_q(z) = (1 + sqrt(1 - 4(1-q) z(1-z))) / 2, in [1/2, 1].
double n_q(double z, double q);

/// h_q(z) = h(z) - h(n_q(z)).
double h_q(double z, double q);

/// Closed-form upper bound I_p(S) on the adversary's information about the
/// noisy key bit, valid for 2 <= S <= 2 sqrt 2 and 0 <= p <= 1/2.
double eve_info_bound(double chsh, double p);

/// -sum p_i log2 p_i over all table entries.
double shannon_entropy(const DistributionTable& dist);
double shannon_entropy(std::span<const double> probabilities);

/// H(B|A) for a joint table indexed (a, b).
double conditional_entropy(const DistributionTable& joint);

}  // namespace diqkd
