#include "diqkd/entropy.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "diqkd/errors.hpp"

namespace diqkd {

namespace {

double clamp_probability(double z, const char* what) {
    if (!(z >= -kProbabilitySlack && z <= 1.0 + kProbabilitySlack)) {
        std::ostringstream os;
        os << what << ": probability " << z << " outside [0,1]";
        throw DomainError(os.str());
    }
    return std::clamp(z, 0.0, 1.0);
}

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

NoiseParam::NoiseParam(double p) : p_(p) {
    if (!(p >= 0.0 && p <= 0.5)) {
        std::ostringstream os;
        os << "noise parameter p=" << p << " outside [0, 0.5]";
        throw DomainError(os.str());
    }
}

DistributionTable::DistributionTable(std::size_t rows, std::size_t cols,
                                     std::vector<double> probabilities, double sum_tol)
    : rows_(rows), cols_(cols), p_(std::move(probabilities)) {
    if (rows_ * cols_ != p_.size() || p_.empty())
        throw DomainError("distribution table: shape does not match entry count");
    for (double& v : p_) {
        if (v < -kProbabilitySlack || !std::isfinite(v)) {
            std::ostringstream os;
            os << "distribution table: negative entry " << v;
            throw DomainError(os.str());
        }
        v = std::max(v, 0.0);
    }
    const double total = std::accumulate(p_.begin(), p_.end(), 0.0);
    if (std::abs(total - 1.0) > sum_tol) {
        std::ostringstream os;
        os << "distribution table: entries sum to " << total;
        throw DomainError(os.str());
    }
}

DistributionTable DistributionTable::single(std::vector<double> probabilities, double sum_tol) {
    const std::size_t n = probabilities.size();
    return DistributionTable(1, n, std::move(probabilities), sum_tol);
}

std::vector<double> DistributionTable::row_marginal() const {
    std::vector<double> m(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m[r] += (*this)(r, c);
    return m;
}

std::vector<double> DistributionTable::col_marginal() const {
    std::vector<double> m(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) m[c] += (*this)(r, c);
    return m;
}

double binary_entropy(double z) {
    z = clamp_probability(z, "binary_entropy");
    return -xlog2x(z) - xlog2x(1.0 - z);
}

double n_q(double z, double q) {
    z = clamp_probability(z, "n_q");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("n_q: q outside [0,1]");
    const double radicand = 1.0 - 4.0 * (1.0 - q) * z * (1.0 - z);
    return 0.5 * (1.0 + std::sqrt(std::max(radicand, 0.0)));
}

double h_q(double z, double q) { return binary_entropy(z) - binary_entropy(n_q(z, q)); }

double eve_info_bound(double chsh, double p) {
    if (!(chsh >= 2.0 - kChshSlack && chsh <= kTsirelson + kChshSlack)) {
        std::ostringstream os;
        os << "eve_info_bound: CHSH score " << chsh << " outside [2, 2 sqrt 2]";
        throw DomainError(os.str());
    }
    if (!(p >= 0.0 && p <= 0.5)) throw DomainError("eve_info_bound: p outside [0, 0.5]");
    const double s = std::clamp(chsh, 2.0, kTsirelson);
    const double first = 0.5 * (1.0 + std::sqrt(std::max(0.25 * s * s - 1.0, 0.0)));
    const double second =
        0.5 * (1.0 + std::sqrt(std::max(1.0 - p * (1.0 - p) * (8.0 - s * s), 0.0)));
    // Rounding can leave a -1e-17 residue when both arguments coincide.
    return std::max(binary_entropy(first) - binary_entropy(second), 0.0);
}

double shannon_entropy(std::span<const double> probabilities) {
    double h = 0.0;
    for (double v : probabilities) {
        if (v < -kProbabilitySlack) throw DomainError("shannon_entropy: negative probability");
        h -= xlog2x(std::max(v, 0.0));
    }
    return h;
}

double shannon_entropy(const DistributionTable& dist) { return shannon_entropy(dist.values()); }

double conditional_entropy(const DistributionTable& joint) {
    const auto marg = joint.row_marginal();
    return shannon_entropy(joint.values()) - shannon_entropy(marg);
}

}  // namespace diqkd
