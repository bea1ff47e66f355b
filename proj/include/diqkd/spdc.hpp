#pragma once

// Click statistics of a polarization-entangled SPDC source measured with
// two threshold (non photon-number-resolving) detectors per party, and of an
// ideal two-qubit source with lossy detection for comparison.
//
// Detector indices: A = 0, A_perp = 1 (Alice), B = 2, B_perp = 3 (Bob).
// A local click pattern is a 2-bit mask: bit 0 = main detector clicked,
// bit 1 = perpendicular detector clicked.

#include <array>
#include <cstdint>

#include "diqkd/entropy.hpp"
#include "diqkd/hermitian4.hpp"

namespace diqkd {

enum Detector : int { kDetA = 0, kDetAPerp = 1, kDetB = 2, kDetBPerp = 3 };

enum class LocalPattern : int { kNone = 0, kMain = 1, kPerp = 2, kBoth = 3 };

/// Two-mode squeezing amplitudes T = tanh(g) for the a^dag b_perp^dag and
/// a_perp^dag b^dag terms, and the number N of independent mode pairs.
struct SqueezedSourceParams {
    double t_g = 0.0;
    double t_gbar = 0.0;
    int modes = 1;

    static SqueezedSourceParams from_squeezing(double g, double gbar, int modes);
    double g() const;
    double gbar() const;
    /// Throws DomainError unless 0 <= T < 1 for both and modes >= 1.
    void validate() const;
};

struct DetectionModel {
    std::array<double, 4> efficiency{1.0, 1.0, 1.0, 1.0};
    std::array<double, 4> dark_count{0.0, 0.0, 0.0, 0.0};

    static DetectionModel uniform(double eta, double dark_count = 0.0);
    double loss(int detector) const { return 1.0 - efficiency[static_cast<std::size_t>(detector)]; }
    void validate() const;
};

/// Polarization rotation before the beam splitter: mixing angle and phase.
struct MeasurementSetting {
    double angle = 0.0;
    double phase = 0.0;
};

using Matrix2c = std::array<Complex, 4>;  // row-major

/// Outcome probabilities of one setting pair, indexed by
/// (Alice pattern, Bob pattern).
class JointOutcomeDistribution {
public:
    JointOutcomeDistribution() = default;
    JointOutcomeDistribution(std::array<double, 16> p, MeasurementSetting a, MeasurementSetting b);

    double operator()(LocalPattern a, LocalPattern b) const {
        return p_[static_cast<std::size_t>(4 * static_cast<int>(a) + static_cast<int>(b))];
    }
    const std::array<double, 16>& values() const { return p_; }
    MeasurementSetting alice_setting() const { return a_; }
    MeasurementSetting bob_setting() const { return b_; }

    std::array<double, 4> alice_marginal() const;
    std::array<double, 4> bob_marginal() const;

    /// 4x4 table, rows = Alice pattern, columns = Bob pattern.
    DistributionTable table() const;

private:
    std::array<double, 16> p_{};
    MeasurementSetting a_;
    MeasurementSetting b_;
};

/// Coupling matrix M of the measured state exp((A^dag, A_perp^dag) M (B^dag, B_perp^dag)^T)|0>.
Matrix2c coupling_matrix(const SqueezedSourceParams& src, const MeasurementSetting& a,
                         const MeasurementSetting& b);

/// Singular values of a 2x2 matrix, descending.
std::array<double, 2> singular_values(const Matrix2c& m);

/// Probability that every detector in `silent_mask` (bit d = detector d)
/// stays silent. Throws UnnormalizableStateError if a scaled singular value
/// reaches 1.
double noclick_probability(unsigned silent_mask, const SqueezedSourceParams& src,
                           const DetectionModel& det, const MeasurementSetting& a,
                           const MeasurementSetting& b);

/// All 16 click-pattern probabilities by inclusion-exclusion over the
/// no-click probabilities.
JointOutcomeDistribution joint_outcome_distribution(const SqueezedSourceParams& src,
                                                    const DetectionModel& det,
                                                    const MeasurementSetting& a,
                                                    const MeasurementSetting& b);

// -- binning ---------------------------------------------------------------
//
// Binary outcomes are stored as index 0 <-> +1 and index 1 <-> -1. An outcome
// table row/column with local index 1 (the "designated detector clicked
// alone" event for SPDC, the "-1 result" event for the qubit source) bins
// to -1, every other local outcome to +1.

inline constexpr std::size_t kBinnedMinusIndex = 1;

inline std::size_t bin_index(std::size_t local_outcome) {
    return local_outcome == kBinnedMinusIndex ? 1 : 0;
}

/// Bins both parties: 2x2 table indexed (Alice bit, Bob bit).
DistributionTable binarize(const DistributionTable& joint);
DistributionTable binarize(const JointOutcomeDistribution& joint);

/// Bins Bob only: rows stay Alice's local outcomes, columns become Bob's bit.
DistributionTable binarize_bob(const DistributionTable& joint);

/// <A B> = p(equal) - p(different) for a binned 2x2 table.
double correlator(const DistributionTable& binned);

struct ChshSettings {
    MeasurementSetting a1, a2, b1, b2;
};

/// S = E11 + E12 + E21 - E22 from binned SPDC statistics.
double chsh_score(const SqueezedSourceParams& src, const DetectionModel& det, const ChshSettings& s);

enum class EcVariant { kFourValued, kBinary };

/// Applies Bob's flip with probability p to a table whose columns are Bob's bit.
DistributionTable flip_bob_bit(const DistributionTable& a_vs_bit, double p);

/// Error-correction cost from the (A0 outcome, Bob raw outcome) table:
/// four-valued (keeps Alice's local outcomes): H(B1_hat | A0);
/// binary: h(Q) with Q = p(A0 bit != B1_hat bit).
double error_correction_from_table(const DistributionTable& a0_b1, const NoiseParam& p, EcVariant variant);

double error_correction_term(const SqueezedSourceParams& src, const DetectionModel& det,
                             const MeasurementSetting& a0, const MeasurementSetting& b1,
                             const NoiseParam& p, EcVariant variant);

/// Symmetrization with a public uniform bit T: returns the table over
/// rows (a, t) = 2 a + t and columns b' = b xor t, from a table over (a, b bit).
DistributionTable symmetrize_key_bit(const DistributionTable& a_vs_bit);

// -- ideal two-qubit source ------------------------------------------------

/// Local outcomes for the qubit source: 0 = no click, 1 = result -1, 2 = result +1.
inline constexpr std::size_t kQubitNoClick = 0;
inline constexpr std::size_t kQubitMinus = 1;
inline constexpr std::size_t kQubitPlus = 2;

/// State cos(theta)|00> + sin(theta)|11>, measurements cos(angle) Z + sin(angle) X;
/// each party detects independently with probability eta. Returns the 3x3
/// table over (Alice outcome, Bob outcome).
DistributionTable qubit_source_distribution(double theta, double alice_angle, double bob_angle, double eta);

/// CHSH score of the qubit source with no-click binned to +1.
double qubit_chsh_score(double theta, double eta, double a1, double a2, double b1, double b2);

}  // namespace diqkd
