#include "diqkd/spdc.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "diqkd/errors.hpp"

namespace diqkd {

namespace {

constexpr double kSingularGuard = 1e-12;

}  // namespace

SqueezedSourceParams SqueezedSourceParams::from_squeezing(double g, double gbar, int modes) {
    SqueezedSourceParams s{std::tanh(g), std::tanh(gbar), modes};
    s.validate();
    return s;
}

double SqueezedSourceParams::g() const { return std::atanh(t_g); }
double SqueezedSourceParams::gbar() const { return std::atanh(t_gbar); }

void SqueezedSourceParams::validate() const {
    if (!(t_g >= 0.0 && t_g < 1.0 && t_gbar >= 0.0 && t_gbar < 1.0))
        throw DomainError("squeezed source: tanh(g) must lie in [0, 1)");
    if (modes < 1) throw DomainError("squeezed source: mode count must be >= 1");
}

DetectionModel DetectionModel::uniform(double eta, double dark_count) {
    DetectionModel d;
    d.efficiency.fill(eta);
    d.dark_count.fill(dark_count);
    d.validate();
    return d;
}

void DetectionModel::validate() const {
    for (double e : efficiency)
        if (!(e >= 0.0 && e <= 1.0)) throw DomainError("detection efficiency outside [0, 1]");
    for (double d : dark_count)
        if (!(d >= 0.0 && d < 1.0)) throw DomainError("dark-count probability outside [0, 1)");
}

JointOutcomeDistribution::JointOutcomeDistribution(std::array<double, 16> p, MeasurementSetting a,
                                                   MeasurementSetting b)
    : p_(p), a_(a), b_(b) {}

std::array<double, 4> JointOutcomeDistribution::alice_marginal() const {
    std::array<double, 4> m{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m[i] += p_[4 * i + j];
    return m;
}

std::array<double, 4> JointOutcomeDistribution::bob_marginal() const {
    std::array<double, 4> m{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) m[j] += p_[4 * i + j];
    return m;
}

DistributionTable JointOutcomeDistribution::table() const {
    return DistributionTable(4, 4, std::vector<double>(p_.begin(), p_.end()), 1e-10);
}

Matrix2c coupling_matrix(const SqueezedSourceParams& src, const MeasurementSetting& a,
                         const MeasurementSetting& b) {
    const double ca = std::cos(a.angle), sa = std::sin(a.angle);
    const double cb = std::cos(b.angle), sb = std::sin(b.angle);
    const Complex ea = std::polar(1.0, a.phase);  // e^{i phi_alpha}
    const Complex eb = std::polar(1.0, b.phase);
    const double tg = src.t_g, tb = src.t_gbar;
    return Matrix2c{
        tg * ca * sb * std::conj(eb) - tb * sa * std::conj(ea) * cb,
        -tg * ca * cb - tb * sa * std::conj(ea) * sb * eb,
        tg * sa * ea * sb * std::conj(eb) + tb * ca * cb,
        -tg * sa * ea * cb + tb * ca * sb * eb,
    };
}

std::array<double, 2> singular_values(const Matrix2c& m) {
    // Gram matrix G = M^H M has eigenvalues sigma^2 = t/2 +- sqrt(t^2/4 - det G).
    const double tr = std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3]);
    const double det = std::norm(m[0] * m[3] - m[1] * m[2]);
    const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    const double hi = 0.5 * tr + disc;
    const double lo = std::max(0.5 * tr - disc, 0.0);
    return {std::sqrt(hi), std::sqrt(lo)};
}

namespace {

// (1 - s1^2)(1 - s2^2) of a 2x2 matrix, with the unnormalizable-state guard.
double vacuum_overlap_denominator(const Matrix2c& m) {
    const double tr = std::norm(m[0]) + std::norm(m[1]) + std::norm(m[2]) + std::norm(m[3]);
    const double det = std::norm(m[0] * m[3] - m[1] * m[2]);
    const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    const double hi = 0.5 * tr + disc;
    if (hi >= 1.0 - kSingularGuard) {
        std::ostringstream os;
        os << "coupling singular value^2 " << hi << " too close to 1";
        throw UnnormalizableStateError(os.str());
    }
    // (1 - s1^2)(1 - s2^2) = 1 - tr + det, evaluated without cancellation
    // between the two factors.
    return 1.0 - tr + det;
}

double noclick_from_matrix(unsigned silent_mask, const Matrix2c& m, double norm, int modes,
                           const DetectionModel& det) {
    double sr[4];
    double dark = 1.0;
    for (int d = 0; d < 4; ++d) {
        if (silent_mask & (1u << d)) {
            sr[d] = std::sqrt(det.loss(d));
            dark *= 1.0 - det.dark_count[static_cast<std::size_t>(d)];
        } else {
            sr[d] = 1.0;
        }
    }
    const Matrix2c scaled{m[0] * (sr[kDetA] * sr[kDetB]), m[1] * (sr[kDetA] * sr[kDetBPerp]),
                          m[2] * (sr[kDetAPerp] * sr[kDetB]), m[3] * (sr[kDetAPerp] * sr[kDetBPerp])};
    const double ratio = norm / vacuum_overlap_denominator(scaled);
    double out = 1.0;
    for (int k = 0; k < modes; ++k) out *= ratio;
    return dark * out;
}

}  // namespace

double noclick_probability(unsigned silent_mask, const SqueezedSourceParams& src,
                           const DetectionModel& det, const MeasurementSetting& a,
                           const MeasurementSetting& b) {
    src.validate();
    if (silent_mask > 15u) throw DomainError("noclick_probability: detector mask out of range");
    const double norm = (1.0 - src.t_g * src.t_g) * (1.0 - src.t_gbar * src.t_gbar);
    return noclick_from_matrix(silent_mask, coupling_matrix(src, a, b), norm, src.modes, det);
}

JointOutcomeDistribution joint_outcome_distribution(const SqueezedSourceParams& src,
                                                    const DetectionModel& det,
                                                    const MeasurementSetting& a,
                                                    const MeasurementSetting& b) {
    src.validate();
    const Matrix2c m = coupling_matrix(src, a, b);
    const double norm = (1.0 - src.t_g * src.t_g) * (1.0 - src.t_gbar * src.t_gbar);

    // f[S] starts as P(all detectors in S silent); the Moebius transform over
    // supersets turns it into P(exactly the detectors in S silent).
    std::array<double, 16> f{};
    for (unsigned mask = 0; mask < 16; ++mask) f[mask] = noclick_from_matrix(mask, m, norm, src.modes, det);
    for (unsigned bit = 1; bit < 16; bit <<= 1)
        for (unsigned mask = 0; mask < 16; ++mask)
            if (!(mask & bit)) f[mask] -= f[mask | bit];

    std::array<double, 16> p{};
    for (unsigned silent = 0; silent < 16; ++silent) {
        double v = f[silent];
        if (v < -1e-10) {
            std::ostringstream os;
            os << "joint_outcome_distribution: negative probability " << v;
            throw DomainError(os.str());
        }
        v = std::max(v, 0.0);
        const unsigned clicked = ~silent & 15u;
        const unsigned alice = clicked & 3u;
        const unsigned bob = (clicked >> 2) & 3u;
        p[4 * alice + bob] = v;
    }
    return JointOutcomeDistribution(p, a, b);
}

DistributionTable binarize(const DistributionTable& joint) {
    std::vector<double> out(4, 0.0);
    for (std::size_t r = 0; r < joint.rows(); ++r)
        for (std::size_t c = 0; c < joint.cols(); ++c) out[2 * bin_index(r) + bin_index(c)] += joint(r, c);
    return DistributionTable(2, 2, std::move(out), 1e-10);
}

DistributionTable binarize(const JointOutcomeDistribution& joint) { return binarize(joint.table()); }

DistributionTable binarize_bob(const DistributionTable& joint) {
    std::vector<double> out(joint.rows() * 2, 0.0);
    for (std::size_t r = 0; r < joint.rows(); ++r)
        for (std::size_t c = 0; c < joint.cols(); ++c) out[2 * r + bin_index(c)] += joint(r, c);
    return DistributionTable(joint.rows(), 2, std::move(out), 1e-10);
}

double correlator(const DistributionTable& binned) {
    return binned(0, 0) + binned(1, 1) - binned(0, 1) - binned(1, 0);
}

double chsh_score(const SqueezedSourceParams& src, const DetectionModel& det, const ChshSettings& s) {
    auto e = [&](const MeasurementSetting& a, const MeasurementSetting& b) {
        return correlator(binarize(joint_outcome_distribution(src, det, a, b)));
    };
    return e(s.a1, s.b1) + e(s.a1, s.b2) + e(s.a2, s.b1) - e(s.a2, s.b2);
}

DistributionTable flip_bob_bit(const DistributionTable& a_vs_bit, double p) {
    std::vector<double> out(a_vs_bit.rows() * 2);
    for (std::size_t r = 0; r < a_vs_bit.rows(); ++r) {
        out[2 * r] = (1.0 - p) * a_vs_bit(r, 0) + p * a_vs_bit(r, 1);
        out[2 * r + 1] = (1.0 - p) * a_vs_bit(r, 1) + p * a_vs_bit(r, 0);
    }
    return DistributionTable(a_vs_bit.rows(), 2, std::move(out), 1e-10);
}

double error_correction_from_table(const DistributionTable& a0_b1, const NoiseParam& p, EcVariant variant) {
    const DistributionTable noisy = flip_bob_bit(binarize_bob(a0_b1), p.p());
    if (variant == EcVariant::kFourValued) return conditional_entropy(noisy);
    double qber = 0.0;
    for (std::size_t r = 0; r < noisy.rows(); ++r) qber += noisy(r, 1 - bin_index(r));
    return binary_entropy(std::clamp(qber, 0.0, 1.0));
}

double error_correction_term(const SqueezedSourceParams& src, const DetectionModel& det,
                             const MeasurementSetting& a0, const MeasurementSetting& b1,
                             const NoiseParam& p, EcVariant variant) {
    return error_correction_from_table(joint_outcome_distribution(src, det, a0, b1).table(), p, variant);
}

DistributionTable symmetrize_key_bit(const DistributionTable& a_vs_bit) {
    std::vector<double> out(a_vs_bit.rows() * 4);
    for (std::size_t a = 0; a < a_vs_bit.rows(); ++a)
        for (std::size_t t = 0; t < 2; ++t)
            for (std::size_t b = 0; b < 2; ++b) out[4 * a + 2 * t + (b ^ t)] = 0.5 * a_vs_bit(a, b);
    return DistributionTable(a_vs_bit.rows() * 2, 2, std::move(out), 1e-10);
}

DistributionTable qubit_source_distribution(double theta, double alice_angle, double bob_angle, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("qubit source: eta outside [0, 1]");
    const double c2 = std::cos(2.0 * theta);
    const double s2 = std::sin(2.0 * theta);
    const double ea = c2 * std::cos(alice_angle);
    const double eb = c2 * std::cos(bob_angle);
    const double eab = std::cos(alice_angle) * std::cos(bob_angle) + s2 * std::sin(alice_angle) * std::sin(bob_angle);

    std::vector<double> p(9, 0.0);
    const double both = eta * eta;
    const double one = eta * (1.0 - eta);
    const std::array<std::pair<std::size_t, double>, 2> results{{{kQubitMinus, -1.0}, {kQubitPlus, 1.0}}};
    for (const auto& [ia, va] : results) {
        for (const auto& [ib, vb] : results)
            p[3 * ia + ib] = both * std::max(0.0, 0.25 * (1.0 + va * ea + vb * eb + va * vb * eab));
        p[3 * ia + kQubitNoClick] = one * 0.5 * (1.0 + va * ea);
        p[3 * kQubitNoClick + ia] = one * 0.5 * (1.0 + va * eb);
    }
    p[3 * kQubitNoClick + kQubitNoClick] = (1.0 - eta) * (1.0 - eta);
    return DistributionTable(3, 3, std::move(p), 1e-10);
}

double qubit_chsh_score(double theta, double eta, double a1, double a2, double b1, double b2) {
    auto e = [&](double a, double b) { return correlator(binarize(qubit_source_distribution(theta, a, b, eta))); };
    return e(a1, b1) + e(a1, b2) + e(a2, b1) - e(a2, b2);
}

}  // namespace diqkd
