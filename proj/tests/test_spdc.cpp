#include <cmath>
#include <numbers>
#include <random>

#include "diqkd/errors.hpp"
#include "diqkd/nelder_mead.hpp"
#include "diqkd/spdc.hpp"
#include "doctest.h"
#include "fock_oracle.hpp"

using namespace diqkd;

namespace {

constexpr double kPi = std::numbers::pi;

double h_ref(double z) {
    double s = 0.0;
    if (z > 0.0) s -= z * std::log(z);
    if (z < 1.0) s -= (1.0 - z) * std::log(1.0 - z);
    return s / std::log(2.0);
}

struct Draw {
    SqueezedSourceParams src;
    DetectionModel det;
    MeasurementSetting a, b;
};

Draw random_draw(std::mt19937_64& rng, int max_modes = 4) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Draw d;
    d.src = SqueezedSourceParams{0.6 * u(rng), 0.6 * u(rng), 1 + static_cast<int>(u(rng) * max_modes)};
    for (std::size_t k = 0; k < 4; ++k) {
        d.det.efficiency[k] = 0.5 + 0.5 * u(rng);
        d.det.dark_count[k] = 1e-3 * u(rng);
    }
    d.a = {2 * kPi * u(rng), 2 * kPi * u(rng)};
    d.b = {2 * kPi * u(rng), 2 * kPi * u(rng)};
    return d;
}

}  // namespace

TEST_CASE("coupling matrix examples") {
    for (const Complex& v : coupling_matrix({0.0, 0.0, 1}, {0.4, 0.2}, {1.1, 0.0})) CHECK(v == Complex(0.0));
    const Matrix2c m = coupling_matrix({0.3, 0.2, 1}, {}, {});
    CHECK(std::abs(m[0]) == 0.0);
    CHECK(m[1] == Complex(-0.3));
    CHECK(m[2] == Complex(0.2));
    CHECK(std::abs(m[3]) == 0.0);
    const auto sv = singular_values(m);
    CHECK(sv[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(sv[1] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("coupling matrix has the source singular values for any setting") {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200; ++i) {
        const Draw d = random_draw(rng);
        const auto sv = singular_values(coupling_matrix(d.src, d.a, d.b));
        CHECK(sv[0] == doctest::Approx(std::max(d.src.t_g, d.src.t_gbar)).epsilon(1e-12));
        CHECK(sv[1] == doctest::Approx(std::min(d.src.t_g, d.src.t_gbar)).epsilon(1e-10));
    }
}

TEST_CASE("no-click probabilities") {
    std::mt19937_64 rng(2);
    for (int i = 0; i < 200; ++i) {
        const Draw d = random_draw(rng);
        CHECK(noclick_probability(0, d.src, d.det, d.a, d.b) == doctest::Approx(1.0).epsilon(1e-10));
        for (unsigned s = 0; s < 16; ++s)
            CHECK(noclick_probability(s, {0.0, 0.0, 3}, DetectionModel::uniform(0.8), d.a, d.b) ==
                  doctest::Approx(1.0).epsilon(1e-15));
    }
    const double tg = 0.4, eta = 0.7;
    const double expect = (1 - tg * tg) / (1 - (1 - eta) * tg * tg);
    CHECK(noclick_probability(1u << kDetA, {tg, 0.0, 1}, DetectionModel::uniform(eta), {}, {}) ==
          doctest::Approx(expect).epsilon(1e-14));
    CHECK_THROWS_AS(noclick_probability(16, {tg, 0.0, 1}, DetectionModel::uniform(eta), {}, {}), DomainError);
}

TEST_CASE("source and detector validation") {
    CHECK_THROWS_AS(SqueezedSourceParams({1.0, 0.0, 1}).validate(), DomainError);
    CHECK_THROWS_AS(SqueezedSourceParams({0.2, 0.0, 0}).validate(), DomainError);
    CHECK_THROWS_AS(DetectionModel::uniform(1.2), DomainError);
    CHECK_THROWS_AS(DetectionModel::uniform(0.5, 1.0), DomainError);
    const auto s = SqueezedSourceParams::from_squeezing(0.3, 0.1, 2);
    CHECK(s.t_g == doctest::Approx(std::tanh(0.3)));
    CHECK(s.g() == doctest::Approx(0.3));
}

TEST_CASE("singular value guard") {
    // A scaled matrix can never exceed the unscaled singular values, so the
    // guard only fires when the source itself is at the edge.
    const SqueezedSourceParams edge{1.0 - 1e-13, 0.0, 1};
    CHECK_THROWS_AS(noclick_probability(0, edge, DetectionModel::uniform(1.0), {}, {}), UnnormalizableStateError);
}

TEST_CASE("joint distribution basics") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 300; ++i) {
        const Draw d = random_draw(rng);
        const auto j = joint_outcome_distribution(d.src, d.det, d.a, d.b);
        double total = 0.0;
        for (double v : j.values()) {
            CHECK(v >= 0.0);
            total += v;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
    const auto vac = joint_outcome_distribution({0.0, 0.0, 1}, DetectionModel::uniform(1.0), {}, {});
    CHECK(vac(LocalPattern::kNone, LocalPattern::kNone) == 1.0);

    const double tg = 0.3;
    const auto j = joint_outcome_distribution({tg, 0.0, 1}, DetectionModel::uniform(1.0), {}, {});
    CHECK(j(LocalPattern::kMain, LocalPattern::kPerp) == doctest::Approx(tg * tg).epsilon(1e-14));
    CHECK(j(LocalPattern::kNone, LocalPattern::kNone) == doctest::Approx(1 - tg * tg).epsilon(1e-14));
}

TEST_CASE("agreement with the Fock-space simulation") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) {
        const SqueezedSourceParams src{std::tanh(0.3 * u(rng)), std::tanh(0.3 * u(rng)), 1};
        DetectionModel det = DetectionModel::uniform(i % 2 ? 1.0 : 0.7);
        if (i % 4 == 3) det.dark_count = {1e-3, 2e-3, 0.0, 5e-4};
        const MeasurementSetting a{2 * kPi * u(rng), i % 3 ? 0.0 : u(rng)};
        const MeasurementSetting b{2 * kPi * u(rng), i % 3 ? 0.0 : u(rng)};
        const auto fock = oracle::fock_joint_distribution(src, det, a, b);
        const auto fast = joint_outcome_distribution(src, det, a, b).values();
        for (std::size_t k = 0; k < 16; ++k) worst = std::max(worst, std::abs(fock[k] - fast[k]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("no signalling") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const Draw d = random_draw(rng);
        const MeasurementSetting other{2 * kPi * u(rng), 0.0};
        const auto ma = joint_outcome_distribution(d.src, d.det, d.a, d.b).alice_marginal();
        const auto ma2 = joint_outcome_distribution(d.src, d.det, d.a, other).alice_marginal();
        const auto mb = joint_outcome_distribution(d.src, d.det, d.a, d.b).bob_marginal();
        const auto mb2 = joint_outcome_distribution(d.src, d.det, other, d.b).bob_marginal();
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(ma[k] - ma2[k]) < 1e-10);
            CHECK(std::abs(mb[k] - mb2[k]) < 1e-10);
        }
    }
}

TEST_CASE("binning") {
    const auto vac = joint_outcome_distribution({0.0, 0.0, 1}, DetectionModel::uniform(1.0), {}, {});
    const auto bv = binarize(vac);
    CHECK(bv(0, 0) == 1.0);

    // Mass on (A alone, B_perp alone) counts as (-1, +1).
    const double tg = 0.3;
    const auto b = binarize(joint_outcome_distribution({tg, 0.0, 1}, DetectionModel::uniform(1.0), {}, {}));
    CHECK(b(1, 0) == doctest::Approx(tg * tg).epsilon(1e-14));
    CHECK(b(1, 1) == 0.0);

    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        const Draw d = random_draw(rng);
        const auto j = joint_outcome_distribution(d.src, d.det, d.a, d.b);
        const auto bt = binarize(j);
        const auto ma = j.alice_marginal();
        const auto mb = j.bob_marginal();
        CHECK(bt.row_marginal()[1] == doctest::Approx(ma[1]).epsilon(1e-14));
        CHECK(bt.col_marginal()[1] == doctest::Approx(mb[1]).epsilon(1e-14));
    }
}

TEST_CASE("CHSH score bounds and trivial cases") {
    ChshSettings s{{0.1, 0}, {0.9, 0}, {0.4, 0}, {1.3, 0}};
    CHECK(chsh_score({0.3, 0.3, 2}, DetectionModel::uniform(0.0), s) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(chsh_score({0.0, 0.0, 2}, DetectionModel::uniform(0.9), s) == doctest::Approx(2.0).epsilon(1e-14));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        const Draw d = random_draw(rng);
        const ChshSettings set{d.a, {2 * kPi * u(rng), 0}, d.b, {2 * kPi * u(rng), 0}};
        CHECK(std::abs(chsh_score(d.src, d.det, set)) <= kTsirelson + 1e-9);
    }
}

TEST_CASE("optimized CHSH does not decrease with efficiency") {
    const SqueezedSourceParams src{0.25, 0.2, 1};
    std::vector<double> x{0.0, kPi / 4, kPi / 8, -kPi / 8};
    double prev = -4.0;
    for (int i = 0; i <= 10; ++i) {
        const double eta = 0.5 + 0.05 * i;
        const DetectionModel det = DetectionModel::uniform(eta);
        auto f = [&](std::span<const double> v) {
            return -chsh_score(src, det, ChshSettings{{v[0], 0}, {v[1], 0}, {v[2], 0}, {v[3], 0}});
        };
        double best = 4.0;
        std::vector<double> best_x = x;
        for (int r = 0; r < 4; ++r) {
            std::vector<double> x0 = x;
            for (double& v : x0) v += 0.2 * r;
            const std::vector<double> steps(4, 0.3);
            const auto res = nelder_mead_minimize(f, x0, steps);
            if (res.value < best) {
                best = res.value;
                best_x = res.x;
            }
        }
        x = best_x;
        CHECK(-best >= prev - 1e-9);
        prev = -best;
    }
}

TEST_CASE("error-correction term") {
    const SqueezedSourceParams src{0.3, 0.25, 2};
    const MeasurementSetting a0{0.2, 0}, b1{0.5, 0};
    CHECK(error_correction_term(src, DetectionModel::uniform(0.8), a0, b1, NoiseParam(0.5), EcVariant::kFourValued) ==
          doctest::Approx(1.0).epsilon(1e-14));
    for (double p : {0.0, 0.1, 0.3})
        CHECK(error_correction_term(src, DetectionModel::uniform(0.0), a0, b1, NoiseParam(p), EcVariant::kFourValued) ==
              doctest::Approx(h_ref(p)).epsilon(1e-12));
    // Perfectly correlated bits: Q = 0.
    const DistributionTable corr(2, 3, {0.5, 0.0, 0.0, 0.0, 0.5, 0.0});
    CHECK(error_correction_from_table(corr, NoiseParam(0.0), EcVariant::kBinary) == 0.0);
}

TEST_CASE("finer A0 never costs more than the QBER") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const Draw d = random_draw(rng);
        const NoiseParam p(0.5 * u(rng));
        const double four = error_correction_term(d.src, d.det, d.a, d.b, p, EcVariant::kFourValued);
        const double bin = error_correction_term(d.src, d.det, d.a, d.b, p, EcVariant::kBinary);
        CHECK(four <= bin + 1e-12);
        CHECK(four >= h_ref(p.p()) - 1e-12);
    }
}

TEST_CASE("symmetrization leaves the conditional entropy unchanged") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 300; ++i) {
        const Draw d = random_draw(rng);
        const double p = 0.5 * u(rng);
        const auto joint = joint_outcome_distribution(d.src, d.det, d.a, d.b).table();
        const auto noisy = flip_bob_bit(binarize_bob(joint), p);
        const auto sym = symmetrize_key_bit(noisy);
        CHECK(std::abs(conditional_entropy(sym) - conditional_entropy(noisy)) < 1e-12);
        const auto marg = sym.col_marginal();
        CHECK(marg[0] == doctest::Approx(0.5).epsilon(1e-14));
        // Flipping commutes with the symmetrizing relabelling.
        const auto other = flip_bob_bit(symmetrize_key_bit(binarize_bob(joint)), p);
        for (std::size_t k = 0; k < sym.values().size(); ++k) CHECK(std::abs(sym.values()[k] - other.values()[k]) < 1e-15);
    }
}

TEST_CASE("two-qubit source") {
    const double s_max = qubit_chsh_score(kPi / 4, 1.0, 0.0, kPi / 2, kPi / 4, -kPi / 4);
    CHECK(s_max == doctest::Approx(kTsirelson).epsilon(1e-14));
    CHECK(qubit_chsh_score(0.3, 0.0, 0.1, 0.7, 0.2, 1.4) == doctest::Approx(2.0).epsilon(1e-14));
    const double eta_star = 2.0 / (std::numbers::sqrt2 + 1.0);
    CHECK(std::abs(qubit_chsh_score(kPi / 4, eta_star, 0.0, kPi / 2, kPi / 4, -kPi / 4) - 2.0) < 1e-12);
    CHECK(qubit_chsh_score(kPi / 4, eta_star + 0.01, 0.0, kPi / 2, kPi / 4, -kPi / 4) > 2.0);
    CHECK(qubit_chsh_score(kPi / 4, eta_star - 0.01, 0.0, kPi / 2, kPi / 4, -kPi / 4) < 2.0);

    const auto t = qubit_source_distribution(0.4, 0.3, 1.2, 0.8);
    CHECK(t.rows() == 3);
    CHECK(t(kQubitNoClick, kQubitNoClick) == doctest::Approx(0.04));
    // Born-rule check for the detected block against a direct state-vector calculation.
    const double th = 0.4, al = 0.3, be = 1.2;
    const double psi[4] = {std::cos(th), 0.0, 0.0, std::sin(th)};
    auto eig = [](double angle, int sign) {
        // Eigenvector of cos(angle) Z + sin(angle) X for eigenvalue sign.
        return sign > 0 ? std::array<double, 2>{std::cos(angle / 2), std::sin(angle / 2)}
                        : std::array<double, 2>{-std::sin(angle / 2), std::cos(angle / 2)};
    };
    for (int sa : {-1, 1})
        for (int sb : {-1, 1}) {
            const auto va = eig(al, sa), vb = eig(be, sb);
            double amp = 0.0;
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) amp += va[i] * vb[j] * psi[2 * i + j];
            const std::size_t ia = sa > 0 ? kQubitPlus : kQubitMinus, ib = sb > 0 ? kQubitPlus : kQubitMinus;
            CHECK(t(ia, ib) == doctest::Approx(0.64 * amp * amp).epsilon(1e-13));
        }
}
