#include "diqkd/eve_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "diqkd/errors.hpp"
#include "diqkd/nelder_mead.hpp"

namespace diqkd {

BellDiagonalWeights::BellDiagonalWeights(std::array<double, 4> weights) : l_(weights) {
    double total = 0.0;
    for (double& v : l_) {
        if (!(v >= -kProbabilitySlack)) {
            std::ostringstream os;
            os << "Bell-diagonal weight " << v << " is negative";
            throw DomainError(os.str());
        }
        v = std::max(v, 0.0);
        total += v;
    }
    if (std::abs(total - 1.0) > kProbabilitySlack) {
        std::ostringstream os;
        os << "Bell-diagonal weights sum to " << total;
        throw DomainError(os.str());
    }
    if (l_[0] < l_[1] - kProbabilitySlack || l_[2] < l_[3] - kProbabilitySlack)
        throw DomainError("Bell-diagonal weights violate L1 >= L2, L3 >= L4");
}

BellDiagonalWeights BellDiagonalWeights::from_pxy(double big_p, double x, double y) {
    return BellDiagonalWeights({big_p * x, (1.0 - big_p) * y, big_p * (1.0 - x),
                                (1.0 - big_p) * (1.0 - y)});
}

double bell_chsh(const BellDiagonalWeights& l) {
    const double d12 = l[0] - l[1];
    const double d34 = l[2] - l[3];
    return kTsirelson * std::sqrt(d12 * d12 + d34 * d34);
}

Matrix4c eve_conditional_state_q(const BellDiagonalWeights& l, double q, double phi, int outcome) {
    const double sq = std::sqrt(q) * (outcome >= 0 ? 1.0 : -1.0);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const double r1 = std::sqrt(l[0]);
    const double r2 = std::sqrt(l[1]);
    const double r3 = std::sqrt(l[2]);
    const double r4 = std::sqrt(l[3]);

    Matrix4c m;
    for (int i = 0; i < 4; ++i) m(i, i) = l[static_cast<std::size_t>(i)];
    m(0, 2) = m(2, 0) = r1 * r3 * sq * c;
    m(0, 3) = m(3, 0) = r1 * r4 * sq * s;
    m(1, 2) = m(2, 1) = r2 * r3 * sq * s;
    m(1, 3) = m(3, 1) = -r2 * r4 * sq * c;
    return m;
}

Matrix4c eve_conditional_state(const BellDiagonalWeights& l, const NoiseParam& p, double phi) {
    return eve_conditional_state_q(l, p.q(), phi, +1);
}

CharPolyCoefficients characteristic_polynomial(const BellDiagonalWeights& l, double q, double c) {
    const double l1 = l[0], l2 = l[1], l3 = l[2], l4 = l[3];
    CharPolyCoefficients k;
    k.a0 = l1 * l2 * l3 * l4 * (q - 1.0) * (q - 1.0);
    k.a1 = -(l1 * l2 * l3 + l2 * l4 * l3 + l1 * l2 * l4 + l1 * l3 * l4) * (1.0 - q);
    k.a2 = (l1 * l2 + l3 * l2 + l4 * l2 + l1 * l3 + l1 * l4 + l3 * l4) -
           0.5 * (l1 + l2) * (l3 + l4) * q - 0.5 * (l1 - l2) * (l3 - l4) * q * c;
    return k;
}

double eve_conditional_entropy(const BellDiagonalWeights& l, double q, double c) {
    if (!(q > 0.0 && q <= 1.0)) throw DomainError("eve_conditional_entropy: q outside (0, 1]");
    if (!(c >= -1.0 - 1e-12 && c <= 1.0 + 1e-12))
        throw DomainError("eve_conditional_entropy: C outside [-1, 1]");
    const double phi = 0.5 * std::acos(std::clamp(c, -1.0, 1.0));
    const auto values = hermitian4_eigenvalues(eve_conditional_state_q(l, q, phi));
    return shannon_entropy(values);
}

double eve_information(const BellDiagonalWeights& l, const NoiseParam& p, double c) {
    if (p.p() >= 0.5) return 0.0;
    return shannon_entropy(l.values()) - eve_conditional_entropy(l, p.q(), c);
}

namespace {

struct Candidate {
    double value = -std::numeric_limits<double>::infinity();
    double big_p = 1.0, x = 1.0, y = 0.0, c = 1.0;
};

// Keeps x inside the ordering window (1-P) y <= P x <= (1-P) y + 2P - 1.
double clamp_ordering(double big_p, double x, double y) {
    const double lo = (1.0 - big_p) * y / big_p;
    const double hi = lo + (2.0 * big_p - 1.0) / big_p;
    return std::clamp(x, lo, std::min(hi, 1.0));
}

// Smallest mixture t in [0,1] of L with (1,0,0,0) reaching the CHSH target.
// With a = L1-L2, b = L3-L4 the score of (1-t) L + t e1 is
// 2 sqrt2 sqrt((a + t(1-a))^2 + (b(1-t))^2), a convex quadratic under the root.
BellDiagonalWeights repair_chsh(const BellDiagonalWeights& l, double target) {
    if (bell_chsh(l) >= target) return l;
    const double a = l[0] - l[1];
    const double b = l[2] - l[3];
    const double need = (target / kTsirelson) * (target / kTsirelson);
    // f(t) = A t^2 + B t + C0 - need
    const double qa = (1.0 - a) * (1.0 - a) + b * b;
    const double qb = 2.0 * a * (1.0 - a) - 2.0 * b * b;
    const double qc = a * a + b * b - need;
    double t = 1.0;
    if (qa > 0.0) {
        const double disc = std::max(qb * qb - 4.0 * qa * qc, 0.0);
        t = std::clamp((-qb + std::sqrt(disc)) / (2.0 * qa), 0.0, 1.0);
    }
    std::array<double, 4> w{};
    for (std::size_t i = 0; i < 4; ++i) w[i] = (1.0 - t) * l[i];
    w[0] += t;
    // Land on the feasible side despite rounding in the root.
    for (int guard = 0; guard < 64; ++guard) {
        BellDiagonalWeights cand(w);
        if (bell_chsh(cand) >= target) return cand;
        t = std::min(1.0, t + std::ldexp(1e-15, guard));
        for (std::size_t i = 0; i < 4; ++i) w[i] = (1.0 - t) * l[i];
        w[0] += t;
    }
    return BellDiagonalWeights({1.0, 0.0, 0.0, 0.0});
}

BellDiagonalWeights weights_from_params(std::span<const double> v, double target) {
    const double big_p = std::clamp(v[0], 0.5, 1.0);
    const double y = std::clamp(v[2], 0.0, 1.0);
    const double x = clamp_ordering(big_p, std::clamp(v[1], 0.0, 1.0), y);
    return repair_chsh(BellDiagonalWeights::from_pxy(big_p, x, y), target);
}

void insert_top(std::vector<Candidate>& top, const Candidate& cand, std::size_t keep) {
    auto it = std::find_if(top.begin(), top.end(), [&](const Candidate& c) { return cand.value > c.value; });
    top.insert(it, cand);
    if (top.size() > keep) top.pop_back();
}

}  // namespace

OracleResult oracle_max_eve_info(double chsh, const NoiseParam& p, const OracleGrid& grid) {
    if (chsh > kTsirelson + kChshSlack) {
        std::ostringstream os;
        os << "oracle_max_eve_info: CHSH target " << chsh << " exceeds 2 sqrt 2";
        throw InfeasibleError(os.str());
    }
    if (chsh < 2.0 - kChshSlack) throw DomainError("oracle_max_eve_info: CHSH target below 2");
    const double target = std::clamp(chsh, 2.0, kTsirelson);

    OracleResult result;
    result.argmax_l = BellDiagonalWeights({1.0, 0.0, 0.0, 0.0});
    result.argmax_c = 1.0;
    result.argmax_chsh = kTsirelson;
    if (p.p() >= 0.5) return result;  // information vanishes identically

    const double q = p.q();
    auto info = [&](const BellDiagonalWeights& l, double c) {
        return shannon_entropy(l.values()) - eve_conditional_entropy(l, q, c);
    };

    auto axis = [](int n, double lo, double hi, int i) {
        return n <= 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    };

    const auto keep = static_cast<std::size_t>(std::max(grid.refine_starts, 1));
    unsigned workers = grid.threads ? grid.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(std::max(grid.p_points, 1)));

    // Each worker scans a disjoint set of P indices; merge keeps index order so
    // the outcome does not depend on the thread count.
    std::vector<std::vector<Candidate>> partial(workers);
    auto scan = [&](unsigned w) {
        auto& top = partial[w];
        for (int ip = static_cast<int>(w); ip < grid.p_points; ip += static_cast<int>(workers)) {
            const double big_p = axis(grid.p_points, 0.5, 1.0, ip);
            for (int iy = 0; iy < grid.y_points; ++iy) {
                const double y = axis(grid.y_points, 0.0, 1.0, iy);
                for (int ix = 0; ix < grid.x_points; ++ix) {
                    const double x = axis(grid.x_points, 0.0, 1.0, ix);
                    const double px = big_p * x;
                    if (px < (1.0 - big_p) * y || px > (1.0 - big_p) * y + 2.0 * big_p - 1.0) continue;
                    const auto l = BellDiagonalWeights::from_pxy(big_p, x, y);
                    if (bell_chsh(l) < target) continue;
                    for (int ic = 0; ic < grid.c_points; ++ic) {
                        const double c = axis(grid.c_points, -1.0, 1.0, ic);
                        insert_top(top, Candidate{info(l, c), big_p, x, y, c}, keep);
                    }
                }
            }
        }
    };
    if (workers == 1) {
        scan(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(scan, w);
        for (auto& t : pool) t.join();
    }
    std::vector<Candidate> top;
    for (const auto& part : partial)
        for (const auto& cand : part) insert_top(top, cand, keep);

    // Start from L = (1,0,0,0) as well: always feasible.
    if (top.empty()) top.push_back(Candidate{info(result.argmax_l, 1.0), 1.0, 1.0, 0.0, 1.0});

    auto objective = [&](std::span<const double> v) {
        const auto l = weights_from_params(v, target);
        return -info(l, std::clamp(v[3], -1.0, 1.0));
    };

    double best = -std::numeric_limits<double>::infinity();
    NelderMeadOptions opts;
    opts.max_evals = grid.refine_max_evals;
    opts.x_tol = 1e-10;
    opts.f_tol = 1e-14;
    const double step_p = 0.5 / std::max(grid.p_points - 1, 1);
    const double step_xy = 1.0 / std::max(grid.x_points - 1, 1);
    const std::array<double, 4> steps{step_p, step_xy, step_xy, 2.0 / std::max(grid.c_points - 1, 1)};
    for (const auto& cand : top) {
        std::vector<double> x0{cand.big_p, cand.x, cand.y, cand.c};
        // Step inward from the box faces so the simplex is not degenerate.
        std::array<double, 4> s = steps;
        if (x0[0] + s[0] > 1.0) s[0] = -s[0];
        if (x0[1] + s[1] > 1.0) s[1] = -s[1];
        if (x0[2] + s[2] > 1.0) s[2] = -s[2];
        if (x0[3] + s[3] > 1.0) s[3] = -s[3];
        auto res = nelder_mead_minimize(objective, x0, s, opts);
        const double value = std::max(-res.value, cand.value);
        if (value > best) {
            best = value;
            if (-res.value >= cand.value) {
                result.argmax_l = weights_from_params(res.x, target);
                result.argmax_c = std::clamp(res.x[3], -1.0, 1.0);
            } else {
                result.argmax_l = weights_from_params(x0, target);
                result.argmax_c = cand.c;
            }
        }
    }
    result.value = best;
    result.argmax_chsh = bell_chsh(result.argmax_l);
    return result;
}

std::vector<MonotonicityViolation> verify_monotonicity(const BellDiagonalWeights& l, double q,
                                                       int samples, double slack) {
    std::vector<MonotonicityViolation> violations;
    if (samples < 2) return violations;
    double prev_c = -1.0;
    double prev = eve_conditional_entropy(l, q, prev_c);
    for (int i = 1; i < samples; ++i) {
        const double c = -1.0 + 2.0 * static_cast<double>(i) / (samples - 1);
        const double cur = eve_conditional_entropy(l, q, c);
        if (cur - prev > slack) violations.push_back({prev_c, c, cur - prev});
        prev = cur;
        prev_c = c;
    }
    return violations;
}

}  // namespace diqkd
