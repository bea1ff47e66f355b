#include "diqkd/nelder_mead.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace diqkd {

NelderMeadResult nelder_mead_minimize(const Objective& f, std::vector<double> x0,
                                      std::span<const double> steps,
                                      const NelderMeadOptions& options) {
    const std::size_t n = x0.size();
    if (steps.size() != n) throw std::invalid_argument("nelder_mead: step size mismatch");

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];

    NelderMeadResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evals;
        const double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);

    auto point_along = [&](double coeff, std::vector<double>& out, std::size_t worst) {
        for (std::size_t j = 0; j < n; ++j)
            out[j] = centroid[j] + coeff * (simplex[worst][j] - centroid[j]);
    };

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second_worst = order[n - 1];

        double x_spread = 0.0;
        double f_spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            f_spread = std::max(f_spread, std::abs(fv[i] - fv[best]));
            for (std::size_t j = 0; j < n; ++j)
                x_spread = std::max(x_spread, std::abs(simplex[i][j] - simplex[best][j]));
        }
        if (x_spread <= options.x_tol && f_spread <= options.f_tol) {
            result.converged = true;
            break;
        }
        if (result.evals >= options.max_evals) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        point_along(-1.0, trial, worst);
        const double f_reflect = eval(trial);
        if (f_reflect < fv[best]) {
            point_along(-2.0, trial2, worst);
            const double f_expand = eval(trial2);
            if (f_expand < f_reflect) {
                simplex[worst] = trial2;
                fv[worst] = f_expand;
            } else {
                simplex[worst] = trial;
                fv[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < fv[second_worst]) {
            simplex[worst] = trial;
            fv[worst] = f_reflect;
            continue;
        }
        // Contraction: outside if the reflected point beats the worst vertex.
        const bool outside = f_reflect < fv[worst];
        point_along(outside ? -0.5 : 0.5, trial2, worst);
        const double f_contract = eval(trial2);
        if (f_contract < (outside ? f_reflect : fv[worst])) {
            simplex[worst] = trial2;
            fv[worst] = f_contract;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            fv[i] = eval(simplex[i]);
        }
    }

    const auto best_it = std::min_element(fv.begin(), fv.end());
    const auto idx = static_cast<std::size_t>(best_it - fv.begin());
    result.x = simplex[idx];
    result.value = *best_it;
    return result;
}

namespace {

constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t i, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

}  // namespace

HaltonSequence::HaltonSequence(std::size_t dim, std::uint64_t seed) : dim_(dim), shift_(dim) {
    if (dim > kPrimes.size()) throw std::invalid_argument("HaltonSequence: dimension too large");
    std::mt19937_64 rng(seed);
    // Explicit 53-bit mapping keeps the shift identical across standard libraries.
    for (double& s : shift_) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> HaltonSequence::next() {
    std::vector<double> x(dim_);
    for (std::size_t d = 0; d < dim_; ++d) {
        const double v = radical_inverse(index_, kPrimes[d]) + shift_[d];
        x[d] = v - std::floor(v);
    }
    ++index_;
    return x;
}

}  // namespace diqkd
