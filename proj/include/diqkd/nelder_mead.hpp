#pragma once

// Derivative-free downhill simplex minimization plus a small quasi-random
// (Halton) generator used to seed multi-start runs.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace diqkd {

struct NelderMeadOptions {
    int max_evals = 2000;
    /// Stop once every vertex lies within x_tol of the best vertex (max norm)
    /// and the function spread is below f_tol.
    double x_tol = 1e-9;
    double f_tol = 1e-12;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int evals = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Minimizes `f` from `x0`; the initial simplex is x0 plus `steps[i]` along
/// each axis. Standard coefficients: reflection 1, expansion 2, contraction
/// 1/2, shrink 1/2.
NelderMeadResult nelder_mead_minimize(const Objective& f, std::vector<double> x0,
                                      std::span<const double> steps,
                                      const NelderMeadOptions& options = {});

/// Halton sequence in [0,1)^dim with a per-seed Cranley-Patterson shift so
/// different seeds give different but reproducible point sets.
class HaltonSequence {
public:
    HaltonSequence(std::size_t dim, std::uint64_t seed);

    std::vector<double> next();

private:
    std::size_t dim_;
    std::uint64_t index_ = 1;
    std::vector<double> shift_;
};

}  // namespace diqkd
