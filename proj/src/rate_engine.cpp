#include "diqkd/rate_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "diqkd/errors.hpp"
#include "diqkd/nelder_mead.hpp"

namespace diqkd {

std::string to_string(Protocol p) {
    switch (p) {
        case Protocol::kPironio09: return "pironio";
        case Protocol::kMa12: return "ma";
        case Protocol::kNoisyPreprocessing: return "noisy";
    }
    return "?";
}

std::string to_string(SourceKind s) { return s == SourceKind::kSpdc ? "spdc" : "qubit"; }

void ProtocolSpec::validate() const {
    if (fixed_p && !(*fixed_p >= 0.0 && *fixed_p < 0.5))
        throw DomainError("protocol: fixed p must lie in [0, 0.5)");
}

void OptimizerOptions::validate() const {
    if (restarts < 1) throw DomainError("optimizer: restarts must be >= 1");
    if (max_evals < 1) throw DomainError("optimizer: max_evals must be >= 1");
    if (n_min < 1 || n_max < n_min) throw DomainError("optimizer: need 1 <= n_min <= n_max");
    if (!(eta_tol > 0.0)) throw DomainError("optimizer: eta_tol must be positive");
    if (!(t_max > 0.0 && t_max < 1.0)) throw DomainError("optimizer: t_max must lie in (0, 1)");
    if (!(p_max >= 0.0 && p_max < 0.5)) throw DomainError("optimizer: p_max must lie in [0, 0.5)");
    if (!(dark_count >= 0.0 && dark_count < 1.0)) throw DomainError("optimizer: dark_count must lie in [0, 1)");
}

namespace {

double effective_p(const ProtocolSpec& spec, const ParameterPoint& point) {
    if (spec.variant != Protocol::kNoisyPreprocessing) return 0.0;
    return spec.fixed_p ? *spec.fixed_p : point.p;
}

struct Terms {
    double chsh;
    double ec;
};

Terms statistics_terms(const ProtocolSpec& spec, const ParameterPoint& pt, double eta, double p,
                       double dark_count) {
    const NoiseParam noise(p);
    if (spec.source == SourceKind::kPerfectQubit) {
        const double s = qubit_chsh_score(pt.theta, eta, pt.a1.angle, pt.a2.angle, pt.b1.angle, pt.b2.angle);
        const DistributionTable key = qubit_source_distribution(pt.theta, pt.a0.angle, pt.b1.angle, eta);
        return {s, error_correction_from_table(key, noise, spec.ec_variant())};
    }
    const DetectionModel det = DetectionModel::uniform(eta, dark_count);
    const double s = chsh_score(pt.src, det, ChshSettings{pt.a1, pt.a2, pt.b1, pt.b2});
    return {s, error_correction_term(pt.src, det, pt.a0, pt.b1, noise, spec.ec_variant())};
}

// CHSH scores this close to 2 are local strategies up to rounding. There the
// rate is at most 0 since H(B_hat|A0) >= h(p) = 1 - I_p(2).
constexpr double kLocalChshRoundoff = 1e-12;

double rate_from_terms(double chsh, double eve, double ec) {
    const double rate = 1.0 - eve - ec;
    return chsh <= 2.0 + kLocalChshRoundoff ? std::min(rate, 0.0) : rate;
}

}  // namespace

RateResult key_rate(const ProtocolSpec& spec, const ParameterPoint& point, double eta, double dark_count) {
    spec.validate();
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("key_rate: eta outside [0, 1]");
    RateResult r;
    r.point = point;
    r.point.p = effective_p(spec, point);
    r.eta = eta;
    const Terms t = statistics_terms(spec, r.point, eta, r.point.p, dark_count);
    r.chsh = t.chsh;
    r.ec_term = t.ec;
    r.eve_term = t.chsh < 2.0 ? 1.0 : eve_info_bound(std::min(t.chsh, kTsirelson), r.point.p);
    r.rate = rate_from_terms(t.chsh, r.eve_term, r.ec_term);
    return r;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Search-space coordinates: [source (T_g, T_gbar) or (theta)], five angles, [p].
class SearchSpace {
public:
    SearchSpace(const ProtocolSpec& spec, const OptimizerOptions& opts, int modes)
        : spec_(spec), opts_(opts), modes_(modes) {}

    std::size_t source_dims() const { return spec_.source == SourceKind::kSpdc ? 2 : 1; }
    std::size_t dims() const { return source_dims() + 5 + (spec_.optimizes_p() ? 1 : 0); }

    ParameterPoint decode(std::span<const double> x) const {
        ParameterPoint pt;
        std::size_t i = 0;
        if (spec_.source == SourceKind::kSpdc) {
            pt.src.t_g = std::clamp(x[i++], 0.0, opts_.t_max);
            pt.src.t_gbar = std::clamp(x[i++], 0.0, opts_.t_max);
            pt.src.modes = modes_;
        } else {
            pt.theta = std::clamp(x[i++], 0.0, kPi / 4.0);
        }
        pt.a0.angle = x[i++];
        pt.a1.angle = x[i++];
        pt.a2.angle = x[i++];
        pt.b1.angle = x[i++];
        pt.b2.angle = x[i++];
        if (spec_.optimizes_p()) pt.p = std::clamp(x[i++], 0.0, opts_.p_max);
        return pt;
    }

    std::vector<double> encode(const ParameterPoint& pt) const {
        std::vector<double> x;
        if (spec_.source == SourceKind::kSpdc) {
            x.push_back(std::clamp(pt.src.t_g, 0.0, opts_.t_max));
            x.push_back(std::clamp(pt.src.t_gbar, 0.0, opts_.t_max));
        } else {
            x.push_back(std::clamp(pt.theta, 0.0, kPi / 4.0));
        }
        for (double a : {pt.a0.angle, pt.a1.angle, pt.a2.angle, pt.b1.angle, pt.b2.angle}) x.push_back(a);
        if (spec_.optimizes_p()) x.push_back(std::clamp(pt.p, 0.0, opts_.p_max));
        return x;
    }

    /// Maps a point of the unit cube onto the box.
    std::vector<double> from_unit(const std::vector<double>& u) const {
        std::vector<double> x(u.size());
        std::size_t i = 0;
        if (spec_.source == SourceKind::kSpdc) {
            x[i] = u[i] * opts_.t_max;
            ++i;
            x[i] = u[i] * opts_.t_max;
            ++i;
        } else {
            x[i] = u[i] * kPi / 4.0;
            ++i;
        }
        for (int k = 0; k < 5; ++k, ++i) x[i] = (2.0 * u[i] - 1.0) * kPi;
        if (spec_.optimizes_p()) x[i] = u[i] * opts_.p_max;
        return x;
    }

    std::vector<double> steps() const {
        std::vector<double> s;
        if (spec_.source == SourceKind::kSpdc) {
            s = {0.1, 0.1};
        } else {
            s = {0.1};
        }
        for (int k = 0; k < 5; ++k) s.push_back(0.3);
        if (spec_.optimizes_p()) s.push_back(0.05);
        return s;
    }

    /// Negated rate with a sloped replacement of the flat S < 2 region so
    /// the simplex can find its way toward a Bell violation. Always <= the
    /// true negated rate there, never used for reporting.
    double objective(std::span<const double> x, double eta) const {
        const ParameterPoint pt = decode(x);
        const double p = effective_p(spec_, pt);
        try {
            const Terms t = statistics_terms(spec_, pt, eta, p, opts_.dark_count);
            const double eve = t.chsh < 2.0 ? eve_info_bound(2.0, p) + (2.0 - t.chsh)
                                            : eve_info_bound(std::min(t.chsh, kTsirelson), p);
            return -rate_from_terms(t.chsh, eve, t.ec);
        } catch (const UnnormalizableStateError&) {
            return std::numeric_limits<double>::infinity();
        }
    }

private:
    const ProtocolSpec& spec_;
    const OptimizerOptions& opts_;
    int modes_;
};

unsigned worker_count(const OptimizerOptions& opts, std::size_t tasks) {
    unsigned w = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::size_t>(w, tasks));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Better of two results; ties keep the earlier one so the merge is order-stable.
bool better(const RateResult& a, const RateResult& b) { return a.rate > b.rate; }

}  // namespace

RateResult optimize_rate(const ProtocolSpec& spec, double eta, const OptimizerOptions& opts,
                         const ParameterPoint* warm_start) {
    spec.validate();
    opts.validate();
    if (!(eta >= 0.0 && eta <= 1.0)) throw DomainError("optimize_rate: eta outside [0, 1]");

    const bool spdc = spec.source == SourceKind::kSpdc;
    const int n_lo = spdc ? opts.n_min : 1;
    const int n_hi = spdc ? opts.n_max : 1;

    struct Task {
        int modes;
        std::vector<double> x0;
    };
    std::vector<Task> tasks;
    for (int n = n_lo; n <= n_hi; ++n) {
        const SearchSpace space(spec, opts, n);
        if (warm_start) {
            ParameterPoint w = *warm_start;
            w.src.modes = n;
            tasks.push_back({n, space.encode(w)});
        }
        HaltonSequence halton(space.dims(), mix_seed(opts.seed, static_cast<std::uint64_t>(n)));
        for (int r = 0; r < opts.restarts; ++r) tasks.push_back({n, space.from_unit(halton.next())});
    }

    NelderMeadOptions nm;
    nm.max_evals = opts.max_evals;
    nm.x_tol = opts.x_tol;
    nm.f_tol = opts.f_tol;

    std::vector<RateResult> results(tasks.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const SearchSpace space(spec, opts, tasks[i].modes);
            const auto steps = space.steps();
            const NelderMeadResult res = nelder_mead_minimize(
                [&](std::span<const double> x) { return space.objective(x, eta); }, tasks[i].x0, steps, nm);
            results[i] = key_rate(spec, space.decode(res.x), eta, opts.dark_count);
        }
    };
    const unsigned workers = worker_count(opts, tasks.size());
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    RateResult best = results.front();
    for (const auto& r : results)
        if (better(r, best)) best = r;
    return best;
}

ThresholdResult threshold_efficiency(const ProtocolSpec& spec, const OptimizerOptions& opts) {
    ThresholdResult out;
    RateResult hi_result = optimize_rate(spec, 1.0, opts);
    out.trace.push_back({1.0, hi_result.rate});
    if (!(hi_result.rate > opts.positive_rate)) {
        std::ostringstream os;
        os << "no positive key rate at eta = 1 (best " << hi_result.rate << ")";
        throw InfeasibleError(os.str());
    }

    // Below 1/2 no CHSH violation is possible for either source, so bisection
    // starts from [1/2, 1] after checking the lower end.
    double lo = 0.5;
    double hi = 1.0;
    const RateResult lo_result = optimize_rate(spec, lo, opts, &hi_result.point);
    out.trace.push_back({lo, lo_result.rate});
    if (lo_result.rate > opts.positive_rate) {
        hi = lo;
        hi_result = lo_result;
        lo = 0.0;
    }
    while (hi - lo > opts.eta_tol) {
        const double mid = 0.5 * (lo + hi);
        const RateResult r = optimize_rate(spec, mid, opts, &hi_result.point);
        out.trace.push_back({mid, r.rate});
        if (r.rate > opts.positive_rate) {
            hi = mid;
            hi_result = r;
        } else {
            lo = mid;
        }
    }
    out.eta = hi;
    out.witness = hi_result;
    return out;
}

std::vector<RateResult> rate_curve(const ProtocolSpec& spec, std::vector<double> eta_grid,
                                   const OptimizerOptions& opts) {
    for (double e : eta_grid)
        if (!(e >= 0.0 && e <= 1.0)) throw DomainError("rate_curve: eta outside [0, 1]");
    std::sort(eta_grid.begin(), eta_grid.end());
    std::vector<RateResult> out;
    out.reserve(eta_grid.size());
    for (double eta : eta_grid) {
        const ParameterPoint* warm = out.empty() ? nullptr : &out.back().point;
        out.push_back(optimize_rate(spec, eta, opts, warm));
    }
    return out;
}

}  // namespace diqkd
