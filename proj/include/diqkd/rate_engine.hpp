#pragma once

// Key rates of the three protocol variants, their optimization over source,
// settings and noise at fixed detection efficiency, and the efficiency
// threshold for a positive rate.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diqkd/entropy.hpp"
#include "diqkd/spdc.hpp"

namespace diqkd {

enum class Protocol { kPironio09, kMa12, kNoisyPreprocessing };
enum class SourceKind { kSpdc, kPerfectQubit };

std::string to_string(Protocol p);
std::string to_string(SourceKind s);

struct ProtocolSpec {
    Protocol variant = Protocol::kNoisyPreprocessing;
    SourceKind source = SourceKind::kSpdc;
    /// Noise parameter for NoisyPreprocessing; nullopt means "optimize".
    /// Ignored (forced to 0) by the other two variants.
    std::optional<double> fixed_p;

    EcVariant ec_variant() const {
        return variant == Protocol::kPironio09 ? EcVariant::kBinary : EcVariant::kFourValued;
    }
    bool optimizes_p() const { return variant == Protocol::kNoisyPreprocessing && !fixed_p; }
    /// Throws DomainError for a fixed p outside [0, 0.5).
    void validate() const;
};

/// One point of the search space. For the qubit source `theta` is the state
/// angle and only the `angle` fields of the settings are used; `src` is ignored.
struct ParameterPoint {
    SqueezedSourceParams src;
    MeasurementSetting a0, a1, a2, b1, b2;
    double p = 0.0;
    double theta = 0.0;
};

struct RateResult {
    double chsh = 0.0;
    double ec_term = 0.0;
    double eve_term = 0.0;
    double rate = 0.0;  // 1 - eve_term - ec_term, unclamped
    ParameterPoint point;
    double eta = 0.0;
};

/// Evaluates the rate at a point. p is taken from the point for
/// NoisyPreprocessing (from fixed_p if set) and forced to 0 otherwise. S < 2
/// certifies nothing: eve_term = 1. Within 1e-12 of S = 2 the rate is capped
/// at 0, which rounding could otherwise exceed by ~1e-14.
RateResult key_rate(const ProtocolSpec& spec, const ParameterPoint& point, double eta,
                    double dark_count = 0.0);

struct OptimizerOptions {
    int restarts = 32;
    int max_evals = 2000;
    double x_tol = 1e-9;
    double f_tol = 1e-12;
    int n_min = 1;
    int n_max = 8;
    std::uint64_t seed = 1;
    /// 0 means hardware concurrency.
    unsigned threads = 0;
    double eta_tol = 5e-4;
    /// A rate counts as positive only above this value.
    double positive_rate = 1e-8;
    double t_max = 0.9;
    double p_max = 0.45;
    double dark_count = 0.0;

    /// Throws DomainError on out-of-range fields.
    void validate() const;
};

/// Multi-start Nelder-Mead per mode count N, restarts seeded by a shifted
/// Halton sequence. Deterministic for a given seed regardless of threads.
/// `warm_start`, if given, is used as one extra start for every N.
RateResult optimize_rate(const ProtocolSpec& spec, double eta, const OptimizerOptions& opts,
                         const ParameterPoint* warm_start = nullptr);

struct BisectionStep {
    double eta = 0.0;
    double rate = 0.0;
};

struct ThresholdResult {
    double eta = 0.0;
    RateResult witness;  // optimized point at the returned eta
    std::vector<BisectionStep> trace;
};

/// Smallest eta (to opts.eta_tol) with an optimized rate above
/// opts.positive_rate. Throws InfeasibleError if eta = 1 is not positive.
ThresholdResult threshold_efficiency(const ProtocolSpec& spec, const OptimizerOptions& opts);

/// optimize_rate over a grid, each point warm-started from the previous
/// argmax. Results are ordered by eta.
std::vector<RateResult> rate_curve(const ProtocolSpec& spec, std::vector<double> eta_grid,
                                   const OptimizerOptions& opts);

}  // namespace diqkd
