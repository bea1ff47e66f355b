#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diqkd/rate_engine.hpp"

namespace diqkd::cli {

enum ExitCode : int { kOk = 0, kRuntimeError = 1, kConfigError = 2, kVerificationFailed = 3 };

struct RunConfig {
    std::vector<Protocol> protocols;  // empty: command default
    SourceKind source = SourceKind::kSpdc;
    std::optional<double> eta;
    double eta_min = 0.80;
    double eta_max = 1.0;
    int eta_steps = 20;
    std::string p = "opt";  // "opt" or a number
    OptimizerOptions optimizer;
    std::string out;
    std::string suite = "all";
    bool verbose = false;
};

/// Noise setting for a protocol: nullopt when p is optimized.
std::optional<double> fixed_noise(const RunConfig& cfg);

/// Evenly spaced grid from eta_min to eta_max inclusive.
std::vector<double> eta_grid(const RunConfig& cfg);

/// Writes curve rows in the CSV schema, sorted by (protocol name, eta).
void write_curve_csv(std::ostream& os, std::vector<std::pair<Protocol, RateResult>> rows, SourceKind source);

int cmd_rate(const RunConfig& cfg);
int cmd_threshold(const RunConfig& cfg);
int cmd_curve(const RunConfig& cfg);
int cmd_verify(const RunConfig& cfg);

}  // namespace diqkd::cli
