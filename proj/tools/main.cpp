// diqkd: key rates, efficiency thresholds, rate curves and verification
// suites for DIQKD with an SPDC source or an ideal two-qubit source.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "diqkd/errors.hpp"
#include "run_config.hpp"

using namespace diqkd;
using namespace diqkd::cli;

namespace {

const std::map<std::string, Protocol> kProtocolNames{
    {"pironio", Protocol::kPironio09}, {"ma", Protocol::kMa12}, {"noisy", Protocol::kNoisyPreprocessing}};
const std::map<std::string, SourceKind> kSourceNames{{"spdc", SourceKind::kSpdc}, {"qubit", SourceKind::kPerfectQubit}};

// Accepts "opt" or a number in [0, 0.5).
std::string validate_p(const std::string& s) {
    if (s == "opt") return {};
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) return "--p must be 'opt' or a number";
        if (!(v >= 0.0 && v < 0.5)) return "--p must lie in [0, 0.5)";
    } catch (const std::exception&) {
        return "--p must be 'opt' or a number";
    }
    return {};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Device-independent QKD key rates with SPDC sources"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Flat 'key = value' file ('#' comments); flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);

    RunConfig cfg;
    std::vector<std::string> protocol_names;
    std::string source_name = "spdc";
    double eta = -1.0;
    int threads = -1;

    app.add_option("--protocol", protocol_names, "pironio | ma | noisy (curve: repeatable, default all)")
        ->check(CLI::IsMember({"pironio", "ma", "noisy"}))
        ->delimiter(',');
    app.add_option("--source", source_name, "spdc | qubit")->check(CLI::IsMember({"spdc", "qubit"}))->capture_default_str();
    app.add_option("--eta", eta, "Detection efficiency (rate)")->check(CLI::Range(0.0, 1.0));
    app.add_option("--eta-min", cfg.eta_min, "Curve grid start")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    app.add_option("--eta-max", cfg.eta_max, "Curve grid end")->check(CLI::Range(0.0, 1.0))->capture_default_str();
    app.add_option("--eta-steps", cfg.eta_steps, "Curve grid points")->check(CLI::Range(1, 100000))->capture_default_str();
    app.add_option("--p", cfg.p, "Noise flip probability for 'noisy': a value in [0, 0.5) or 'opt'")
        ->check(validate_p)
        ->capture_default_str();
    app.add_option("--n-max", cfg.optimizer.n_max, "Largest mode count N in the sweep")
        ->check(CLI::Range(1, 64))
        ->capture_default_str();
    app.add_option("--seed", cfg.optimizer.seed, "Optimizer seed")->capture_default_str();
    app.add_option("--restarts", cfg.optimizer.restarts, "Nelder-Mead restarts per N")
        ->check(CLI::Range(1, 100000))
        ->capture_default_str();
    app.add_option("--max-evals", cfg.optimizer.max_evals, "Evaluations per restart")
        ->check(CLI::Range(1, 100000000))
        ->capture_default_str();
    app.add_option("--eta-tol", cfg.optimizer.eta_tol, "Threshold bisection tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_option("--positive-rate", cfg.optimizer.positive_rate, "Smallest rate counted as positive")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    app.add_option("--dark-count", cfg.optimizer.dark_count, "Dark-count probability per detector (SPDC)")
        ->check(CLI::Range(0.0, 0.999999))
        ->capture_default_str();
    app.add_option("--out", cfg.out, "Output file");
    app.add_option("--threads", threads, "Worker threads (default: DIQKD_THREADS, else all cores)")
        ->check(CLI::Range(1, 4096));
    app.add_option("--suite", cfg.suite, "verify: bound-tightness | monotonicity | soundness | fock-oracle | symmetrization | all")
        ->check(CLI::IsMember({"bound-tightness", "monotonicity", "soundness", "fock-oracle", "symmetrization", "all"}))
        ->capture_default_str();
    app.add_flag("--verbose", cfg.verbose, "Echo the effective configuration and progress to stderr");

    auto* rate = app.add_subcommand("rate", "Optimized key rate at one efficiency");
    auto* threshold = app.add_subcommand("threshold", "Smallest efficiency with a positive key rate");
    auto* curve = app.add_subcommand("curve", "Optimized rate curves as CSV");
    auto* verify = app.add_subcommand("verify", "Run property suites");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    for (const auto& name : protocol_names) cfg.protocols.push_back(kProtocolNames.at(name));
    cfg.source = kSourceNames.at(source_name);
    if (eta >= 0.0) cfg.eta = eta;
    if (threads < 0) {
        if (const char* env = std::getenv("DIQKD_THREADS")) {
            try {
                threads = std::stoi(env);
            } catch (const std::exception&) {
                threads = -1;
            }
            if (threads < 1) {
                std::cerr << "error: DIQKD_THREADS must be a positive integer\n";
                return kConfigError;
            }
        }
    }
    cfg.optimizer.threads = threads > 0 ? static_cast<unsigned>(threads) : 0u;

    auto config_error = [](const std::string& msg) {
        std::cerr << "error: " << msg << '\n';
        return kConfigError;
    };
    if (*rate && !cfg.eta) return config_error("rate needs --eta");
    if ((*rate || *threshold) && cfg.protocols.size() > 1) return config_error("give a single --protocol");
    if (*curve && cfg.eta_min > cfg.eta_max) return config_error("--eta-min exceeds --eta-max");
    if (cfg.optimizer.n_max < cfg.optimizer.n_min) return config_error("--n-max must be >= 1");

    if (cfg.verbose) std::cerr << "# effective configuration\n" << app.config_to_str(true, false);

    try {
        if (*rate) return cmd_rate(cfg);
        if (*threshold) return cmd_threshold(cfg);
        if (*curve) return cmd_curve(cfg);
        if (*verify) return cmd_verify(cfg);
    } catch (const InfeasibleError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kRuntimeError;
}
