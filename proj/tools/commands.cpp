#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

#include "diqkd/errors.hpp"
#include "diqkd/eve_bound.hpp"
#include "fock_oracle.hpp"
#include "json.hpp"
#include "run_config.hpp"

namespace diqkd::cli {

namespace {

using nlohmann::ordered_json;

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

ProtocolSpec spec_for(const RunConfig& cfg, Protocol p) { return {p, cfg.source, fixed_noise(cfg)}; }

ordered_json point_json(const RateResult& r, SourceKind source) {
    const ParameterPoint& pt = r.point;
    ordered_json j;
    if (source == SourceKind::kSpdc) {
        j["g"] = pt.src.g();
        j["gbar"] = pt.src.gbar();
        j["N"] = pt.src.modes;
    } else {
        j["theta"] = pt.theta;
    }
    j["p"] = pt.p;
    j["alpha0"] = pt.a0.angle;
    j["alpha1"] = pt.a1.angle;
    j["alpha2"] = pt.a2.angle;
    j["beta1"] = pt.b1.angle;
    j["beta2"] = pt.b2.angle;
    return j;
}

ordered_json result_json(Protocol p, const RateResult& r, SourceKind source) {
    ordered_json j;
    j["protocol"] = to_string(p);
    j["source"] = to_string(source);
    j["eta"] = r.eta;
    j["S"] = r.chsh;
    j["ec_term"] = r.ec_term;
    j["eve_term"] = r.eve_term;
    j["rate"] = r.rate;
    j["point"] = point_json(r, source);
    return j;
}

// Prints to stdout and, if requested, to the --out file.
int emit(const RunConfig& cfg, const std::string& text) {
    std::cout << text << '\n';
    if (cfg.out.empty()) return kOk;
    std::ofstream f(cfg.out, std::ios::binary);
    if (!(f << text << '\n')) {
        std::cerr << "error: cannot write " << cfg.out << '\n';
        return kRuntimeError;
    }
    return kOk;
}

Protocol single_protocol(const RunConfig& cfg) {
    return cfg.protocols.empty() ? Protocol::kNoisyPreprocessing : cfg.protocols.front();
}

// -- verification suites ----------------------------------------------------

struct SuiteReport {
    std::string name;
    bool pass = true;
    std::string detail;
};

SuiteReport suite_bound_tightness(const RunConfig& cfg) {
    OracleGrid grid;
    grid.threads = cfg.optimizer.threads;
    const double res_l = 1.0 / (grid.x_points - 1);
    const double res_c = 2.0 / (grid.c_points - 1);
    double worst_gap = 0.0;
    double worst_l = 0.0;
    double worst_c = 0.0;
    for (double p : {0.0, 0.05, 0.15, 0.3}) {
        for (int i = 0; i < 25; ++i) {
            const double s = 2.0 + (kTsirelson - 2.0) * i / 24.0;
            const OracleResult r = oracle_max_eve_info(s, NoiseParam(p), grid);
            worst_gap = std::max(worst_gap, std::abs(r.value - eve_info_bound(s, p)));
            worst_l = std::max({worst_l, r.argmax_l[1], r.argmax_l[3]});
            // For a pure Bell state the information is 0 for every C.
            const auto& lv = r.argmax_l.values();
            if (*std::max_element(lv.begin(), lv.end()) < 1.0 - 1e-9) worst_c = std::max(worst_c, 1.0 - r.argmax_c);
            if (cfg.verbose)
                std::cerr << "  S=" << fmt12(s) << " p=" << p << " oracle=" << fmt12(r.value)
                          << " bound=" << fmt12(eve_info_bound(s, p)) << '\n';
        }
    }
    SuiteReport rep{"bound-tightness", worst_gap < 1e-5 && worst_l <= res_l && worst_c <= res_c, ""};
    std::ostringstream os;
    os << "max |oracle - bound| = " << worst_gap << " (limit 1e-5); max L2,L4 = " << worst_l
       << " (limit " << res_l << "); max 1-C = " << worst_c << " (limit " << res_c << ")";
    rep.detail = os.str();
    return rep;
}

BellDiagonalWeights random_weights(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::array<double, 4> w{};
    double total = 0.0;
    for (double& v : w) {
        v = -std::log(1.0 - u(rng));
        total += v;
    }
    for (double& v : w) v /= total;
    if (w[0] < w[1]) std::swap(w[0], w[1]);
    if (w[2] < w[3]) std::swap(w[2], w[3]);
    w[0] = 1.0 - w[1] - w[2] - w[3];
    return BellDiagonalWeights(w);
}

SuiteReport suite_monotonicity(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.optimizer.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t violations = 0;
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto l = random_weights(rng);
        const double q = 1.0 - u(rng);  // (0, 1]
        for (const auto& v : verify_monotonicity(l, q, 101, 1e-10)) {
            ++violations;
            worst = std::max(worst, v.increase);
        }
    }
    std::ostringstream os;
    os << violations << " violations over 1000 draws x 101 points (largest increase " << worst << ", slack 1e-10)";
    return {"monotonicity", violations == 0, os.str()};
}

SuiteReport suite_soundness(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.optimizer.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = -1.0;
    int tested = 0;
    while (tested < 100000) {
        const auto l = random_weights(rng);
        const double s = bell_chsh(l);
        if (s < 2.0) continue;
        ++tested;
        const NoiseParam p(0.5 * u(rng));
        const double c = std::cos(2.0 * std::numbers::pi * u(rng));
        worst = std::max(worst, eve_information(l, p, c) - eve_info_bound(s, p.p()));
    }
    std::ostringstream os;
    os << "max (information - bound) = " << worst << " over 1e5 draws (limit 1e-9)";
    return {"soundness", worst <= 1e-9, os.str()};
}

SuiteReport suite_fock(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.optimizer.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const SqueezedSourceParams src{std::tanh(0.3 * u(rng)), std::tanh(0.3 * u(rng)), 1};
        const DetectionModel det = DetectionModel::uniform(i % 2 ? 1.0 : 0.7);
        const MeasurementSetting a{2.0 * std::numbers::pi * u(rng), 0.0};
        const MeasurementSetting b{2.0 * std::numbers::pi * u(rng), 0.0};
        const auto fock = oracle::fock_joint_distribution(src, det, a, b, 20);
        const auto fast = joint_outcome_distribution(src, det, a, b).values();
        for (std::size_t k = 0; k < 16; ++k) worst = std::max(worst, std::abs(fock[k] - fast[k]));
    }
    std::ostringstream os;
    os << "max per-entry deviation = " << worst << " over 100 draws (limit 1e-8)";
    return {"fock-oracle", worst < 1e-8, os.str()};
}

SuiteReport suite_symmetrization(const RunConfig& cfg) {
    std::mt19937_64 rng(cfg.optimizer.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst_h = 0.0;
    double worst_m = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const SqueezedSourceParams src{0.6 * u(rng), 0.6 * u(rng), 1 + i % 4};
        const DetectionModel det = DetectionModel::uniform(0.5 + 0.5 * u(rng));
        const MeasurementSetting a{2.0 * std::numbers::pi * u(rng), 0.0};
        const MeasurementSetting b{2.0 * std::numbers::pi * u(rng), 0.0};
        const auto noisy = flip_bob_bit(binarize_bob(joint_outcome_distribution(src, det, a, b).table()), 0.5 * u(rng));
        const auto sym = symmetrize_key_bit(noisy);
        worst_h = std::max(worst_h, std::abs(conditional_entropy(sym) - conditional_entropy(noisy)));
        worst_m = std::max(worst_m, std::abs(sym.col_marginal()[0] - 0.5));
    }
    std::ostringstream os;
    os << "max |H(B'|A0,T) - H(B|A0)| = " << worst_h << ", max |p(b') - 1/2| = " << worst_m << " (limit 1e-12)";
    return {"symmetrization", worst_h < 1e-12 && worst_m < 1e-12, os.str()};
}

}  // namespace

std::optional<double> fixed_noise(const RunConfig& cfg) {
    if (cfg.p == "opt") return std::nullopt;
    return std::stod(cfg.p);
}

std::vector<double> eta_grid(const RunConfig& cfg) {
    std::vector<double> g;
    if (cfg.eta_steps == 1) return {cfg.eta_min};
    for (int i = 0; i < cfg.eta_steps; ++i)
        g.push_back(cfg.eta_min + (cfg.eta_max - cfg.eta_min) * i / (cfg.eta_steps - 1));
    return g;
}

void write_curve_csv(std::ostream& os, std::vector<std::pair<Protocol, RateResult>> rows, SourceKind source) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
        const std::string a = to_string(x.first), b = to_string(y.first);
        return a != b ? a < b : x.second.eta < y.second.eta;
    });
    os << "eta,protocol,rate_raw,rate_clamped,S,ec_term,eve_term,p,g,gbar,N,alpha0,alpha1,alpha2,beta1,beta2\n";
    for (const auto& [proto, r] : rows) {
        const ParameterPoint& pt = r.point;
        const bool spdc = source == SourceKind::kSpdc;
        os << fmt12(r.eta) << ',' << to_string(proto) << ',' << fmt12(r.rate) << ',' << fmt12(std::max(r.rate, 0.0))
           << ',' << fmt12(r.chsh) << ',' << fmt12(r.ec_term) << ',' << fmt12(r.eve_term) << ',' << fmt12(pt.p) << ','
           << (spdc ? fmt12(pt.src.g()) : "") << ',' << (spdc ? fmt12(pt.src.gbar()) : "") << ','
           << (spdc ? std::to_string(pt.src.modes) : "") << ',' << fmt12(pt.a0.angle) << ',' << fmt12(pt.a1.angle)
           << ',' << fmt12(pt.a2.angle) << ',' << fmt12(pt.b1.angle) << ',' << fmt12(pt.b2.angle) << '\n';
    }
}

int cmd_rate(const RunConfig& cfg) {
    const Protocol proto = single_protocol(cfg);
    const RateResult r = optimize_rate(spec_for(cfg, proto), *cfg.eta, cfg.optimizer);
    return emit(cfg, result_json(proto, r, cfg.source).dump(2));
}

int cmd_threshold(const RunConfig& cfg) {
    const Protocol proto = single_protocol(cfg);
    const ThresholdResult t = threshold_efficiency(spec_for(cfg, proto), cfg.optimizer);
    ordered_json j;
    j["protocol"] = to_string(proto);
    j["source"] = to_string(cfg.source);
    j["threshold_eta"] = t.eta;
    j["eta_tol"] = cfg.optimizer.eta_tol;
    j["witness"] = result_json(proto, t.witness, cfg.source);
    if (cfg.verbose) {
        for (const auto& step : t.trace) {
            std::cerr << "  eta=" << fmt12(step.eta) << " rate=" << fmt12(step.rate) << '\n';
            j["trace"].push_back({{"eta", step.eta}, {"rate", step.rate}});
        }
    }
    return emit(cfg, j.dump(2));
}

int cmd_curve(const RunConfig& cfg) {
    std::vector<Protocol> protocols = cfg.protocols;
    if (protocols.empty()) protocols = {Protocol::kPironio09, Protocol::kMa12, Protocol::kNoisyPreprocessing};
    std::vector<std::pair<Protocol, RateResult>> rows;
    for (Protocol proto : protocols) {
        for (const RateResult& r : rate_curve(spec_for(cfg, proto), eta_grid(cfg), cfg.optimizer)) {
            if (cfg.verbose)
                std::cerr << "  " << to_string(proto) << " eta=" << fmt12(r.eta) << " rate=" << fmt12(r.rate) << '\n';
            rows.emplace_back(proto, r);
        }
    }
    if (cfg.out.empty()) {
        write_curve_csv(std::cout, std::move(rows), cfg.source);
        return kOk;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot open " << cfg.out << " for writing\n";
        return kRuntimeError;
    }
    write_curve_csv(f, std::move(rows), cfg.source);
    f.flush();
    if (!f) {
        std::cerr << "error: failed writing " << cfg.out << '\n';
        return kRuntimeError;
    }
    return kOk;
}

int cmd_verify(const RunConfig& cfg) {
    std::vector<SuiteReport (*)(const RunConfig&)> suites;
    const std::string& s = cfg.suite;
    if (s == "bound-tightness" || s == "all") suites.push_back(suite_bound_tightness);
    if (s == "monotonicity" || s == "all") suites.push_back(suite_monotonicity);
    if (s == "soundness" || s == "all") suites.push_back(suite_soundness);
    if (s == "fock-oracle" || s == "all") suites.push_back(suite_fock);
    if (s == "symmetrization" || s == "all") suites.push_back(suite_symmetrization);
    bool all_pass = true;
    std::ostringstream os;
    for (auto* suite : suites) {
        const SuiteReport r = suite(cfg);
        all_pass = all_pass && r.pass;
        os << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    }
    std::string text = os.str();
    if (!text.empty()) text.pop_back();
    const int rc = emit(cfg, text);
    if (rc != kOk) return rc;
    return all_pass ? kOk : kVerificationFailed;
}

}  // namespace diqkd::cli
