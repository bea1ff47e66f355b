#include "fock_oracle.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace diqkd::oracle {

namespace {

using cplx = std::complex<double>;
using Poly = std::vector<cplx>;  // coefficient k multiplies u^k v^(deg-k)

// (x u + y v)^e1 (z u + w v)^e2 as a homogeneous polynomial in (u, v).
Poly expand(cplx x, cplx y, int e1, cplx z, cplx w, int e2) {
    Poly p{1.0};
    auto times = [&p](cplx cu, cplx cv) {
        Poly out(p.size() + 1, 0.0);
        // Degree in u goes up by one for the cu term.
        for (std::size_t k = 0; k < p.size(); ++k) {
            out[k + 1] += p[k] * cu;
            out[k] += p[k] * cv;
        }
        p = std::move(out);
    };
    for (int i = 0; i < e1; ++i) times(x, y);
    for (int i = 0; i < e2; ++i) times(z, w);
    return p;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// Probability that a threshold detector stays silent given k incident photons.
double silent(double eta, double dark, int k) { return (1.0 - dark) * std::pow(1.0 - eta, k); }

}  // namespace

std::array<double, 16> fock_joint_distribution(const SqueezedSourceParams& src, const DetectionModel& det,
                                               const MeasurementSetting& a, const MeasurementSetting& b,
                                               int cutoff) {
    if (src.modes != 1) throw std::invalid_argument("fock oracle: only a single mode pair is supported");
    src.validate();
    det.validate();

    const double ca = std::cos(a.angle), sa = std::sin(a.angle);
    const double cb = std::cos(b.angle), sb = std::sin(b.angle);
    const cplx ea = std::polar(1.0, a.phase), eb = std::polar(1.0, b.phase);

    // Emission-mode creation operators in terms of the detected modes (u = main, v = perp):
    //   a^dag      = ca u + sa e^{i phi_a} v,     a_perp^dag = sa e^{-i phi_a} u - ca v
    //   b^dag      = cb u + sb e^{i phi_b} v,     b_perp^dag = sb e^{-i phi_b} u - cb v
    // The state is norm * sum_{n,m} Tg^n (-Tgbar)^m / (n! m!) (a^dag b_perp^dag)^n (a_perp^dag b^dag)^m |0>.
    const double norm = std::sqrt((1.0 - src.t_g * src.t_g) * (1.0 - src.t_gbar * src.t_gbar));

    std::array<double, 16> out{};
    for (int t = 0; t <= 2 * cutoff; ++t) {
        // Amplitude matrix over (Alice photons in main mode, Bob photons in main mode).
        std::vector<cplx> amp(static_cast<std::size_t>((t + 1) * (t + 1)), 0.0);
        for (int n = std::max(0, t - cutoff); n <= std::min(t, cutoff); ++n) {
            const int m = t - n;
            const cplx coeff = norm * std::pow(src.t_g, n) * std::pow(-src.t_gbar, m) / (factorial(n) * factorial(m));
            const Poly alice = expand(ca, sa * ea, n, sa * std::conj(ea), -ca, m);
            const Poly bob = expand(sb * std::conj(eb), -cb, n, cb, sb * eb, m);
            for (int ka = 0; ka <= t; ++ka)
                for (int kb = 0; kb <= t; ++kb)
                    amp[static_cast<std::size_t>(ka * (t + 1) + kb)] +=
                        coeff * alice[static_cast<std::size_t>(ka)] * bob[static_cast<std::size_t>(kb)];
        }
        for (int ka = 0; ka <= t; ++ka) {
            const double fa = std::sqrt(factorial(ka) * factorial(t - ka));
            for (int kb = 0; kb <= t; ++kb) {
                const double fb = std::sqrt(factorial(kb) * factorial(t - kb));
                const double w = std::norm(amp[static_cast<std::size_t>(ka * (t + 1) + kb)] * fa * fb);
                if (w == 0.0) continue;
                const int photons[4] = {ka, t - ka, kb, t - kb};
                double sil[4];
                for (int d = 0; d < 4; ++d)
                    sil[d] = silent(det.efficiency[static_cast<std::size_t>(d)],
                                    det.dark_count[static_cast<std::size_t>(d)], photons[d]);
                for (unsigned clicked = 0; clicked < 16; ++clicked) {
                    double pr = w;
                    for (int d = 0; d < 4; ++d) pr *= (clicked >> d) & 1u ? 1.0 - sil[d] : sil[d];
                    out[4 * (clicked & 3u) + ((clicked >> 2) & 3u)] += pr;
                }
            }
        }
    }
    return out;
}

}  // namespace diqkd::oracle
