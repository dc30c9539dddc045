#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwa/quadrature.hpp"
#include "rwa/types.hpp"

namespace rwa {

enum class Regulator { hard, lorentz_drude };

std::string to_string(Regulator r);
Regulator regulator_from_string(const std::string& s);

// Lorentz-Drude integrals run over [-kLdWindow*cutoff, kLdWindow*cutoff]
// plus the two semi-infinite tails, which are integrated and reported.
inline constexpr double kLdWindow = 50.0;

struct BathSpec {
    double gamma0 = 0.0;       // coupling scale
    double cutoff = 1.0;       // Lambda
    Regulator regulator = Regulator::hard;
    double temperature = 0.0;  // k_B = 1
    // Tabulated escape hatch: replaces the Ohmic damping kernel. Must be
    // even and nonnegative; treated as supported on [-cutoff, cutoff].
    std::function<double(double)> custom_gamma;

    double gamma_tilde(double w) const;
    void validate() const;
};

BathSpec ohmic(double gamma0, double cutoff, Regulator reg, double temperature);

double ohmic_damping(double w, const BathSpec& bath);

// w (1 + n(w)) = w / (1 - exp(-w/T)), extended to w <= 0; limit T at w = 0.
double thermal_weight(double w, double temperature);
// w coth(w / 2T), even in w; limit 2T at w = 0, |w| at T = 0.
double coth_weight(double w, double temperature);

// Emission-positive noise characteristic 2 gamma(w) w (1 + n(w)).
double noise_characteristic(double w, const BathSpec& bath);
// gamma(W) W coth(W / 2T)
double decoherence_rate(double Omega, const BathSpec& bath);

// A real spectral function of signed frequency with its integration
// geometry.
struct SpectralFunction {
    std::function<double(double)> f;
    double window = 1.0;            // core range [-window, window]
    bool tails = false;             // nonzero beyond the core range
    std::vector<double> breakpoints;
    std::vector<double> jumps;      // discontinuities: a PV pole there diverges
};

// Frequency-domain coefficients built from a spectral function a(e):
//   A(w)      = a(w)/2 - (i/2pi) PV int a(e)/(w - e) de
//   A_rwa(w)  = same, integrating only where sign e = sign w (sign 0 = 0)
//   A_band(w) = same, integrating only where |w - e| <= dw
class CoefficientSet {
public:
    explicit CoefficientSet(SpectralFunction s);
    static CoefficientSet thermal(const BathSpec& bath);

    // a(e) sign(e), the spectrum of the cross kernel between L and J.
    CoefficientSet sign_weighted() const;

    double alpha_tilde(double w) const { return s_.f(w); }
    cplx A(double w) const;
    cplx A_rwa(double w) const;
    cplx A_band(double w, double dw) const;

    // (1/2pi) PV int_lo^hi a(e)/(w - e) de, clipped to the support.
    PvResult hilbert(double w, double lo, double hi) const;
    // magnitude of the tail part of hilbert(w) over the full line
    double tail_contribution(double w) const;

    const SpectralFunction& spectrum() const { return s_; }

private:
    SpectralFunction s_;
};

cplx coefficient_A(double w, const BathSpec& bath);
cplx coefficient_A_rwa(double w, const BathSpec& bath);
cplx coefficient_A_bandwidth(double w, double dw, const BathSpec& bath);

// (gamma(w)/4) [[1, -i sign w], [i sign w, 1]] for the (l, j) noise pair.
Eigen::Matrix2cd rwa_damping_matrix(double w, const BathSpec& bath);
Eigen::Matrix2cd rwa_damping_matrix(double w, double gamma);

// gamma0 sin(r w)/(r w)
double multipartite_kernel(double r, double w, double gamma0);

// PV int_0^inf g(e)/(pole - e) de for an even-extended profile g defined by
// the bath's support (hard: [0, cutoff]; lorentz_drude: window + tail).
PvResult half_line_pv(const std::function<double(double)>& g, double pole, const BathSpec& bath);

} // namespace rwa
