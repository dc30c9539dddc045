#include "rwa/spectral.hpp"

#include <cmath>
#include <limits>

namespace rwa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

double sign(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

} // namespace

std::string to_string(Regulator r) { return r == Regulator::hard ? "hard" : "lorentz_drude"; }

Regulator regulator_from_string(const std::string& s) {
    if (s == "hard") return Regulator::hard;
    if (s == "lorentz_drude") return Regulator::lorentz_drude;
    throw ValidationError("unknown regulator '" + s + "' (allowed: hard, lorentz_drude)");
}

double BathSpec::gamma_tilde(double w) const {
    if (custom_gamma) return std::abs(w) <= cutoff ? custom_gamma(w) : 0.0;
    if (regulator == Regulator::hard) return std::abs(w) <= cutoff ? gamma0 : 0.0;
    return gamma0 * cutoff * cutoff / (cutoff * cutoff + w * w);
}

void BathSpec::validate() const {
    if (!(gamma0 >= 0) || !std::isfinite(gamma0)) throw ValidationError("bath: gamma0 must be >= 0");
    if (!(cutoff > 0) || !std::isfinite(cutoff)) throw ValidationError("bath: cutoff must be > 0");
    if (!(temperature >= 0) || !std::isfinite(temperature))
        throw ValidationError("bath: temperature must be >= 0");
}

BathSpec ohmic(double gamma0, double cutoff, Regulator reg, double temperature) {
    BathSpec b;
    b.gamma0 = gamma0;
    b.cutoff = cutoff;
    b.regulator = reg;
    b.temperature = temperature;
    b.validate();
    return b;
}

double ohmic_damping(double w, const BathSpec& bath) { return bath.gamma_tilde(w); }

double thermal_weight(double w, double t) {
    if (t == 0.0) return w > 0 ? w : 0.0;
    const double x = w / t;
    if (std::abs(x) < 1e-8) return t * (1.0 + 0.5 * x);
    if (x > 0) return w / -std::expm1(-x);
    return w * std::exp(x) / std::expm1(x);
}

double coth_weight(double w, double t) {
    if (t == 0.0) return std::abs(w);
    const double x = w / (2.0 * t);
    if (std::abs(x) < 1e-6) return 2.0 * t * (1.0 + x * x / 3.0);
    return w / std::tanh(x);
}

double noise_characteristic(double w, const BathSpec& bath) {
    return 2.0 * bath.gamma_tilde(w) * thermal_weight(w, bath.temperature);
}

double decoherence_rate(double Omega, const BathSpec& bath) {
    return bath.gamma_tilde(Omega) * coth_weight(Omega, bath.temperature);
}

CoefficientSet::CoefficientSet(SpectralFunction s) : s_(std::move(s)) {
    if (!s_.f) throw ValidationError("CoefficientSet: empty spectral function");
}

CoefficientSet CoefficientSet::thermal(const BathSpec& bath) {
    bath.validate();
    SpectralFunction s;
    s.f = [bath](double w) { return noise_characteristic(w, bath); };
    const double lam = bath.cutoff;
    s.breakpoints = {0.0};
    if (bath.custom_gamma || bath.regulator == Regulator::hard) {
        s.window = lam;
        if (bath.gamma_tilde(lam) != 0.0) s.jumps = {-lam, lam};
    } else {
        s.window = kLdWindow * lam;
        s.tails = bath.gamma0 != 0.0;
        s.breakpoints = {-5 * lam, -lam, 0.0, lam, 5 * lam};
    }
    return CoefficientSet(std::move(s));
}

CoefficientSet CoefficientSet::sign_weighted() const {
    SpectralFunction s = s_;
    auto f = s_.f;
    s.f = [f](double w) { return sign(w) * f(w); };
    if (f(0.0) != 0.0) s.jumps.push_back(0.0);
    return CoefficientSet(std::move(s));
}

PvResult CoefficientSet::hilbert(double w, double lo, double hi) const {
    const double win = s_.window;
    std::vector<double> bp = s_.breakpoints;
    bp.insert(bp.end(), s_.jumps.begin(), s_.jumps.end());
    PvResult out;
    auto add = [&out](const PvResult& r) {
        out.value += r.value;
        out.error += r.error;
        out.l1 += r.l1;
    };
    const double a = std::max(lo, -win), b = std::min(hi, win);
    if (a < b) {
        if (w > a && w < b)
            for (double j : s_.jumps)
                if (j == w)
                    throw QuadratureError("principal value diverges: spectrum jumps at the pole",
                                          kInf);
        add(pv_quadrature(s_.f, w, a, b, bp));
    }
    if (s_.tails) {
        if ((hi > win || lo < -win) && std::abs(w) >= win)
            throw ValidationError("frequency outside the integration window");
        if (hi > win) add(pv_quadrature(s_.f, w, std::max(lo, win), hi));
        if (lo < -win) add(pv_quadrature(s_.f, w, lo, std::min(hi, -win)));
    }
    out.value /= kTwoPi;
    out.error /= kTwoPi;
    out.l1 /= kTwoPi;
    return out;
}

double CoefficientSet::tail_contribution(double w) const {
    if (!s_.tails) return 0.0;
    return std::abs(hilbert(w, s_.window, kInf).value + hilbert(w, -kInf, -s_.window).value);
}

cplx CoefficientSet::A(double w) const {
    return {0.5 * s_.f(w), -hilbert(w, -kInf, kInf).value};
}

cplx CoefficientSet::A_rwa(double w) const {
    double im;
    if (w > 0)
        im = hilbert(w, 0.0, kInf).value;
    else if (w < 0)
        im = hilbert(w, -kInf, 0.0).value;
    else
        im = 0.5 * hilbert(0.0, -kInf, kInf).value;
    return {0.5 * s_.f(w), -im};
}

cplx CoefficientSet::A_band(double w, double dw) const {
    if (!(dw > 0)) throw ValidationError("A_band: bandwidth must be > 0");
    return {0.5 * s_.f(w), -hilbert(w, w - dw, w + dw).value};
}

cplx coefficient_A(double w, const BathSpec& bath) { return CoefficientSet::thermal(bath).A(w); }

cplx coefficient_A_rwa(double w, const BathSpec& bath) {
    return CoefficientSet::thermal(bath).A_rwa(w);
}

cplx coefficient_A_bandwidth(double w, double dw, const BathSpec& bath) {
    return CoefficientSet::thermal(bath).A_band(w, dw);
}

Eigen::Matrix2cd rwa_damping_matrix(double w, double gamma) {
    const double s = sign(w);
    Eigen::Matrix2cd m;
    m << 1.0, cplx(0, -s), cplx(0, s), 1.0;
    return 0.25 * gamma * m;
}

Eigen::Matrix2cd rwa_damping_matrix(double w, const BathSpec& bath) {
    return rwa_damping_matrix(w, bath.gamma_tilde(w));
}

double multipartite_kernel(double r, double w, double gamma0) {
    if (r < 0) throw ValidationError("multipartite_kernel: r must be >= 0");
    const double x = r * w;
    if (std::abs(x) < 1e-8) return gamma0 * (1.0 - x * x / 6.0);
    return gamma0 * std::sin(x) / x;
}

PvResult half_line_pv(const std::function<double(double)>& g, double pole, const BathSpec& bath) {
    const double lam = bath.cutoff;
    if (bath.custom_gamma || bath.regulator == Regulator::hard)
        return pv_quadrature(g, pole, 0.0, lam);
    const double win = kLdWindow * lam;
    if (pole >= win) throw ValidationError("frequency outside the integration window");
    PvResult core = pv_quadrature(g, pole, 0.0, win, {lam, 5 * lam});
    const PvResult tail = pv_quadrature(g, pole, win, kInf);
    core.value += tail.value;
    core.error += tail.error;
    core.l1 += tail.l1;
    return core;
}

} // namespace rwa
