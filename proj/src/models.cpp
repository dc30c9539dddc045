#include "rwa/models.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "rwa/linalg.hpp"

namespace rwa {

namespace {
constexpr double kPi = 3.14159265358979323846;

void check_frequency(const BathSpec& bath, double Omega) {
    bath.validate();
    if (!(Omega > 0)) throw ValidationError("Omega must be > 0");
    if (!(Omega < bath.cutoff)) throw ValidationError("Omega must be below the cutoff");
}

// Gamma e^{+-x}/cosh x with x = Omega/2T, stable for T -> 0
double boltzmann_split(double Gamma, double Omega, double T, bool down) {
    if (T == 0.0) return down ? 2.0 * Gamma : 0.0;
    const double q = std::exp(-Omega / T); // e^{-2x}
    return down ? 2.0 * Gamma / (1.0 + q) : 2.0 * Gamma * q / (1.0 + q);
}
} // namespace

std::string to_string(TlsVariant v) {
    switch (v) {
    case TlsVariant::full: return "full";
    case TlsVariant::post_rwa: return "post_rwa";
    case TlsVariant::pre_rwa: return "pre_rwa";
    }
    return "full";
}

std::string to_string(QbmVariant v) {
    switch (v) {
    case QbmVariant::full: return "full";
    case QbmVariant::rwa: return "rwa";
    case QbmVariant::pre_trace: return "pre_trace";
    }
    return "full";
}

TlsCoefficients tls_coefficients(const BathSpec& bath, double Omega) {
    check_frequency(bath, Omega);
    const double T = bath.temperature;
    auto rate = [&](double e) { return bath.gamma_tilde(e) * coth_weight(e, T); };
    TlsCoefficients c;
    c.Omega = Omega;
    c.Gamma = decoherence_rate(Omega, bath);
    c.delta_Omega =
        -(2 / kPi) * half_line_pv([&](double e) { return Omega * rate(e) / (e + Omega); }, Omega, bath).value;
    c.delta_Omega_star = -(1 / kPi) * half_line_pv(rate, Omega, bath).value;
    return c;
}

TlsBlocks tls_generators(const BathSpec& bath, double Omega, TlsVariant variant) {
    TlsBlocks b;
    b.coeffs = tls_coefficients(bath, Omega);
    const double G = b.coeffs.Gamma, T = bath.temperature;
    const double down = boltzmann_split(G, Omega, T, true);
    const double up = boltzmann_split(G, Omega, T, false);
    b.population << -up, down, up, -down;
    const double s = variant == TlsVariant::pre_rwa ? b.coeffs.delta_Omega_star : b.coeffs.delta_Omega;
    const cplx i(0, 1);
    b.coherence << -G + i * (Omega - s), G - i * s, G + i * s, -G - i * (Omega - s);
    if (variant == TlsVariant::post_rwa) {
        b.coherence(0, 1) = 0.0;
        b.coherence(1, 0) = 0.0;
    }
    return b;
}

QbmCoefficients qbm_coefficients(const BathSpec& bath, double Omega, double M, QbmVariant variant) {
    check_frequency(bath, Omega);
    if (!(M > 0)) throw ValidationError("mass must be > 0");
    if (variant == QbmVariant::rwa) throw ValidationError("qbm_coefficients: variant must be full or pre_trace");
    const double T = bath.temperature;
    auto g = [&](double e) { return bath.gamma_tilde(e); };
    QbmCoefficients c;
    c.Omega = Omega;
    c.M = M;
    c.variant = variant;
    c.Gamma = g(Omega);
    c.D_pp = g(Omega) * coth_weight(Omega, T);
    if (variant == QbmVariant::full) {
        c.shift = -(2 / kPi) * half_line_pv([&](double e) { return g(e) * e * e / (e + Omega); }, Omega, bath).value;
        c.D_xp = -(2 / kPi) *
                 half_line_pv([&](double e) { return g(e) * coth_weight(e, T) / (e + Omega); }, Omega, bath).value;
    } else {
        c.shift = -(1 / kPi) * half_line_pv([&](double e) { return g(e) * e; }, Omega, bath).value;
        c.D_xp = -(1 / (kPi * Omega)) *
                 half_line_pv([&](double e) { return g(e) * coth_weight(e, T); }, Omega, bath).value;
    }
    c.Omega_R = Omega - c.shift / Omega;
    return c;
}

GaussianModel fp_matrices(const QbmCoefficients& c, QbmVariant variant) {
    GaussianModel gm;
    gm.coeffs = c;
    gm.variant = variant;
    const double W = c.Omega, M = c.M, G = c.Gamma;
    if (variant == QbmVariant::rwa) {
        gm.H << G, -1.0 / M, M * W * W, G;
        gm.D << c.D_pp / (2 * M * W * W), 0.0, 0.0, M * c.D_pp / 2;
    } else {
        gm.H << 0.0, -1.0 / M, M * W * W, 2 * G;
        gm.D << 0.0, -c.D_xp / 2, -c.D_xp / 2, M * c.D_pp;
    }
    return gm;
}

Covariance make_covariance(const Matrix2& sigma) {
    if (std::abs(sigma(0, 1) - sigma(1, 0)) > 1e-12 * std::max(1.0, sigma.cwiseAbs().maxCoeff()))
        throw ValidationError("covariance must be symmetric");
    Covariance c{sigma, sigma.determinant() >= 0.25 - 1e-12};
    return c;
}

Covariance lyapunov_stationary(const GaussianModel& gm) {
    const Matrix2& a = gm.H;
    const double tr = a.trace(), det = a.determinant();
    if (!(tr > 0) || !(det > 0)) throw ValidationError("homogeneous matrix is not stable");
    // 2x2 closed form of A X + X A^T = Q
    const Matrix2 q = 2.0 * gm.D;
    const Matrix2 b = a - tr * Matrix2::Identity();
    Matrix2 x = (det * q + b * q * b.transpose()) / (2.0 * tr * det);
    x = 0.5 * (x + x.transpose()).eval();
    return make_covariance(x);
}

std::vector<Covariance> covariance_evolve(const GaussianModel& gm, const Covariance& sigma0,
                                          const std::vector<double>& times) {
    const Covariance inf = lyapunov_stationary(gm);
    std::vector<Covariance> out;
    const Matrix2 d0 = sigma0.sigma - inf.sigma;
    for (double t : times) {
        if (!(t >= 0)) throw ValidationError("times must be >= 0");
        const Matrix2 e = (-t * gm.H).exp();
        Matrix2 s = e * d0 * e.transpose() + inf.sigma;
        s = 0.5 * (s + s.transpose()).eval();
        out.push_back(make_covariance(s));
    }
    return out;
}

Eigen::Matrix2cd qbm_ladder_dissipator(const GaussianModel& gm) {
    const auto& c = gm.coeffs;
    const double W = c.Omega;
    const cplx i(0, 1);
    Eigen::Matrix2cd d;
    d << c.D_pp - c.Gamma * W, c.D_pp + i * c.D_xp * W, c.D_pp - i * c.D_xp * W, c.D_pp + c.Gamma * W;
    return d / W;
}

Matrix multipartite_kernel_matrix(const std::vector<Eigen::Vector3d>& positions, double w, double gamma0,
                                  KernelVariant variant) {
    const int n = static_cast<int>(positions.size());
    for (const auto& p : positions)
        if (!p.allFinite()) throw ValidationError("positions must be finite");
    RealMatrix plain(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            plain(a, b) = multipartite_kernel((positions[a] - positions[b]).norm(), w, gamma0);
    if (variant == KernelVariant::plain) return plain.cast<cplx>();
    Matrix out(2 * n, 2 * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) out.block<2, 2>(2 * a, 2 * b) = rwa_damping_matrix(w, plain(a, b));
    return out;
}

BathSpec qbm_coupling_bath(const BathSpec& bath, double M) {
    BathSpec b = bath;
    if (b.custom_gamma) {
        auto f = b.custom_gamma;
        b.custom_gamma = [f, M](double w) { return 2 * M * f(w); };
    } else {
        b.gamma0 *= 2 * M;
    }
    return b;
}

PhaseSpaceFit extract_phase_space(const Generator& g, int margin) {
    const SystemSpec& sys = g.sys();
    const Matrix& x = sys.coupling("x");
    const Matrix& p = sys.coupling("p");
    const int n = sys.dim, m = n - margin;
    if (m < 3) throw ValidationError("extract_phase_space: Fock space too small for the margin");
    const Matrix sym = 0.5 * (x * p + p * x);
    const std::vector<Matrix> basis{Matrix::Identity(n, n), x, p, x * x, p * p, sym};
    Matrix a(m * m, static_cast<int>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) a.col(k) = vec(Matrix(basis[k].topLeftCorner(m, m)));
    const auto qr = a.colPivHouseholderQr();

    PhaseSpaceFit fit;
    auto coeffs = [&](const Matrix& obs) {
        const Matrix y = adjoint_apply(g, obs);
        const Vector b = vec(Matrix(y.topLeftCorner(m, m)));
        const Vector c = qr.solve(b);
        fit.residual = std::max(fit.residual, (a * c - b).norm() / std::max(b.norm(), 1e-300));
        fit.residual = std::max(fit.residual, c.imag().cwiseAbs().maxCoeff() / std::max(c.norm(), 1e-300));
        return RealVector(c.real());
    };
    const RealVector cx = coeffs(x), cp = coeffs(p);
    fit.H << -cx(1), -cx(2), -cp(1), -cp(2);
    const double dxx = 0.5 * coeffs(x * x)(0), dpp = 0.5 * coeffs(p * p)(0), dxp = 0.5 * coeffs(sym)(0);
    fit.D << dxx, dxp, dxp, dpp;
    return fit;
}

} // namespace rwa
