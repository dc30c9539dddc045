#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rwa/liouvillian.hpp"
#include "rwa/spectral.hpp"

namespace rwa {

using Matrix2 = Eigen::Matrix2d;

enum class TlsVariant { full, post_rwa, pre_rwa };
enum class QbmVariant { full, rwa, pre_trace };
std::string to_string(TlsVariant v);
std::string to_string(QbmVariant v);

struct TlsCoefficients {
    double Gamma = 0.0;
    double delta_Omega = 0.0;      // (2/pi) PV int Omega G(e)/(e^2 - Omega^2)
    double delta_Omega_star = 0.0; // (1/pi) PV int G(e)/(e - Omega)
    double Omega = 0.0;
};

// Blocks in ascending-energy order: populations (rho_--, rho_++),
// coherences (rho_-+, rho_+-) where rho_-+ = rho(0, 1).
struct TlsBlocks {
    Eigen::Matrix2cd population;
    Eigen::Matrix2cd coherence;
    TlsCoefficients coeffs;
};

TlsCoefficients tls_coefficients(const BathSpec& bath, double Omega);
TlsBlocks tls_generators(const BathSpec& bath, double Omega, TlsVariant variant);

struct QbmCoefficients {
    double Gamma = 0.0;
    double Omega_R = 0.0;
    double D_pp = 0.0;
    double D_xp = 0.0;
    double Omega = 0.0;
    double M = 1.0;
    double shift = 0.0; // X with Omega_R = Omega - X/Omega
    QbmVariant variant = QbmVariant::full;
};

// variant full or pre_trace (the latter holds Omega_R* and D_xp*).
QbmCoefficients qbm_coefficients(const BathSpec& bath, double Omega, double M, QbmVariant variant);

struct GaussianModel {
    QbmCoefficients coeffs;
    Matrix2 H; // homogeneous: d<z>/dt = -H <z>, z = (x, p)
    Matrix2 D; // diffusion: dsigma/dt = -H sigma - sigma H^T + 2D
    QbmVariant variant = QbmVariant::full;
};

// Uses the renormalized frequency (Omega_R = Omega). variant full uses the
// anomalous coefficient stored in coeffs (D_xp or D_xp*); rwa drops it.
GaussianModel fp_matrices(const QbmCoefficients& c, QbmVariant variant);

struct Covariance {
    Matrix2 sigma;
    bool uncertainty_ok = true; // det sigma >= 1/4
};
Covariance make_covariance(const Matrix2& sigma);

Covariance lyapunov_stationary(const GaussianModel& gm);
std::vector<Covariance> covariance_evolve(const GaussianModel& gm, const Covariance& sigma0,
                                          const std::vector<double>& times);

// Pseudo-Lindblad matrix over the ladder basis (a^+, a).
Eigen::Matrix2cd qbm_ladder_dissipator(const GaussianModel& gm);

enum class KernelVariant { plain, rwa };
Matrix multipartite_kernel_matrix(const std::vector<Eigen::Vector3d>& positions, double w, double gamma0,
                                  KernelVariant variant);

// Bath seen by the oscillator's x coupling: the bilinear normalization puts
// a factor 2M on the noise kernel relative to a dimensionless coupling.
BathSpec qbm_coupling_bath(const BathSpec& bath, double M);

// Phase-space matrices read off a truncated-Fock generator from the
// Heisenberg action on x, p and their second moments, fitted on the Fock
// block that is free of truncation effects.
struct PhaseSpaceFit {
    Matrix2 H;
    Matrix2 D;
    double residual = 0.0;
};
PhaseSpaceFit extract_phase_space(const Generator& g, int margin = 3);

} // namespace rwa
