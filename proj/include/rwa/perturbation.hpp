#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "rwa/liouvillian.hpp"

namespace rwa {

struct DegenerateBlock {
    std::vector<int> indices;
    RealVector eigenvalues; // ascending
    Matrix eigenvectors;    // columns in the block's local basis
};

struct ClosedFirstOrder {
    RealVector delta_omega;
    // columns are the zeroth-order states (identity outside degenerate blocks)
    Matrix zeroth_order;
    // column i: first-order correction to zeroth_order.col(i), in the unperturbed basis
    Matrix basis_corrections;
    std::vector<DegenerateBlock> degenerate_blocks;
};

ClosedFirstOrder closed_first_order(const std::vector<double>& energies, const Matrix& h1, double tol = 1e-12);

struct Margins {
    double min_gap = 0.0;     // min |w_ij| over w_ij != 0
    double min_gap_gap = 0.0; // min |w_ij - w_kl| over w_ij != w_kl
    double gamma_D = 0.0;     // max |Re| of the super_matrix spectrum
    bool weak_coupling = true;
    bool secular = true;
};

inline constexpr double kValidityRatio = 0.1;
inline constexpr double kFlagFactor = 10.0;

struct PauliRates {
    RealMatrix W;
    Vector eigenvalues; // sorted by descending real part
    Matrix eigenvectors;
};

using IndexPair = std::pair<int, int>;

struct PerturbationReport {
    std::map<IndexPair, cplx> delta_f;        // coherences i != j
    std::map<IndexPair, Matrix> delta_sigma;  // unflagged coherences only
    std::set<IndexPair> flagged;              // partner within kFlagFactor * gamma_D (or degenerate)
    PauliRates pauli;
    Margins margins;
};

Margins validity_report(const Generator& g);
PauliRates pauli_rates(const Generator& g);
PerturbationReport liouville_corrections(const Generator& g);

// i, j, re_delta_f, im_delta_f, flagged
std::string corrections_csv(const PerturbationReport& r);
std::string margins_text(const Margins& m);

} // namespace rwa
