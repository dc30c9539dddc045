#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rwa/types.hpp"

namespace rwa {

struct NamedOperator {
    std::string name;
    Matrix op; // energy basis
};

// Set by compose(): columns of `unitary` are the composite eigenvectors in
// the product basis |a> kron |b>.
struct Composition {
    int dim_a = 0;
    int dim_b = 0;
    Matrix unitary;
};

struct SystemSpec {
    int dim = 0;
    std::vector<double> energies; // ascending
    std::vector<NamedOperator> couplings;
    std::vector<std::string> labels;
    Composition composition;

    const Matrix& coupling(const std::string& name) const;
    bool has_coupling(const std::string& name) const;
    Matrix hamiltonian() const;
    // |w_i - w_j| below this counts as degenerate
    double degeneracy_tol() const;
    void validate() const;
    // FNV-1a over dimensions, energies and coupling data
    std::uint64_t hash() const;
};

SystemSpec two_level(double Omega);
SystemSpec oscillator(double Omega, double M, int n_fock);
SystemSpec compose(const SystemSpec& a, const SystemSpec& b, const Matrix& h_ab);

struct PmSplit {
    Matrix plus, minus, zero, j;
};
PmSplit split_pm(const std::string& name, const SystemSpec& sys);
PmSplit split_pm(const Matrix& l, const SystemSpec& sys);

struct BohrFrequency {
    double omega = 0.0;
    std::vector<std::pair<int, int>> pairs; // (i, j) with w_i - w_j = omega
    int multiplicity() const { return static_cast<int>(pairs.size()); }
};

struct BohrSpectrum {
    std::vector<BohrFrequency> frequencies; // ascending
    std::vector<int> group;                  // group[i + j*N] -> index into frequencies
    int dim = 0;
    int index(int i, int j) const { return group[i + j * dim]; }
};

BohrSpectrum bohr_spectrum(const SystemSpec& sys);

// Annihilation operator truncated to n levels.
Matrix lowering(int n);

} // namespace rwa
