#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rwa/spectral.hpp"
#include "rwa/system.hpp"

namespace rwa {

enum class Provenance { tcl2_full, post_trace_rwa, pre_trace, naive_composite, custom };
std::string to_string(Provenance p);

// Entry of the bath kernel matrix: alpha_nm(w) = weight * spectrum(w).
struct KernelEntry {
    cplx weight = 1.0;
    std::shared_ptr<const CoefficientSet> spectrum;
};

// Hermitian in its indices: entry(m, n) = conj(weight(n, m)) on the same
// spectrum. Missing entries are zero.
class KernelMatrix {
public:
    explicit KernelMatrix(int n) : n_(n), e_(static_cast<std::size_t>(n) * n) {}
    static KernelMatrix diagonal(const std::vector<std::shared_ptr<const CoefficientSet>>& specs);

    void set(int n, int m, KernelEntry e);
    const std::optional<KernelEntry>& at(int n, int m) const { return e_[n + m * n_]; }
    int size() const { return n_; }
    void validate() const;

private:
    int n_;
    std::vector<std::optional<KernelEntry>> e_;
};

class Generator {
public:
    // Derives hamiltonian_part and the dissipator over traceless_basis(N).
    static Generator from_superoperator(std::shared_ptr<const SystemSpec> sys, Matrix super,
                                        Provenance prov);
    static Generator from_parts(std::shared_ptr<const SystemSpec> sys, Matrix hamiltonian,
                                std::vector<Matrix> basis, Matrix dissipator, Provenance prov);

    const SystemSpec& sys() const { return *sys_; }
    std::shared_ptr<const SystemSpec> sys_ptr() const { return sys_; }
    const Matrix& hamiltonian_part() const { return h_; }
    const std::vector<Matrix>& dissipator_basis() const { return basis_; }
    const Matrix& dissipator_matrix() const { return d_; }
    const Matrix& super_matrix() const { return s_; }
    Provenance provenance() const { return prov_; }
    int dim() const { return sys_->dim; }

    // super_matrix minus the free part -i[diag(E), .]
    Matrix delta() const;
    Matrix apply(const Matrix& rho) const;
    // row-major dump with provenance/basis/system-hash header
    std::string dump() const;

private:
    Generator() = default;
    std::shared_ptr<const SystemSpec> sys_;
    Matrix h_, d_, s_;
    std::vector<Matrix> basis_;
    Provenance prov_ = Provenance::custom;
};

Generator free_generator(const SystemSpec& sys);

Generator build_tcl2(const SystemSpec& sys, const std::vector<std::string>& couplings,
                     const KernelMatrix& kernels);
Generator build_tcl2(const SystemSpec& sys, const std::vector<Matrix>& ops, const KernelMatrix& kernels,
                     Provenance prov = Provenance::tcl2_full);
// Single coupling to a thermal bath.
Generator build_tcl2(const SystemSpec& sys, const std::string& coupling, const BathSpec& bath);
// Independent thermal baths, one per coupling.
Generator build_tcl2(const SystemSpec& sys,
                     const std::vector<std::pair<std::string, BathSpec>>& couplings);

Generator post_trace_rwa(const Generator& g);

Generator pre_trace_tcl2(const SystemSpec& sys, const std::string& coupling, const BathSpec& bath);
Generator pre_trace_tcl2(const SystemSpec& sys,
                         const std::vector<std::pair<std::string, BathSpec>>& couplings);

struct PseudoLindblad {
    Matrix hamiltonian;
    Matrix dissipator;
};
PseudoLindblad pseudo_lindblad_decompose(const Generator& g, const std::vector<Matrix>& basis);

struct LindbladReport {
    bool is_lindblad = false;
    double min_eigenvalue = 0.0;
    double choi_min_eigenvalue_at_dt = 0.0;
    double dt = 0.0;
};
inline constexpr double kDissipatorFloor = -1e-10;
LindbladReport lindblad_check(const Generator& g, double dt = 0.0);

Generator naive_compose(const Generator& ga, const Generator& gb, const Matrix& h_ab);

struct StateTrajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
};
void validate_density_matrix(const Matrix& rho);
StateTrajectory propagate(const Generator& g, const Matrix& rho0, const std::vector<double>& times);

Matrix steady_state(const Generator& g);

// eigenvalues of super_matrix, sorted by imaginary then real part
Vector spectrum(const Generator& g);

// Heisenberg-picture action: tr(X L(rho)) = tr(adjoint_apply(X) rho).
Matrix adjoint_apply(const Generator& g, const Matrix& x);

double trace_distance(const Matrix& a, const Matrix& b);

} // namespace rwa
