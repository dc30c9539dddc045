#include "rwa/liouvillian.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "rwa/format.hpp"
#include "rwa/linalg.hpp"

namespace rwa {

std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::tcl2_full: return "tcl2_full";
    case Provenance::post_trace_rwa: return "post_trace_rwa";
    case Provenance::pre_trace: return "pre_trace";
    case Provenance::naive_composite: return "naive_composite";
    case Provenance::custom: return "custom";
    }
    return "custom";
}

KernelMatrix KernelMatrix::diagonal(const std::vector<std::shared_ptr<const CoefficientSet>>& specs) {
    KernelMatrix k(static_cast<int>(specs.size()));
    for (std::size_t i = 0; i < specs.size(); ++i)
        k.set(static_cast<int>(i), static_cast<int>(i), {1.0, specs[i]});
    return k;
}

void KernelMatrix::set(int n, int m, KernelEntry e) {
    if (n < 0 || m < 0 || n >= n_ || m >= n_) throw ValidationError("kernel index out of range");
    if (!e.spectrum) throw ValidationError("kernel entry without spectrum");
    e_[n + m * n_] = std::move(e);
}

void KernelMatrix::validate() const {
    bool any = false;
    for (int n = 0; n < n_; ++n)
        for (int m = 0; m < n_; ++m) {
            const auto& a = at(n, m);
            const auto& b = at(m, n);
            if (a.has_value() != b.has_value())
                throw ValidationError("kernel matrix: missing entry (" + std::to_string(m) + "," +
                                      std::to_string(n) + ")");
            if (!a) continue;
            any = true;
            if (a->spectrum != b->spectrum || std::abs(a->weight - std::conj(b->weight)) > 1e-14)
                throw ValidationError("kernel matrix is not Hermitian in its indices");
        }
    if (!any && n_ > 0) throw ValidationError("kernel matrix has no entries");
}

namespace {

struct Decomposition {
    Matrix h, d;
};

// Solves R(S) = vec(K)vec(I)^+ + vec(I)vec(K)^+ + E D E^+ for D and the
// anti-Hermitian part of K, then checks the reconstruction.
Decomposition decompose(const Matrix& s, const std::vector<Matrix>& basis, const Matrix& h_free,
                        double tol) {
    const int n = static_cast<int>(h_free.rows());
    if (basis.empty()) throw ValidationError("pseudo-Lindblad: empty basis");
    const int nb = static_cast<int>(basis.size());
    Matrix e(n * n, nb);
    for (int a = 0; a < nb; ++a) {
        if (basis[a].rows() != n || basis[a].cols() != n)
            throw ValidationError("pseudo-Lindblad: basis element has wrong shape");
        e.col(a) = vec(basis[a]);
    }
    const Vector vi = vec(Matrix::Identity(n, n));
    // traceless projections of the basis; pinv(et) annihilates vec(I), so
    // the identity components of R drop out of D
    const Matrix et = e - vi * (vi.adjoint() * e) / static_cast<double>(n);
    const Matrix r = realign(s, n);

    Matrix pinv;
    const Matrix gram = et.adjoint() * et;
    if ((gram - Matrix::Identity(nb, nb)).cwiseAbs().maxCoeff() < 1e-13) {
        pinv = et.adjoint();
    } else {
        Eigen::BDCSVD<Matrix> svd(et, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        if (sv.size() < nb || sv(nb - 1) <= 1e-10 * sv(0))
            throw ValidationError("pseudo-Lindblad: basis is rank-deficient on traceless operators");
        RealVector inv = sv.cwiseInverse();
        pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
    }
    Matrix d = pinv * r * pinv.adjoint();
    d = 0.5 * (d + d.adjoint()).eval();

    const Matrix q = r - e * d * e.adjoint();
    const Matrix k = unvec(q * vi, n) / static_cast<double>(n);
    Matrix h = cplx(0, 0.5) * (k - k.adjoint());
    h = 0.5 * (h + h.adjoint()).eval();
    const cplx shift = (h_free.trace() - h.trace()) / static_cast<double>(n);
    h += shift * Matrix::Identity(n, n);

    const Matrix rebuilt = commutator_superop(h) + dissipator_superop(basis, d);
    const double scale = std::max(1.0, max_abs(s));
    if (max_abs(rebuilt - s) > tol * scale)
        throw ValidationError("pseudo-Lindblad: generator is not representable over this basis");
    return {h, d};
}

} // namespace

Generator Generator::from_superoperator(std::shared_ptr<const SystemSpec> sys, Matrix super,
                                        Provenance prov) {
    if (!sys) throw ValidationError("generator: null system");
    const int n = sys->dim;
    if (super.rows() != n * n || super.cols() != n * n)
        throw ValidationError("generator: super_matrix has wrong shape");
    Generator g;
    g.sys_ = std::move(sys);
    g.prov_ = prov;
    g.s_ = std::move(super);
    if (n == 1) {
        g.h_ = g.sys_->hamiltonian();
        g.d_ = Matrix::Zero(0, 0);
        return g;
    }
    g.basis_ = traceless_basis(n);
    auto dec = decompose(g.s_, g.basis_, g.sys_->hamiltonian(), 1e-10);
    g.h_ = std::move(dec.h);
    g.d_ = std::move(dec.d);
    return g;
}

Generator Generator::from_parts(std::shared_ptr<const SystemSpec> sys, Matrix hamiltonian,
                                std::vector<Matrix> basis, Matrix dissipator, Provenance prov) {
    if (!sys) throw ValidationError("generator: null system");
    const int n = sys->dim;
    if (hamiltonian.rows() != n || !is_hermitian(hamiltonian, 1e-12))
        throw ValidationError("generator: hamiltonian must be Hermitian N x N");
    if (dissipator.rows() != static_cast<Eigen::Index>(basis.size()) ||
        dissipator.cols() != dissipator.rows() || !is_hermitian(dissipator, 1e-12))
        throw ValidationError("generator: dissipator must be Hermitian and match the basis");
    Generator g;
    g.sys_ = std::move(sys);
    g.prov_ = prov;
    g.s_ = commutator_superop(hamiltonian);
    if (!basis.empty()) g.s_ += dissipator_superop(basis, dissipator);
    g.h_ = std::move(hamiltonian);
    g.basis_ = std::move(basis);
    g.d_ = std::move(dissipator);
    return g;
}

Matrix Generator::delta() const { return s_ - commutator_superop(sys_->hamiltonian()); }

Matrix Generator::apply(const Matrix& rho) const { return rwa::apply(s_, rho); }

std::string Generator::dump() const {
    std::ostringstream os;
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(sys_->hash()));
    os << "# generator\n"
       << "provenance: " << to_string(prov_) << "\n"
       << "basis: energy eigenbasis, column-stacking vec (|i><j| -> i + j*N)\n"
       << "system_hash: " << hash << "\n"
       << "dim: " << sys_->dim << "\n";
    for (Eigen::Index r = 0; r < s_.rows(); ++r) {
        for (Eigen::Index c = 0; c < s_.cols(); ++c) os << (c ? " " : "") << fmt(s_(r, c));
        os << "\n";
    }
    return os.str();
}

Generator free_generator(const SystemSpec& sys) {
    sys.validate();
    auto p = std::make_shared<const SystemSpec>(sys);
    return Generator::from_superoperator(p, commutator_superop(sys.hamiltonian()), Provenance::custom);
}

Generator build_tcl2(const SystemSpec& sys, const std::vector<Matrix>& ops, const KernelMatrix& kernels,
                     Provenance prov) {
    sys.validate();
    kernels.validate();
    const int n = sys.dim;
    const int nc = static_cast<int>(ops.size());
    if (kernels.size() != nc) throw ValidationError("kernel matrix size does not match couplings");
    for (const auto& op : ops)
        if (op.rows() != n || op.cols() != n) throw ValidationError("coupling operator shape mismatch");

    const BohrSpectrum bohr = bohr_spectrum(sys);
    // conj(A(w)) per (spectrum, Bohr group): the one-sided transform of the
    // correlation function is w * (a(w)/2 + i H(w)) = w * conj(A(w)).
    std::map<std::pair<const CoefficientSet*, int>, cplx> cache;
    auto g_of = [&](const KernelEntry& k, int a, int b) {
        const int grp = bohr.index(a, b);
        const auto key = std::make_pair(k.spectrum.get(), grp);
        auto it = cache.find(key);
        if (it == cache.end())
            it = cache.emplace(key, std::conj(k.spectrum->A(bohr.frequencies[grp].omega))).first;
        return k.weight * it->second;
    };

    const Matrix id = Matrix::Identity(n, n);
    Matrix s = commutator_superop(sys.hamiltonian());
    for (int nn = 0; nn < nc; ++nn)
        for (int m = 0; m < nc; ++m) {
            const auto& k = kernels.at(nn, m);
            if (!k) continue;
            const Matrix& ln = ops[nn];
            const Matrix& lm = ops[m];
            // a3(k,i) = Lm(k,i) G(w_ik);  c(j,l) = conj(G(w_jl)) Lm(j,l)
            Matrix a3 = Matrix::Zero(n, n), c = Matrix::Zero(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) {
                    if (lm(b, a) == cplx(0) && lm(a, b) == cplx(0)) continue;
                    const cplx gab = g_of(*k, a, b);
                    a3(b, a) = lm(b, a) * gab;
                    c(a, b) = std::conj(gab) * lm(a, b);
                }
            // rho -> a3 rho Ln + Ln rho c - Ln a3 rho - rho c Ln
            s += kron(ln.transpose(), a3) + kron(c.transpose(), ln) - kron(id, ln * a3) -
                 kron((c * ln).transpose(), id);
        }
    return Generator::from_superoperator(std::make_shared<const SystemSpec>(sys), std::move(s), prov);
}

Generator build_tcl2(const SystemSpec& sys, const std::vector<std::string>& couplings,
                     const KernelMatrix& kernels) {
    std::vector<Matrix> ops;
    for (const auto& c : couplings) ops.push_back(sys.coupling(c));
    return build_tcl2(sys, ops, kernels);
}

Generator build_tcl2(const SystemSpec& sys, const std::vector<std::pair<std::string, BathSpec>>& couplings) {
    std::vector<std::string> names;
    std::vector<std::shared_ptr<const CoefficientSet>> specs;
    for (const auto& [name, bath] : couplings) {
        names.push_back(name);
        specs.push_back(std::make_shared<const CoefficientSet>(CoefficientSet::thermal(bath)));
    }
    return build_tcl2(sys, names, KernelMatrix::diagonal(specs));
}

Generator build_tcl2(const SystemSpec& sys, const std::string& coupling, const BathSpec& bath) {
    return build_tcl2(sys, std::vector<std::pair<std::string, BathSpec>>{{coupling, bath}});
}

Generator post_trace_rwa(const Generator& g) {
    const SystemSpec& sys = g.sys();
    const int n = sys.dim;
    const double tol = 2.0 * sys.degeneracy_tol();
    Matrix s = g.super_matrix();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const double wij = sys.energies[i] - sys.energies[j];
            for (int l = 0; l < n; ++l)
                for (int k = 0; k < n; ++k)
                    if (std::abs(sys.energies[k] - sys.energies[l] - wij) > tol)
                        s(k + l * n, i + j * n) = 0.0;
        }
    return Generator::from_superoperator(g.sys_ptr(), std::move(s), Provenance::post_trace_rwa);
}

Generator pre_trace_tcl2(const SystemSpec& sys, const std::vector<std::pair<std::string, BathSpec>>& couplings) {
    // H_I = (L l + J j)/2 with L = L+ + L-, J = i(L+ - L-); the (l, j) noise
    // pair has emission-positive spectra a(w) [[1, i sgn w], [-i sgn w, 1]].
    std::vector<Matrix> ops;
    KernelMatrix k(2 * static_cast<int>(couplings.size()));
    int idx = 0;
    for (const auto& [name, bath] : couplings) {
        const PmSplit sp = split_pm(name, sys);
        ops.push_back(sp.plus + sp.minus);
        ops.push_back(sp.j);
        auto base = std::make_shared<const CoefficientSet>(CoefficientSet::thermal(bath));
        auto sgn = std::make_shared<const CoefficientSet>(base->sign_weighted());
        k.set(idx, idx, {0.25, base});
        k.set(idx + 1, idx + 1, {0.25, base});
        k.set(idx, idx + 1, {cplx(0, 0.25), sgn});
        k.set(idx + 1, idx, {cplx(0, -0.25), sgn});
        idx += 2;
    }
    return build_tcl2(sys, ops, k, Provenance::pre_trace);
}

Generator pre_trace_tcl2(const SystemSpec& sys, const std::string& coupling, const BathSpec& bath) {
    return pre_trace_tcl2(sys, std::vector<std::pair<std::string, BathSpec>>{{coupling, bath}});
}

PseudoLindblad pseudo_lindblad_decompose(const Generator& g, const std::vector<Matrix>& basis) {
    auto dec = decompose(g.super_matrix(), basis, g.sys().hamiltonian(), 1e-10);
    return {dec.h, dec.d};
}

LindbladReport lindblad_check(const Generator& g, double dt) {
    LindbladReport rep;
    const Matrix& d = g.dissipator_matrix();
    if (d.size() > 0) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()));
        rep.min_eigenvalue = es.eigenvalues().minCoeff();
    }
    rep.is_lindblad = rep.min_eigenvalue >= kDissipatorFloor;
    if (dt <= 0) {
        double wmax = 0.0;
        const auto& e = g.sys().energies;
        if (!e.empty()) wmax = e.back() - e.front();
        dt = wmax > 0 ? 1e-3 / wmax : 1e-3;
    }
    rep.dt = dt;
    const int n = g.dim();
    Matrix c = choi(expm(dt * g.super_matrix()), n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (c + c.adjoint()), Eigen::EigenvaluesOnly);
    rep.choi_min_eigenvalue_at_dt = es.eigenvalues().minCoeff();
    return rep;
}

namespace {

// S_A kron id_B on the product space, product index a*dB + b.
Matrix tensor_left(const Matrix& sa, int da, int db) {
    const int n = da * db;
    Matrix out = Matrix::Zero(n * n, n * n);
    for (int a = 0; a < da; ++a)
        for (int ap = 0; ap < da; ++ap)
            for (int k = 0; k < da; ++k)
                for (int kp = 0; kp < da; ++kp) {
                    const cplx v = sa(k + kp * da, a + ap * da);
                    if (v == cplx(0)) continue;
                    for (int b = 0; b < db; ++b)
                        for (int bp = 0; bp < db; ++bp)
                            out((k * db + b) + (kp * db + bp) * n, (a * db + b) + (ap * db + bp) * n) = v;
                }
    return out;
}

Matrix tensor_right(const Matrix& sb, int da, int db) {
    const int n = da * db;
    Matrix out = Matrix::Zero(n * n, n * n);
    for (int b = 0; b < db; ++b)
        for (int bp = 0; bp < db; ++bp)
            for (int k = 0; k < db; ++k)
                for (int kp = 0; kp < db; ++kp) {
                    const cplx v = sb(k + kp * db, b + bp * db);
                    if (v == cplx(0)) continue;
                    for (int a = 0; a < da; ++a)
                        for (int ap = 0; ap < da; ++ap)
                            out((a * db + k) + (ap * db + kp) * n, (a * db + b) + (ap * db + bp) * n) = v;
                }
    return out;
}

} // namespace

Generator naive_compose(const Generator& ga, const Generator& gb, const Matrix& h_ab) {
    const int da = ga.dim(), db = gb.dim();
    if (h_ab.rows() != da * db || h_ab.cols() != da * db)
        throw ValidationError("naive_compose: h_ab dimension mismatch");
    SystemSpec target = compose(ga.sys(), gb.sys(), h_ab);
    const Matrix& u = target.composition.unitary;
    const Matrix ia = Matrix::Identity(da, da), ib = Matrix::Identity(db, db);
    const Matrix h = kron(ga.sys().hamiltonian(), ib) + kron(ia, gb.sys().hamiltonian()) + h_ab;
    Matrix sp = commutator_superop(h) + tensor_left(ga.delta(), da, db) + tensor_right(gb.delta(), da, db);
    // vec(U^+ X U) = (U^T kron U^+) vec(X)
    const Matrix t = kron(u.transpose(), u.adjoint());
    const Matrix tinv = kron(u.conjugate(), u);
    Matrix s = t * sp * tinv;
    return Generator::from_superoperator(std::make_shared<const SystemSpec>(std::move(target)), std::move(s),
                                         Provenance::naive_composite);
}

void validate_density_matrix(const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw ValidationError("density matrix must be square");
    if (!is_hermitian(rho, 1e-12)) throw ValidationError("density matrix is not Hermitian");
    if (std::abs(rho.trace() - 1.0) > 1e-10) throw ValidationError("density matrix trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw ValidationError("density matrix is not PSD");
}

StateTrajectory propagate(const Generator& g, const Matrix& rho0, const std::vector<double>& times) {
    if (rho0.rows() != g.dim()) throw ValidationError("propagate: state dimension mismatch");
    validate_density_matrix(rho0);
    for (double t : times)
        if (!(t >= 0) || !std::isfinite(t)) throw ValidationError("propagate: times must be >= 0");
    SuperExponential ex(g.super_matrix());
    StateTrajectory tr;
    const Vector v0 = vec(rho0);
    for (double t : times) {
        tr.times.push_back(t);
        tr.states.push_back(t == 0.0 ? rho0 : unvec(ex.at(t) * v0, g.dim()));
    }
    return tr;
}

Matrix steady_state(const Generator& g) {
    const int n = g.dim();
    Eigen::BDCSVD<Matrix> svd(g.super_matrix(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double tol = 1e-9 * std::max(sv(0), 1e-300);
    int kdim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) <= tol) ++kdim;
    if (kdim != 1)
        throw DegenerateKernelError("steady state not unique: kernel dimension " + std::to_string(kdim), kdim);
    Matrix rho = unvec(svd.matrixV().col(n * n - 1), n);
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

Vector spectrum(const Generator& g) {
    Eigen::ComplexEigenSolver<Matrix> es(g.super_matrix(), false);
    if (es.info() != Eigen::Success) throw NumericalError("spectrum: eigensolver failed");
    Vector ev = es.eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), [](cplx a, cplx b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    return ev;
}

Matrix adjoint_apply(const Generator& g, const Matrix& x) {
    const int n = g.dim();
    return unvec(g.super_matrix().adjoint() * vec(x.adjoint()), n).adjoint();
}

double trace_distance(const Matrix& a, const Matrix& b) {
    const Matrix d = a - b;
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

} // namespace rwa
