#include "rwa/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "rwa/format.hpp"
#include "rwa/linalg.hpp"

namespace rwa {

ClosedFirstOrder closed_first_order(const std::vector<double>& energies, const Matrix& h1, double tol) {
    const int n = static_cast<int>(energies.size());
    if (h1.rows() != n || h1.cols() != n) throw ValidationError("closed_first_order: H1 dimension mismatch");
    if (!is_hermitian(h1, 1e-12 * std::max(1.0, max_abs(h1))))
        throw ValidationError("closed_first_order: H1 not Hermitian");

    // group levels by energy
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return energies[a] < energies[b]; });
    std::vector<std::vector<int>> groups;
    for (int k : order) {
        if (groups.empty() || energies[k] - energies[groups.back().front()] > tol) groups.push_back({});
        groups.back().push_back(k);
    }
    std::vector<int> group_of(n);
    for (std::size_t gi = 0; gi < groups.size(); ++gi)
        for (int k : groups[gi]) group_of[k] = static_cast<int>(gi);

    ClosedFirstOrder out;
    out.delta_omega = RealVector::Zero(n);
    out.zeroth_order = Matrix::Identity(n, n);
    for (const auto& grp : groups) {
        const int m = static_cast<int>(grp.size());
        if (m == 1) {
            out.delta_omega(grp[0]) = h1(grp[0], grp[0]).real();
            continue;
        }
        Matrix block(m, m);
        for (int a = 0; a < m; ++a)
            for (int b = 0; b < m; ++b) block(a, b) = h1(grp[a], grp[b]);
        Eigen::SelfAdjointEigenSolver<Matrix> es(block);
        DegenerateBlock db{grp, es.eigenvalues(), es.eigenvectors()};
        for (int a = 0; a < m; ++a) {
            out.delta_omega(grp[a]) = db.eigenvalues(a);
            for (int b = 0; b < m; ++b) out.zeroth_order(grp[b], grp[a]) = db.eigenvectors(b, a);
        }
        out.degenerate_blocks.push_back(std::move(db));
    }

    out.basis_corrections = Matrix::Zero(n, n);
    const Matrix h1z = h1 * out.zeroth_order;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (group_of[j] != group_of[i]) out.basis_corrections(j, i) = h1z(j, i) / (energies[i] - energies[j]);
    return out;
}

namespace {

double gamma_d(const Generator& g) {
    if (g.delta().cwiseAbs().maxCoeff() == 0.0) return 0.0;
    Eigen::ComplexEigenSolver<Matrix> es(g.super_matrix(), false);
    return es.eigenvalues().real().cwiseAbs().maxCoeff();
}

Margins margins_for(const SystemSpec& sys, double gd) {
    const auto bohr = bohr_spectrum(sys);
    Margins m;
    m.gamma_D = gd;
    m.min_gap = std::numeric_limits<double>::infinity();
    m.min_gap_gap = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < bohr.frequencies.size(); ++a) {
        const double w = bohr.frequencies[a].omega;
        if (w != 0.0) m.min_gap = std::min(m.min_gap, std::abs(w));
        if (a > 0) m.min_gap_gap = std::min(m.min_gap_gap, w - bohr.frequencies[a - 1].omega);
    }
    m.weak_coupling = gd <= kValidityRatio * m.min_gap;
    m.secular = gd <= kValidityRatio * m.min_gap_gap;
    return m;
}

} // namespace

Margins validity_report(const Generator& g) { return margins_for(g.sys(), gamma_d(g)); }

PauliRates pauli_rates(const Generator& g) {
    const int n = g.dim();
    const Matrix dl = g.delta();
    PauliRates p;
    p.W.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) p.W(i, j) = dl(i + i * n, j + j * n).real();
    Eigen::EigenSolver<RealMatrix> es(p.W);
    Vector ev = es.eigenvalues();
    Matrix vecs = es.eigenvectors();
    std::vector<int> idx(n);
    for (int k = 0; k < n; ++k) idx[k] = k;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return ev(a).real() > ev(b).real(); });
    p.eigenvalues.resize(n);
    p.eigenvectors.resize(n, n);
    for (int k = 0; k < n; ++k) {
        p.eigenvalues(k) = ev(idx[k]);
        p.eigenvectors.col(k) = vecs.col(idx[k]);
    }
    return p;
}

PerturbationReport liouville_corrections(const Generator& g) {
    const auto& sys = g.sys();
    const int n = sys.dim;
    const Matrix dl = g.delta();
    PerturbationReport r;
    r.margins = margins_for(sys, gamma_d(g));
    r.pauli = pauli_rates(g);

    const double flag = std::max(kFlagFactor * r.margins.gamma_D, sys.degeneracy_tol());
    auto w = [&](int i, int j) { return sys.energies[i] - sys.energies[j]; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            const int col = i + j * n;
            r.delta_f[{i, j}] = dl(col, col);

            bool near = false;
            for (int l = 0; l < n && !near; ++l)
                for (int k = 0; k < n && !near; ++k)
                    if ((k != i || l != j) && std::abs(w(i, j) - w(k, l)) < flag) near = true;
            if (near) {
                r.flagged.insert({i, j});
                continue;
            }
            Matrix ds = Matrix::Zero(n, n);
            for (int l = 0; l < n; ++l)
                for (int k = 0; k < n; ++k)
                    if (k != i || l != j) ds(k, l) = dl(k + l * n, col) / (cplx(0, -1) * (w(i, j) - w(k, l)));
            r.delta_sigma[{i, j}] = std::move(ds);
        }
    return r;
}

std::string corrections_csv(const PerturbationReport& r) {
    std::ostringstream os;
    os << "i,j,re_delta_f,im_delta_f,flagged\n";
    for (const auto& [ij, f] : r.delta_f)
        os << ij.first << ',' << ij.second << ',' << fmt(f.real()) << ',' << fmt(f.imag()) << ','
           << (r.flagged.count(ij) ? 1 : 0) << '\n';
    return os.str();
}

std::string margins_text(const Margins& m) {
    std::ostringstream os;
    os << "gamma_D: " << fmt(m.gamma_D) << '\n'
       << "min_gap: " << fmt(m.min_gap) << '\n'
       << "min_gap_gap: " << fmt(m.min_gap_gap) << '\n'
       << "weak_coupling: " << (m.weak_coupling ? "pass" : "warn") << '\n'
       << "secular: " << (m.secular ? "pass" : "warn") << '\n';
    return os.str();
}

} // namespace rwa
