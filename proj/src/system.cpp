#include "rwa/system.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace rwa {

const Matrix& SystemSpec::coupling(const std::string& name) const {
    for (const auto& c : couplings)
        if (c.name == name) return c.op;
    std::string known;
    for (const auto& c : couplings) known += (known.empty() ? "" : ", ") + c.name;
    throw ValidationError("unknown coupling '" + name + "' (available: " + known + ")");
}

bool SystemSpec::has_coupling(const std::string& name) const {
    return std::any_of(couplings.begin(), couplings.end(),
                       [&](const NamedOperator& c) { return c.name == name; });
}

Matrix SystemSpec::hamiltonian() const {
    Matrix h = Matrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) h(i, i) = energies[i];
    return h;
}

double SystemSpec::degeneracy_tol() const {
    double m = 0.0;
    for (double e : energies) m = std::max(m, std::abs(e));
    return 1e-9 * std::max(m, 1e-300);
}

void SystemSpec::validate() const {
    if (dim <= 0) throw ValidationError("system: dim must be positive");
    if (static_cast<int>(energies.size()) != dim) throw ValidationError("system: energies size != dim");
    if (!std::is_sorted(energies.begin(), energies.end()))
        throw ValidationError("system: energies must be ascending");
    for (const auto& c : couplings) {
        if (c.op.rows() != dim || c.op.cols() != dim)
            throw ValidationError("system: coupling '" + c.name + "' has wrong shape");
        if ((c.op - c.op.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
            throw ValidationError("system: coupling '" + c.name + "' is not Hermitian");
    }
}

std::uint64_t SystemSpec::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    mix(&dim, sizeof dim);
    for (double e : energies) mix(&e, sizeof e);
    for (const auto& c : couplings) {
        mix(c.name.data(), c.name.size());
        for (Eigen::Index k = 0; k < c.op.size(); ++k) {
            const double re = c.op(k).real(), im = c.op(k).imag();
            mix(&re, sizeof re);
            mix(&im, sizeof im);
        }
    }
    return h;
}

Matrix lowering(int n) {
    Matrix a = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
    return a;
}

SystemSpec two_level(double Omega) {
    if (!(Omega > 0)) throw ValidationError("two_level: Omega must be > 0");
    SystemSpec s;
    s.dim = 2;
    s.energies = {-0.5 * Omega, 0.5 * Omega};
    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    s.couplings = {{"x", sx}};
    s.labels = {"-", "+"};
    return s;
}

SystemSpec oscillator(double Omega, double M, int n_fock) {
    if (!(Omega > 0)) throw ValidationError("oscillator: Omega must be > 0");
    if (!(M > 0)) throw ValidationError("oscillator: mass must be > 0");
    if (n_fock < 2) throw ValidationError("oscillator: n_fock must be >= 2");
    SystemSpec s;
    s.dim = n_fock;
    for (int k = 0; k < n_fock; ++k) {
        s.energies.push_back(k * Omega);
        s.labels.push_back(std::to_string(k));
    }
    const Matrix a = lowering(n_fock);
    const Matrix ad = a.adjoint();
    s.couplings = {{"x", (a + ad) / std::sqrt(2.0 * M * Omega)},
                   {"p", cplx(0, std::sqrt(M * Omega / 2.0)) * (ad - a)}};
    return s;
}

SystemSpec compose(const SystemSpec& a, const SystemSpec& b, const Matrix& h_ab) {
    a.validate();
    b.validate();
    const int n = a.dim * b.dim;
    if (h_ab.rows() != n || h_ab.cols() != n)
        throw ValidationError("compose: h_ab must be " + std::to_string(n) + "x" + std::to_string(n));
    if ((h_ab - h_ab.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
        throw ValidationError("compose: h_ab is not Hermitian");
    const Matrix ia = Matrix::Identity(a.dim, a.dim), ib = Matrix::Identity(b.dim, b.dim);
    auto kr = [](const Matrix& x, const Matrix& y) {
        Matrix out(x.rows() * y.rows(), x.cols() * y.cols());
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j)
                out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
        return out;
    };
    Matrix h = kr(a.hamiltonian(), ib) + kr(ia, b.hamiltonian()) + h_ab;
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw NumericalError("compose: eigensolver failed");
    const Matrix u = es.eigenvectors();

    SystemSpec s;
    s.dim = n;
    for (int i = 0; i < n; ++i) s.energies.push_back(es.eigenvalues()(i));
    for (const auto& c : a.couplings) {
        Matrix op = u.adjoint() * kr(c.op, ib) * u;
        s.couplings.push_back({"A." + c.name, 0.5 * (op + op.adjoint())});
    }
    for (const auto& c : b.couplings) {
        Matrix op = u.adjoint() * kr(ia, c.op) * u;
        s.couplings.push_back({"B." + c.name, 0.5 * (op + op.adjoint())});
    }
    s.composition = {a.dim, b.dim, u};
    return s;
}

PmSplit split_pm(const Matrix& l, const SystemSpec& sys) {
    const int n = sys.dim;
    if (l.rows() != n || l.cols() != n) throw ValidationError("split_pm: operator shape mismatch");
    const double tol = sys.degeneracy_tol();
    PmSplit s{Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix::Zero(n, n), Matrix()};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double w = sys.energies[i] - sys.energies[j];
            if (std::abs(w) <= tol)
                s.zero(i, j) = l(i, j);
            else if (w > 0)
                s.plus(i, j) = l(i, j);
            else
                s.minus(i, j) = l(i, j);
        }
    s.j = cplx(0, 1) * (s.plus - s.minus);
    return s;
}

PmSplit split_pm(const std::string& name, const SystemSpec& sys) {
    return split_pm(sys.coupling(name), sys);
}

BohrSpectrum bohr_spectrum(const SystemSpec& sys) {
    const int n = sys.dim;
    const double tol = sys.degeneracy_tol();
    std::vector<std::pair<int, int>> idx;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) idx.emplace_back(i, j);
    auto w = [&](const std::pair<int, int>& p) { return sys.energies[p.first] - sys.energies[p.second]; };
    std::stable_sort(idx.begin(), idx.end(), [&](const auto& x, const auto& y) { return w(x) < w(y); });

    BohrSpectrum out;
    out.dim = n;
    out.group.assign(static_cast<std::size_t>(n) * n, -1);
    double anchor = 0.0;
    for (const auto& p : idx) {
        const double v = w(p);
        if (out.frequencies.empty() || v - anchor > tol) {
            anchor = v;
            out.frequencies.push_back({v, {}});
        }
        out.frequencies.back().pairs.push_back(p);
        out.group[p.first + p.second * n] = static_cast<int>(out.frequencies.size()) - 1;
    }
    // representative value: mean of the group, with exact 0 for the diagonal group
    for (auto& f : out.frequencies) {
        double s = 0.0;
        bool diag = false;
        for (const auto& p : f.pairs) {
            s += w(p);
            diag = diag || p.first == p.second;
        }
        f.omega = diag ? 0.0 : s / f.pairs.size();
    }
    return out;
}

} // namespace rwa
