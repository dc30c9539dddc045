#include "rwa/linalg.hpp"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

namespace rwa {

Vector vec(const Matrix& m) {
    Vector v(m.size());
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i) v(i + j * m.rows()) = m(i, j);
    return v;
}

Matrix unvec(const Vector& v, int n) {
    if (v.size() != static_cast<Eigen::Index>(n) * n)
        throw ValidationError("unvec: size mismatch");
    Matrix m(n, n);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) m(i, j) = v(i + j * n);
    return m;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix sandwich(const Matrix& a, const Matrix& b) { return kron(b.transpose(), a); }

Matrix commutator_superop(const Matrix& h) {
    const Matrix id = Matrix::Identity(h.rows(), h.cols());
    return cplx(0, -1) * (kron(id, h) - kron(h.transpose(), id));
}

Matrix dissipator_superop(const std::vector<Matrix>& basis, const Matrix& d) {
    if (basis.empty()) throw ValidationError("dissipator_superop: empty basis");
    const int n = static_cast<int>(basis.front().rows());
    const int nb = static_cast<int>(basis.size());
    // jump part sum_ab D_ab e_a X e_b^+ is the un-realigned E D E^+
    Matrix e(n * n, nb);
    Matrix g = Matrix::Zero(n, n);
    for (int a = 0; a < nb; ++a) e.col(a) = vec(basis[a]);
    const Matrix ed = e * d; // column b: vec(sum_a D_ab e_a)
    for (int b = 0; b < nb; ++b) g -= 0.5 * basis[b].adjoint() * unvec(ed.col(b), n);
    const Matrix r = ed * e.adjoint();
    const Matrix id = Matrix::Identity(n, n);
    Matrix out = kron(id, g) + kron(g.transpose(), id);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) out(k + l * n, i + j * n) += r(k + i * n, l + j * n);
    return out;
}

Matrix apply(const Matrix& super, const Matrix& x) {
    return unvec(super * vec(x), static_cast<int>(x.rows()));
}

Matrix realign(const Matrix& s, int n) {
    Matrix r(n * n, n * n);
    for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) r(k + i * n, l + j * n) = s(k + l * n, i + j * n);
    return r;
}

Matrix choi(const Matrix& s, int n) {
    Matrix c(n * n, n * n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) c(i * n + k, j * n + l) = s(k + l * n, i + j * n);
    return c;
}

std::vector<Matrix> traceless_basis(int n) {
    std::vector<Matrix> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            Matrix e = Matrix::Zero(n, n);
            e(i, j) = 1.0;
            out.push_back(e);
        }
    // generalized Gell-Mann diagonals
    for (int k = 1; k < n; ++k) {
        Matrix e = Matrix::Zero(n, n);
        const double c = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) e(i, i) = c;
        e(k, k) = -k * c;
        out.push_back(e);
    }
    return out;
}

Matrix expm(const Matrix& m) { return m.exp(); }

SuperExponential::SuperExponential(const Matrix& super, double cond_limit) : s_(super) {
    Eigen::ComplexEigenSolver<Matrix> es(super);
    if (es.info() != Eigen::Success) return;
    Eigen::JacobiSVD<Matrix> svd(es.eigenvectors());
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (!(smin > 0) || sv(0) / smin > cond_limit) return;
    lambda_ = es.eigenvalues();
    v_ = es.eigenvectors();
    vinv_ = v_.inverse();
    diag_ = true;
}

Matrix SuperExponential::at(double t) const {
    if (t == 0.0) return Matrix::Identity(s_.rows(), s_.cols());
    if (!diag_) return expm(t * s_);
    Vector e(lambda_.size());
    for (Eigen::Index i = 0; i < lambda_.size(); ++i) e(i) = std::exp(t * lambda_(i));
    return v_ * e.asDiagonal() * vinv_;
}

std::vector<int> min_cost_assignment(const RealMatrix& cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw ValidationError("min_cost_assignment: cost matrix must be square");
    const double inf = std::numeric_limits<double>::infinity();
    // potentials u (rows), v (columns); p[j] = row matched to column j, 1-based with 0 as sentinel
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> out(n);
    for (int j = 1; j <= n; ++j) out[p[j] - 1] = j - 1;
    return out;
}

double paired_distance(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw ValidationError("paired_distance: size mismatch");
    const Eigen::Index n = a.size();
    RealMatrix c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) c(i, j) = std::abs(a(i) - b(j));
    const auto p = min_cost_assignment(c);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, c(i, p[i]));
    return worst;
}

bool is_hermitian(const Matrix& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

} // namespace rwa
