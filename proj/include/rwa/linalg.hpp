#pragma once

#include <vector>

#include "rwa/types.hpp"

// Superoperator helpers. Vectorization is column-stacking throughout:
// vec(A X B) = (B^T kron A) vec(X), and |i><j| sits at index i + j*N.
namespace rwa {

Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, int n);

Matrix kron(const Matrix& a, const Matrix& b);

// X -> A X B
Matrix sandwich(const Matrix& a, const Matrix& b);
// X -> -i[H, X]
Matrix commutator_superop(const Matrix& h);
// X -> sum_nm D_nm (e_n X e_m^+ - 1/2 {e_m^+ e_n, X})
Matrix dissipator_superop(const std::vector<Matrix>& basis, const Matrix& d);

Matrix apply(const Matrix& super, const Matrix& x);

// Realignment R[(k,i),(l,j)] = S[(k,l),(i,j)]. For S = conj(B) kron A
// (the map X -> A X B^+) this gives vec(A) vec(B)^+.
Matrix realign(const Matrix& super, int n);
// Choi matrix sum_ij |i><j| kron Phi(|i><j|), indices (i,k),(j,l).
Matrix choi(const Matrix& super, int n);

// Orthonormal (Hilbert-Schmidt) traceless basis of N^2-1 elements: the
// off-diagonal matrix units |i><j|, i != j, then N-1 diagonal ones.
std::vector<Matrix> traceless_basis(int n);

// exp(t S): eigendecomposition when the eigenvector matrix is well
// conditioned, scaling-and-squaring otherwise.
class SuperExponential {
public:
    explicit SuperExponential(const Matrix& super, double cond_limit = 1e8);
    Matrix at(double t) const;
    bool diagonalizable() const { return diag_; }

private:
    Matrix s_;
    bool diag_ = false;
    Vector lambda_;
    Matrix v_, vinv_;
};

Matrix expm(const Matrix& m);

// Hungarian method on a square cost matrix: row r goes to column result[r],
// minimising the total cost.
std::vector<int> min_cost_assignment(const RealMatrix& cost);
// max_k |a_k - b_p(k)| under the assignment p minimising sum |a - b|
double paired_distance(const Vector& a, const Vector& b);

bool is_hermitian(const Matrix& m, double tol);
double max_abs(const Matrix& m);

} // namespace rwa
