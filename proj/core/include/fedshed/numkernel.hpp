#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fedshed::numkernel {

using Vector = std::vector<double>;

/*
 * Dense row-major matrix.  All numerical kernels in this library are
 * dense and double precision; problem sizes stay at a few hundred rows.
 */
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> entries;  // row-major, rows*cols

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return entries[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries[i * cols + j]; }

  static DenseMatrix identity(std::size_t n);
};

/* Eigendecomposition of a symmetric matrix: values descending, vectors
 * stored as columns of an orthonormal matrix, A = V diag(values) V^T. */
struct SymEigen {
  Vector values;        // descending
  DenseMatrix vectors;  // column k is the eigenvector of values[k]
};

// ---- vector helpers ----
double dot(const Vector& a, const Vector& b);
double norm2(const Vector& a);
// y += c * x
void axpy(double c, const Vector& x, Vector& y);
Vector scaled(const Vector& x, double c);
Vector sub(const Vector& a, const Vector& b);

// ---- matrix helpers ----
Vector matvec(const DenseMatrix& a, const Vector& x);
// A^T x (A is n x m, x has n entries, result m entries)
Vector tmatvec(const DenseMatrix& a, const Vector& x);
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
// A * A^T for an n x m matrix, returned as n x n
DenseMatrix gram(const DenseMatrix& a);
// A * diag(w) * A^T
DenseMatrix weighted_gram(const DenseMatrix& a, const Vector& w);
// A += c * v v^T
void rank1_update(DenseMatrix& a, double c, const Vector& v);
// A += c * B
void add_scaled(DenseMatrix& a, double c, const DenseMatrix& b);
double frobenius(const DenseMatrix& a);
double max_abs(const DenseMatrix& a);
double trace(const DenseMatrix& a);
// max_{i,j} |A(i,j) - A(j,i)| <= 1e-12 * max_abs(A)
bool is_symmetric(const DenseMatrix& a);

/*
 * Cyclic Jacobi eigendecomposition of a symmetric matrix.
 * Sweeps until off(A) <= 1e-13 * ||A||_F, at most 100 sweeps.
 * Deterministic output order: eigenvalues descending, ties kept in
 * rotation output order, and each eigenvector's first nonzero component
 * made positive.
 * Throws std::invalid_argument on non-square or asymmetric input and
 * std::runtime_error if the sweep cap is hit.
 */
SymEigen sym_eigendecompose(const DenseMatrix& a);

/*
 * Solve A x = b for symmetric positive definite A by Cholesky.
 * One recovery attempt on a failed pivot: add 1e-12 * trace(A)/n to the
 * diagonal and refactor; a second failure throws std::runtime_error
 * naming the offending pivot index.
 */
Vector solve_spd(const DenseMatrix& a, const Vector& b);

// Largest |eigenvalue| of a symmetric matrix.
double spectral_norm(const DenseMatrix& a);

}  // namespace fedshed::numkernel
