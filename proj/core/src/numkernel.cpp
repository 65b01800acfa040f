#include "fedshed/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace fedshed::numkernel {

namespace {
const double SYMMETRY_REL_TOL = 1e-12;
const double JACOBI_OFF_REL_TOL = 1e-13;
const int JACOBI_MAX_SWEEPS = 100;
const double CHOLESKY_JITTER_REL = 1e-12;

void check_square(const DenseMatrix& a, const char* who) {
  if (a.rows != a.cols)
    throw std::invalid_argument(std::string(who) + ": matrix is not square (" +
                                std::to_string(a.rows) + "x" + std::to_string(a.cols) + ").");
}

void check_symmetric(const DenseMatrix& a, const char* who) {
  if (!is_symmetric(a))
    throw std::invalid_argument(std::string(who) + ": matrix is not symmetric.");
}

// Root-sum-square of the strict upper triangle, doubled for both halves.
double off_diagonal_norm(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = i + 1; j < a.cols; ++j) s += 2.0 * a(i, j) * a(i, j);
  return std::sqrt(s);
}
}  // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

double dot(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch.");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

void axpy(double c, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch.");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

Vector scaled(const Vector& x, double c) {
  Vector r(x);
  for (double& v : r) v *= c;
  return r;
}

Vector sub(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch.");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Vector matvec(const DenseMatrix& a, const Vector& x) {
  if (a.cols != x.size()) throw std::invalid_argument("matvec: size mismatch.");
  Vector r(a.rows, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double s = 0.0;
    const double* row = &a.entries[i * a.cols];
    for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * x[j];
    r[i] = s;
  }
  return r;
}

Vector tmatvec(const DenseMatrix& a, const Vector& x) {
  if (a.rows != x.size()) throw std::invalid_argument("tmatvec: size mismatch.");
  Vector r(a.cols, 0.0);
  for (std::size_t i = 0; i < a.rows; ++i) {
    const double* row = &a.entries[i * a.cols];
    for (std::size_t j = 0; j < a.cols; ++j) r[j] += row[j] * x[i];
  }
  return r;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("matmul: size mismatch.");
  DenseMatrix r(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

DenseMatrix gram(const DenseMatrix& a) {
  DenseMatrix r(a.rows, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = i; k < a.rows; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols; ++j) s += a(i, j) * a(k, j);
      r(i, k) = s;
      r(k, i) = s;
    }
  return r;
}

DenseMatrix weighted_gram(const DenseMatrix& a, const Vector& w) {
  if (a.cols != w.size()) throw std::invalid_argument("weighted_gram: size mismatch.");
  DenseMatrix r(a.rows, a.rows);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = i; k < a.rows; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < a.cols; ++j) s += w[j] * a(i, j) * a(k, j);
      r(i, k) = s;
      r(k, i) = s;
    }
  return r;
}

void rank1_update(DenseMatrix& a, double c, const Vector& v) {
  if (a.rows != v.size() || a.cols != v.size())
    throw std::invalid_argument("rank1_update: size mismatch.");
  // Write both halves from one rounded product so symmetry is exact.
  for (std::size_t i = 0; i < v.size(); ++i) {
    double cvi = c * v[i];
    a(i, i) += cvi * v[i];
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      double p = cvi * v[j];
      a(i, j) += p;
      a(j, i) += p;
    }
  }
}

void add_scaled(DenseMatrix& a, double c, const DenseMatrix& b) {
  if (a.rows != b.rows || a.cols != b.cols)
    throw std::invalid_argument("add_scaled: size mismatch.");
  for (std::size_t i = 0; i < a.entries.size(); ++i) a.entries[i] += c * b.entries[i];
}

double frobenius(const DenseMatrix& a) {
  double s = 0.0;
  for (double v : a.entries) s += v * v;
  return std::sqrt(s);
}

double max_abs(const DenseMatrix& a) {
  double m = 0.0;
  for (double v : a.entries) m = std::max(m, std::fabs(v));
  return m;
}

double trace(const DenseMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::min(a.rows, a.cols); ++i) s += a(i, i);
  return s;
}

bool is_symmetric(const DenseMatrix& a) {
  if (a.rows != a.cols) return false;
  double tol = SYMMETRY_REL_TOL * max_abs(a);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = i + 1; j < a.cols; ++j)
      if (std::fabs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

SymEigen sym_eigendecompose(const DenseMatrix& input) {
  check_square(input, "sym_eigendecompose");
  check_symmetric(input, "sym_eigendecompose");
  std::size_t n = input.rows;
  DenseMatrix a = input;
  DenseMatrix v = DenseMatrix::identity(n);
  double norm = frobenius(input);

  if (n > 0 && norm > 0.0) {
    bool converged = false;
    for (int sweep = 0; sweep < JACOBI_MAX_SWEEPS; ++sweep) {
      if (off_diagonal_norm(a) <= JACOBI_OFF_REL_TOL * norm) {
        converged = true;
        break;
      }
      for (std::size_t p = 0; p + 1 < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
          double apq = a(p, q);
          if (apq == 0.0) continue;
          // Classic two-sided rotation that zeroes a(p,q).
          double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          double t = (theta >= 0.0 ? 1.0 : -1.0) /
                     (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
          double c = 1.0 / std::sqrt(t * t + 1.0);
          double s = t * c;
          double app = a(p, p), aqq = a(q, q);
          a(p, p) = app - t * apq;
          a(q, q) = aqq + t * apq;
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (std::size_t k = 0; k < n; ++k) {
            if (k == p || k == q) continue;
            double akp = a(k, p), akq = a(k, q);
            a(k, p) = c * akp - s * akq;
            a(p, k) = a(k, p);
            a(k, q) = s * akp + c * akq;
            a(q, k) = a(k, q);
          }
          for (std::size_t k = 0; k < n; ++k) {
            double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - s * vkq;
            v(k, q) = s * vkp + c * vkq;
          }
        }
      }
    }
    if (!converged && off_diagonal_norm(a) > JACOBI_OFF_REL_TOL * norm)
      throw std::runtime_error("sym_eigendecompose: no convergence within 100 sweeps.");
  }

  // Sort descending; stable so equal eigenvalues keep rotation output order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

  SymEigen out;
  out.values.resize(n);
  out.vectors = DenseMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t src = order[k];
    out.values[k] = a(src, src);
    // Sign convention: first nonzero component positive.
    double sign = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (v(i, src) != 0.0) {
        sign = v(i, src) > 0.0 ? 1.0 : -1.0;
        break;
      }
    }
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = sign * v(i, src);
  }
  return out;
}

namespace {
// Lower Cholesky factor in place; returns the offending pivot or -1.
long long cholesky(DenseMatrix& a) {
  std::size_t n = a.rows;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0 || !std::isfinite(d)) return static_cast<long long>(j);
    d = std::sqrt(d);
    a(j, j) = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / d;
    }
  }
  return -1;
}
}  // namespace

Vector solve_spd(const DenseMatrix& input, const Vector& b) {
  check_square(input, "solve_spd");
  check_symmetric(input, "solve_spd");
  if (input.rows != b.size()) throw std::invalid_argument("solve_spd: rhs size mismatch.");
  std::size_t n = input.rows;

  DenseMatrix l = input;
  long long pivot = cholesky(l);
  if (pivot >= 0) {
    // One recovery attempt for matrices that are PD up to roundoff.
    l = input;
    double jitter = CHOLESKY_JITTER_REL * trace(input) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) l(i, i) += jitter;
    pivot = cholesky(l);
    if (pivot >= 0)
      throw std::runtime_error("solve_spd: matrix is not positive definite (pivot " +
                               std::to_string(pivot) + ").");
  }

  // L y = b, then L^T x = y.
  Vector x(b);
  for (std::size_t i = 0; i < n; ++i) {
    double s = x[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
    x[i] = s / l(i, i);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

double spectral_norm(const DenseMatrix& a) {
  SymEigen e = sym_eigendecompose(a);
  double m = 0.0;
  for (double v : e.values) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace fedshed::numkernel
