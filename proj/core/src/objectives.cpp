#include "fedshed/objectives.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace fedshed::objectives {

namespace {

void check_shapes(const LocalData& data, const Vector& theta, const char* who) {
  if (data.x.rows != theta.size())
    throw std::invalid_argument(std::string(who) + ": feature dimension " +
                                std::to_string(data.x.rows) + " does not match theta size " +
                                std::to_string(theta.size()) + ".");
  if (data.x.cols != data.y.size())
    throw std::invalid_argument(std::string(who) + ": sample count mismatch between X and Y.");
  if (data.x.cols == 0) throw std::invalid_argument(std::string(who) + ": empty shard.");
}

void check_binary_labels(const LocalData& data, const char* who) {
  for (std::size_t j = 0; j < data.y.size(); ++j)
    if (data.y[j] != 1.0 && data.y[j] != -1.0)
      throw std::invalid_argument(std::string(who) + ": logistic label at sample " +
                                  std::to_string(j) + " is not in {-1, +1}.");
}

}  // namespace

double softplus(double z) {
  // Branch at 0 so the exp argument is never positive.
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

double cost(const ObjectiveSpec& spec, const LocalData& data, const Vector& theta) {
  check_shapes(data, theta, "cost");
  std::size_t ni = data.x.cols;
  Vector margins = numkernel::tmatvec(data.x, theta);  // x_j^T theta
  double s = 0.0;
  if (spec.kind == Kind::LeastSquares) {
    for (std::size_t j = 0; j < ni; ++j) {
      double r = margins[j] - data.y[j];
      s += 0.5 * r * r;
    }
  } else {
    check_binary_labels(data, "cost");
    for (std::size_t j = 0; j < ni; ++j) s += softplus(-data.y[j] * margins[j]);
  }
  s /= static_cast<double>(ni);
  s += 0.5 * spec.mu * numkernel::dot(theta, theta);
  return s;
}

Vector gradient(const ObjectiveSpec& spec, const LocalData& data, const Vector& theta) {
  check_shapes(data, theta, "gradient");
  std::size_t ni = data.x.cols;
  Vector margins = numkernel::tmatvec(data.x, theta);
  Vector coeff(ni);
  if (spec.kind == Kind::LeastSquares) {
    for (std::size_t j = 0; j < ni; ++j) coeff[j] = margins[j] - data.y[j];
  } else {
    check_binary_labels(data, "gradient");
    // d/dm log(1+exp(-y m)) = -y sigma(-y m)
    for (std::size_t j = 0; j < ni; ++j)
      coeff[j] = -data.y[j] * sigmoid(-data.y[j] * margins[j]);
  }
  Vector g = numkernel::matvec(data.x, coeff);
  double inv = 1.0 / static_cast<double>(ni);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = g[i] * inv + spec.mu * theta[i];
  return g;
}

DenseMatrix hessian(const ObjectiveSpec& spec, const LocalData& data, const Vector& theta) {
  check_shapes(data, theta, "hessian");
  std::size_t n = data.x.rows;
  std::size_t ni = data.x.cols;
  DenseMatrix h(n, n);
  if (spec.kind == Kind::LeastSquares) {
    h = numkernel::gram(data.x);
  } else {
    check_binary_labels(data, "hessian");
    Vector margins = numkernel::tmatvec(data.x, theta);
    Vector w(ni);
    for (std::size_t j = 0; j < ni; ++j) {
      double s = sigmoid(data.y[j] * margins[j]);
      w[j] = s * (1.0 - s);
    }
    h = numkernel::weighted_gram(data.x, w);
  }
  double inv = 1.0 / static_cast<double>(ni);
  for (double& v : h.entries) v *= inv;
  for (std::size_t i = 0; i < n; ++i) h(i, i) += spec.mu;
  return h;
}

Vector ls_optimum(const ObjectiveSpec& spec, const LocalData& data) {
  if (spec.kind != Kind::LeastSquares)
    throw std::invalid_argument("ls_optimum: objective is not least squares.");
  if (data.x.cols != data.y.size())
    throw std::invalid_argument("ls_optimum: sample count mismatch between X and Y.");
  Vector theta0(data.x.rows, 0.0);
  DenseMatrix h = hessian(spec, data, theta0);
  Vector rhs = numkernel::matvec(data.x, data.y);
  double inv = 1.0 / static_cast<double>(data.x.cols);
  for (double& v : rhs) v *= inv;
  try {
    return numkernel::solve_spd(h, rhs);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(std::string("ls_optimum: normal equations are singular (") +
                             e.what() + ")");
  }
}

Vector newton_optimum(const ObjectiveSpec& spec, const LocalData& data, double tol,
                      int max_iters) {
  Vector theta(data.x.rows, 0.0);
  for (int it = 0; it < max_iters; ++it) {
    Vector g = gradient(spec, data, theta);
    double gn = numkernel::norm2(g);
    if (gn <= tol) return theta;
    DenseMatrix h = hessian(spec, data, theta);
    Vector p = numkernel::solve_spd(h, g);
    // Halve until either the cost or the gradient norm decreases. Cost alone
    // stalls once its decrease falls below one rounding ulp, while the
    // gradient norm keeps contracting under full Newton steps.
    double f0 = cost(spec, data, theta);
    double step = 1.0;
    for (int k = 0; k < 60; ++k) {
      Vector cand = theta;
      numkernel::axpy(-step, p, cand);
      if (cost(spec, data, cand) <= f0 ||
          numkernel::norm2(gradient(spec, data, cand)) < gn) {
        theta = cand;
        break;
      }
      step *= 0.5;
    }
  }
  Vector g = gradient(spec, data, theta);
  if (numkernel::norm2(g) <= tol) return theta;
  char msg[96];
  std::snprintf(msg, sizeof msg, "newton_optimum: no convergence to tolerance %g", tol);
  throw std::runtime_error(msg);
}

LocalData pooled(const std::vector<LocalData>& shards) {
  if (shards.empty()) throw std::invalid_argument("pooled: no shards.");
  std::size_t n = shards.front().x.rows;
  std::size_t total = 0;
  for (const auto& s : shards) {
    if (s.x.rows != n) throw std::invalid_argument("pooled: inconsistent feature dimension.");
    total += s.x.cols;
  }
  LocalData out;
  out.x = DenseMatrix(n, total);
  out.y.resize(total);
  out.weight = 1.0;
  std::size_t col = 0;
  for (const auto& s : shards) {
    for (std::size_t j = 0; j < s.x.cols; ++j, ++col) {
      for (std::size_t i = 0; i < n; ++i) out.x(i, col) = s.x(i, j);
      out.y[col] = s.y[j];
    }
  }
  return out;
}

}  // namespace fedshed::objectives
