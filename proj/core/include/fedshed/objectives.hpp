#pragma once

#include <cstddef>
#include <vector>

#include "fedshed/numkernel.hpp"

namespace fedshed::objectives {

using numkernel::DenseMatrix;
using numkernel::Vector;

enum class Kind { LeastSquares, Logistic };

/* Regularized empirical risk: (1/N_i) sum_j loss(x_j; theta) + (mu/2)||theta||^2.
 * Least squares loss is (1/2)(x^T theta - y)^2; logistic loss is
 * log(1 + exp(-y x^T theta)) with labels in {-1, +1}. */
struct ObjectiveSpec {
  Kind kind = Kind::LeastSquares;
  double mu = 0.0;
};

/* One agent's shard.  Samples are the columns of x (n rows, N_i columns);
 * weight is the aggregation weight p_i = N_i / N. */
struct LocalData {
  DenseMatrix x;
  Vector y;
  double weight = 1.0;
};

double cost(const ObjectiveSpec& spec, const LocalData& data, const Vector& theta);
Vector gradient(const ObjectiveSpec& spec, const LocalData& data, const Vector& theta);
DenseMatrix hessian(const ObjectiveSpec& spec, const LocalData& data, const Vector& theta);

/* Closed-form least squares optimum: solve ((1/N) X X^T + mu I) theta = (1/N) X Y.
 * Throws if the system is singular (mu = 0 and rank-deficient data). */
Vector ls_optimum(const ObjectiveSpec& spec, const LocalData& data);

/* Damped Newton solve to high precision; reference optimum for diagnostics.
 * Returns the iterate once ||grad|| <= tol, or throws after max_iters. */
Vector newton_optimum(const ObjectiveSpec& spec, const LocalData& data, double tol = 1e-14,
                      int max_iters = 200);

// Concatenate shards into one pooled dataset (weight 1).
LocalData pooled(const std::vector<LocalData>& shards);

// Numerically stable log(1 + exp(z)) and 1/(1 + exp(-z)).
double softplus(double z);
double sigmoid(double z);

}  // namespace fedshed::objectives
