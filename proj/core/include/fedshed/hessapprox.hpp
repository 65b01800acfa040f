#pragma once

#include <cstddef>
#include <vector>

#include "fedshed/numkernel.hpp"

namespace fedshed::hessapprox {

using numkernel::DenseMatrix;
using numkernel::Vector;

// Unit eigenvector with its eigenvalue.
struct EigenPair {
  double lambda = 0.0;
  Vector v;
};

/* Wire form of one eigenpair: tilde_v = sqrt(lambda - rho) * v for the rho
 * current when the pair was emitted.  lambda rides along so the receiver
 * can recover v and the scale exactly. */
struct ScaledPair {
  double lambda = 0.0;
  Vector tilde_v;
};

/*
 * Master-side running state for one agent's Hessian approximation.
 * S accumulates lambda_j v_j v_j^T and P accumulates v_j v_j^T over the
 * q pairs received since the anchor, so the approximation can be
 * re-priced for any rho in O(n^2):
 *
 *   H_hat = S - rho P + rho I.
 */
struct LocalApproxAssembly {
  int agent_id = 0;
  int anchor = 0;       // round the current spectrum was computed at
  double rho = 0.0;     // current full-rank parameter
  std::size_t q = 0;    // pairs received since the anchor
  DenseMatrix s;
  DenseMatrix p;
  double last_lambda;   // most recently received eigenvalue, for order checks

  LocalApproxAssembly() : last_lambda(0.0) {}
  LocalApproxAssembly(int agent, int anchor_round, std::size_t n);
};

struct AggregateResult {
  DenseMatrix h;        // sum_i p_i H_hat^{(i)}
  double rho_bar = 0.0;
  double lambda_n_bar = 0.0;
};

/*
 * Rank-q-plus-identity approximation sum_{j<=q} (lambda_j - rho) v_j v_j^T + rho I.
 * Pairs must be orthonormal (1e-8) with non-increasing eigenvalues; rho > 0.
 */
DenseMatrix approx_from_pairs(const std::vector<EigenPair>& pairs, double rho, std::size_t n);

/* Midpoint of the residual spectrum, (lambda_{q+1} + lambda_n)/2.
 * Requires lambda_{q+1} >= lambda_n > 0. */
double rho_star(double lambda_qp1, double lambda_n);

// Convex-case choice: rho = lambda_{q+1} (> 0 required).
double rho_convex(double lambda_qp1);

/* Scale pairs for transmission.  lambda may not fall below rho - 1e-12;
 * a tiny negative gap is clamped so lambda = rho encodes the zero vector
 * (still transmitted, still counted). */
std::vector<ScaledPair> encode_payload_pairs(const std::vector<EigenPair>& pairs, double rho);

/*
 * Fold newly received pairs into an assembly and re-price it at new_rho.
 * Pairs must continue the non-increasing eigenvalue order; violations throw.
 * Returns the updated assembly.
 */
LocalApproxAssembly apply_increment(LocalApproxAssembly assembly,
                                    const std::vector<ScaledPair>& new_pairs, double new_rho);

// H_hat = S - rho P + rho I for the assembly's current rho.
DenseMatrix assembled(const LocalApproxAssembly& assembly);

/*
 * Weighted aggregate over agents: H_t = sum_i p_i H_hat^{(i)},
 * rho_bar = sum_i p_i rho^{(i)}, lambda_n_bar = sum_i p_i lambda_n^{(i)}.
 * lambda_n per agent comes from the harness (it is a diagnostic, not
 * protocol data).  Weights must sum to 1 within 1e-12.
 */
AggregateResult aggregate(const std::vector<LocalApproxAssembly>& assemblies,
                          const Vector& weights, const Vector& lambda_ns);

}  // namespace fedshed::hessapprox
