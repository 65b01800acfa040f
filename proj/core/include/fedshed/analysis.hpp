#pragma once

#include <cstddef>
#include <vector>

#include "fedshed/numkernel.hpp"

namespace fedshed::analysis {

using numkernel::Vector;

/* Per-round contraction factor 1 - lambda_n_bar / rho_bar.
 * Requires rho_bar >= lambda_n_bar > 0. */
double contraction_factor(double rho_bar, double lambda_n_bar);

/* Best centralized one-step rate for a quadratic with spectrum `values`
 * (descending) after q pairs: 1 - lambda_n / rho_star(lambda_{q+1}, lambda_n). */
double best_rate(const Vector& values, std::size_t q);

/* Step size minimizing the worst residual factor for a given rho:
 * eta* = 2 rho / (lambda_{q+1} + lambda_n).  rho must lie in
 * [lambda_n, lambda_{q+1}]. */
double optimal_eta(double rho, double lambda_qp1, double lambda_n);

/* Strict stability window for quadratics: 0 < eta < min(2 rho / lambda_{q+1}, 2). */
bool stability_check(double eta, double rho, double lambda_qp1);

/* Geometric mean of per-round contraction factors over one period,
 * computed in the log domain; any zero factor collapses the bound to 0.
 * Factors must lie in [0, 1]. */
double lyap_bound_periodic(const Vector& factors);

/*
 * Linear-phase bound for the general convex schedule with one pair per
 * round: prod_{k=1..T} (1 - lambda_n_bar_o / rho_bar_k_o)^{1/T}, where
 * spectra are evaluated at the optimum, rho_k per agent is
 * lambda_{k+1}(theta*), and agent averages use the supplied weights.
 * spectra[i] is agent i's descending spectrum at the optimum; T < n.
 */
double lyap_bound_convex(const std::vector<Vector>& spectra, const Vector& weights,
                         std::size_t T);

/* Step size every federated Armijo check accepts with alpha < 1/2:
 * min_i rho^{(i)} / lambda_{q+1}^{(i)}. */
double armijo_sufficient_step(const Vector& rhos, const Vector& lambda_qp1s);

/*
 * One-round error bound for the general convex phase:
 *   c1 * dist_opt + c2 * dist_opt^2
 * with c1 = (1 - lambda_n_bar/rho_bar) + (L/rho_bar) dist_anchor
 *          + (1 - eta) hess_norm / rho_bar
 * and  c2 = eta L / (2 rho_bar).
 * L is the Hessian Lipschitz constant, supplied by the caller.
 */
double convex_phase_bound(double rho_bar, double lambda_n_bar, double L, double eta,
                      double hess_norm, double dist_anchor, double dist_opt);

/* Convergence diagnostics for one run: per-round factors, their running
 * geometric mean, the periodic bound, the best-rate table of the global
 * spectrum, and how many rounds sit in the exactness set (rho_bar equal
 * to lambda_n_bar to within 1e-12 relative). */
struct RateReport {
  Vector c_t;            // per-round contraction factors
  Vector a_t;            // running geometric mean of c_t
  double a_bar_T = 1.0;  // geometric mean over the last full period, if T > 0
  Vector r_star_table;   // best_rate(spectrum, q) for q = 0..n-1
  std::size_t exact_rounds = 0;
};

RateReport make_rate_report(const Vector& rho_bars, const Vector& lambda_n_bars,
                            const Vector& global_spectrum, std::size_t T);

}  // namespace fedshed::analysis
