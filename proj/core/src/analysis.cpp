#include "fedshed/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fedshed/hessapprox.hpp"

namespace fedshed::analysis {

double contraction_factor(double rho_bar, double lambda_n_bar) {
  if (!(lambda_n_bar > 0.0))
    throw std::invalid_argument("contraction_factor: lambda_n_bar must be positive.");
  if (rho_bar < lambda_n_bar)
    throw std::invalid_argument("contraction_factor: rho_bar below lambda_n_bar.");
  return 1.0 - lambda_n_bar / rho_bar;
}

double best_rate(const Vector& values, std::size_t q) {
  if (values.empty()) throw std::invalid_argument("best_rate: empty spectrum.");
  if (q >= values.size()) throw std::invalid_argument("best_rate: q out of range.");
  double lambda_n = values.back();
  double lambda_qp1 = values[q];  // 1-based lambda_{q+1}
  double rs = hessapprox::rho_star(lambda_qp1, lambda_n);
  return 1.0 - lambda_n / rs;
}

double optimal_eta(double rho, double lambda_qp1, double lambda_n) {
  if (!(lambda_n > 0.0)) throw std::invalid_argument("optimal_eta: lambda_n must be positive.");
  if (rho < lambda_n || rho > lambda_qp1)
    throw std::invalid_argument("optimal_eta: rho outside [lambda_n, lambda_{q+1}].");
  return 2.0 * rho / (lambda_qp1 + lambda_n);
}

bool stability_check(double eta, double rho, double lambda_qp1) {
  if (!(rho > 0.0) || !(lambda_qp1 > 0.0))
    throw std::invalid_argument("stability_check: rho and lambda_{q+1} must be positive.");
  double bound = std::min(2.0 * rho / lambda_qp1, 2.0);
  return eta > 0.0 && eta < bound;
}

double lyap_bound_periodic(const Vector& factors) {
  if (factors.empty()) throw std::invalid_argument("lyap_bound_periodic: no factors.");
  double logsum = 0.0;
  for (double c : factors) {
    if (c < 0.0 || c > 1.0)
      throw std::invalid_argument("lyap_bound_periodic: factor outside [0, 1].");
    if (c == 0.0) return 0.0;
    logsum += std::log(c);
  }
  return std::exp(logsum / static_cast<double>(factors.size()));
}

double lyap_bound_convex(const std::vector<Vector>& spectra, const Vector& weights,
                         std::size_t T) {
  if (spectra.empty()) throw std::invalid_argument("lyap_bound_convex: no spectra.");
  if (weights.size() != spectra.size())
    throw std::invalid_argument("lyap_bound_convex: weight count mismatch.");
  std::size_t n = spectra.front().size();
  for (const auto& s : spectra)
    if (s.size() != n) throw std::invalid_argument("lyap_bound_convex: ragged spectra.");
  if (T == 0 || T >= n)
    throw std::invalid_argument("lyap_bound_convex: need 0 < T < n, got T = " +
                                std::to_string(T) + ".");

  double lambda_n_bar = 0.0;
  for (std::size_t i = 0; i < spectra.size(); ++i)
    lambda_n_bar += weights[i] * spectra[i].back();

  Vector factors;
  factors.reserve(T);
  for (std::size_t k = 1; k <= T; ++k) {
    // One pair per round: after round k agent i holds q = k pairs, so its
    // rho at the optimum is lambda_{k+1}, 0-based index k.
    double rho_bar_k = 0.0;
    for (std::size_t i = 0; i < spectra.size(); ++i) rho_bar_k += weights[i] * spectra[i][k];
    factors.push_back(contraction_factor(rho_bar_k, lambda_n_bar));
  }
  return lyap_bound_periodic(factors);
}

double armijo_sufficient_step(const Vector& rhos, const Vector& lambda_qp1s) {
  if (rhos.empty() || rhos.size() != lambda_qp1s.size())
    throw std::invalid_argument("armijo_sufficient_step: bad input sizes.");
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    if (!(rhos[i] > 0.0) || !(lambda_qp1s[i] > 0.0))
      throw std::invalid_argument("armijo_sufficient_step: entries must be positive.");
    m = std::min(m, rhos[i] / lambda_qp1s[i]);
  }
  return m;
}

double convex_phase_bound(double rho_bar, double lambda_n_bar, double L, double eta,
                      double hess_norm, double dist_anchor, double dist_opt) {
  if (!(rho_bar > 0.0)) throw std::invalid_argument("convex_phase_bound: rho_bar must be positive.");
  double c1 = contraction_factor(rho_bar, lambda_n_bar) + (L / rho_bar) * dist_anchor +
              (1.0 - eta) * hess_norm / rho_bar;
  double c2 = eta * L / (2.0 * rho_bar);
  return c1 * dist_opt + c2 * dist_opt * dist_opt;
}

RateReport make_rate_report(const Vector& rho_bars, const Vector& lambda_n_bars,
                            const Vector& global_spectrum, std::size_t T) {
  if (rho_bars.size() != lambda_n_bars.size())
    throw std::invalid_argument("make_rate_report: input length mismatch.");
  RateReport rep;
  double logsum = 0.0;
  bool hit_zero = false;
  for (std::size_t t = 0; t < rho_bars.size(); ++t) {
    double c = contraction_factor(rho_bars[t], lambda_n_bars[t]);
    rep.c_t.push_back(c);
    if (c == 0.0) hit_zero = true;
    if (!hit_zero) logsum += std::log(c);
    rep.a_t.push_back(hit_zero ? 0.0 : std::exp(logsum / static_cast<double>(t + 1)));
    if (std::fabs(rho_bars[t] - lambda_n_bars[t]) <= 1e-12 * lambda_n_bars[t])
      rep.exact_rounds += 1;
  }
  if (T > 0 && rep.c_t.size() >= T) {
    Vector tail(rep.c_t.end() - static_cast<std::ptrdiff_t>(T), rep.c_t.end());
    rep.a_bar_T = lyap_bound_periodic(tail);
  }
  if (!global_spectrum.empty()) {
    for (std::size_t q = 0; q < global_spectrum.size(); ++q)
      rep.r_star_table.push_back(best_rate(global_spectrum, q));
  }
  return rep;
}

}  // namespace fedshed::analysis
