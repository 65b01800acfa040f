#include "fedshed/hessapprox.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace fedshed::hessapprox {

namespace {
const double ORTHO_TOL = 1e-8;
const double LAMBDA_RHO_SLACK = 1e-12;
const double ORDER_SLACK = 1e-12;

void check_orthonormal(const std::vector<EigenPair>& pairs, const char* who) {
  for (std::size_t a = 0; a < pairs.size(); ++a) {
    for (std::size_t b = a; b < pairs.size(); ++b) {
      double d = numkernel::dot(pairs[a].v, pairs[b].v);
      double want = a == b ? 1.0 : 0.0;
      if (std::fabs(d - want) > ORTHO_TOL)
        throw std::invalid_argument(std::string(who) + ": pairs " + std::to_string(a) + "," +
                                    std::to_string(b) + " are not orthonormal.");
    }
  }
}
}  // namespace

LocalApproxAssembly::LocalApproxAssembly(int agent, int anchor_round, std::size_t n)
    : agent_id(agent),
      anchor(anchor_round),
      rho(0.0),
      q(0),
      s(n, n),
      p(n, n),
      last_lambda(std::numeric_limits<double>::infinity()) {}

DenseMatrix approx_from_pairs(const std::vector<EigenPair>& pairs, double rho, std::size_t n) {
  if (rho <= 0.0) throw std::invalid_argument("approx_from_pairs: rho must be positive.");
  for (const auto& pr : pairs)
    if (pr.v.size() != n) throw std::invalid_argument("approx_from_pairs: vector size mismatch.");
  for (std::size_t k = 0; k + 1 < pairs.size(); ++k)
    if (pairs[k].lambda < pairs[k + 1].lambda - ORDER_SLACK)
      throw std::invalid_argument("approx_from_pairs: eigenvalues are not non-increasing.");
  check_orthonormal(pairs, "approx_from_pairs");

  DenseMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i) h(i, i) = rho;
  for (const auto& pr : pairs) numkernel::rank1_update(h, pr.lambda - rho, pr.v);
  return h;
}

double rho_star(double lambda_qp1, double lambda_n) {
  if (lambda_n <= 0.0)
    throw std::invalid_argument("rho_star: lambda_n must be positive, got " +
                                std::to_string(lambda_n) + ".");
  if (lambda_qp1 < lambda_n)
    throw std::invalid_argument("rho_star: ordering violated (lambda_{q+1} < lambda_n).");
  return 0.5 * (lambda_qp1 + lambda_n);
}

double rho_convex(double lambda_qp1) {
  if (lambda_qp1 <= 0.0)
    throw std::invalid_argument("rho_convex: lambda_{q+1} must be positive, got " +
                                std::to_string(lambda_qp1) + ".");
  return lambda_qp1;
}

std::vector<ScaledPair> encode_payload_pairs(const std::vector<EigenPair>& pairs, double rho) {
  std::vector<ScaledPair> out;
  out.reserve(pairs.size());
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    double gap = pairs[k].lambda - rho;
    if (gap < -LAMBDA_RHO_SLACK)
      throw std::invalid_argument("encode_payload_pairs: pair " + std::to_string(k) +
                                  " has lambda below rho.");
    double scale = gap > 0.0 ? std::sqrt(gap) : 0.0;  // clamp roundoff to an exact zero vector
    out.push_back(ScaledPair{pairs[k].lambda, numkernel::scaled(pairs[k].v, scale)});
  }
  return out;
}

LocalApproxAssembly apply_increment(LocalApproxAssembly assembly,
                                    const std::vector<ScaledPair>& new_pairs, double new_rho) {
  if (new_rho <= 0.0) throw std::invalid_argument("apply_increment: rho must be positive.");
  std::size_t n = assembly.s.rows;
  for (const auto& pr : new_pairs) {
    if (pr.tilde_v.size() != n)
      throw std::invalid_argument("apply_increment: vector size mismatch.");
    if (pr.lambda > assembly.last_lambda +
                        ORDER_SLACK * std::max(1.0, std::fabs(assembly.last_lambda)))
      throw std::invalid_argument(
          "apply_increment: out-of-order pair insertion (lambda " + std::to_string(pr.lambda) +
          " after " + std::to_string(assembly.last_lambda) + ").");

    double nsq = numkernel::dot(pr.tilde_v, pr.tilde_v);  // = lambda - rho_at_emission
    if (nsq > 0.0) {
      Vector v = numkernel::scaled(pr.tilde_v, 1.0 / std::sqrt(nsq));
      numkernel::rank1_update(assembly.s, pr.lambda, v);
      numkernel::rank1_update(assembly.p, 1.0, v);
    }
    // A zero vector (lambda equal to the emission rho) carries no recoverable
    // direction; its contribution coincides with the rho I term.
    assembly.last_lambda = pr.lambda;
    assembly.q += 1;
  }
  assembly.rho = new_rho;
  return assembly;
}

DenseMatrix assembled(const LocalApproxAssembly& assembly) {
  DenseMatrix h = assembly.s;
  numkernel::add_scaled(h, -assembly.rho, assembly.p);
  for (std::size_t i = 0; i < h.rows; ++i) h(i, i) += assembly.rho;
  return h;
}

AggregateResult aggregate(const std::vector<LocalApproxAssembly>& assemblies,
                          const Vector& weights, const Vector& lambda_ns) {
  if (assemblies.empty()) throw std::invalid_argument("aggregate: no assemblies.");
  if (weights.size() != assemblies.size() || lambda_ns.size() != assemblies.size())
    throw std::invalid_argument("aggregate: weights/lambda_n size mismatch.");
  double wsum = 0.0;
  for (double w : weights) wsum += w;
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("aggregate: weights must sum to 1.");

  std::size_t n = assemblies.front().s.rows;
  AggregateResult out;
  out.h = DenseMatrix(n, n);
  for (std::size_t i = 0; i < assemblies.size(); ++i) {
    if (assemblies[i].s.rows != n) throw std::invalid_argument("aggregate: dimension mismatch.");
    numkernel::add_scaled(out.h, weights[i], assembled(assemblies[i]));
    out.rho_bar += weights[i] * assemblies[i].rho;
    out.lambda_n_bar += weights[i] * lambda_ns[i];
  }
  return out;
}

}  // namespace fedshed::hessapprox
