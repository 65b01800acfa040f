#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "fedshed/hessapprox.hpp"
#include "fedshed/numkernel.hpp"
#include "fedshed/objectives.hpp"
#include "fedshed/rng.hpp"

namespace fedshed::federation {

using numkernel::DenseMatrix;
using numkernel::Vector;

/*
 * When agents renew: recompute the local Hessian at the current iterate,
 * restart incremental eigenpair sharing from the top of the fresh spectrum.
 */
enum class RenewalKind { Once, Periodic, Fibonacci, GradNorm, EveryRound };

struct RenewalSchedule {
  RenewalKind kind = RenewalKind::Once;
  std::size_t period = 10;  // Periodic: renew when (round - 1) % period == 0
  double budget = 0.9;      // GradNorm trigger factor
};

/* Fading uplink: an agent can push d = min(cap, floor(base * log2(1 + g * snr)))
 * eigenpairs in one round, g ~ Exp(rate) drawn per (agent, round). */
struct ChannelModel {
  double base_vectors = 2.0;
  double snr = 5.0;
  double rate = 1.0;
  std::size_t cap = 10;
};

struct IncrementSpec {
  bool rayleigh = false;  // false: every agent sends `fixed` pairs per round
  std::size_t fixed = 1;
  ChannelModel channel;
};

/* Residual-spectrum pricing.  Star: rho = (lambda_{q+1} + lambda_n)/2,
 * optimal for quadratics with unit step.  Convex: rho = lambda_{q+1},
 * which keeps the approximation an upper bound on the local Hessian. */
enum class RhoPolicy { Star, Convex };

struct ExperimentConfig {
  objectives::ObjectiveSpec objective;
  RenewalSchedule schedule;
  IncrementSpec increment;
  double alpha = 0.1;  // Armijo slope fraction
  double beta = 0.5;   // backtracking shrink factor
  std::size_t max_rounds = 100;
  double grad_tol = 1e-8;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  // Reference optimum, when known, for the error columns (else NaN there).
  Vector theta_star;
  double cost_star = std::numeric_limits<double>::quiet_NaN();
};

/* One emitted row per round, measured at the pre-step iterate.  Counters
 * are cumulative; vectors_per_agent is this round's per-agent mean uplink
 * (eigenpairs plus the gradient).  The terminal row records eta = 0. */
struct RoundMetrics {
  std::size_t round = 0;
  double cost = 0.0;
  double rel_cost = 0.0;
  double grad_norm = 0.0;
  double param_err = 0.0;
  double eta = 0.0;
  std::size_t comm_rounds_cum = 0;
  double vectors_per_agent = 0.0;
  std::size_t vectors_total_cum = 0;
  std::size_t hess_computations_cum = 0;
  bool renewal = false;
  double rho_bar = 0.0;
  double lambda_n_bar = 0.0;
};

struct RunResult {
  std::vector<RoundMetrics> rounds;
  Vector theta;
  bool converged = false;
};

// Agent-local protocol state between rounds.
struct AgentState {
  std::size_t id = 0;
  objectives::LocalData data;
  numkernel::SymEigen eig;  // spectrum of the local Hessian at the anchor
  std::size_t sent = 0;     // eigenpairs streamed since the anchor
  std::size_t anchor = 0;
  std::size_t hess_count = 0;
};

// Everything one agent uplinks in a round.
struct UpdatePayload {
  std::vector<hessapprox::ScaledPair> pairs;
  Vector grad;
  double cost = 0.0;
  double rho = 0.0;
  double lambda_n = 0.0;  // diagnostic: smallest local eigenvalue at anchor
  std::size_t sent_now = 0;
};

// Pairs the channel admits this round; zero means a gradient-only round.
std::size_t sample_increment(const ChannelModel& ch, rng::SplitMix64& gen);

// Deterministic per-(agent, round) draw from the experiment seed.
std::size_t sample_increment_at(const ChannelModel& ch, std::uint64_t seed, std::size_t agent,
                                std::size_t round);

/*
 * Whether round `t` starts a renewal.  grad_history holds the master's
 * observed gradient norms for rounds 1..t-1 (GradNorm looks at the last
 * three and also forces a renewal after `dim` rounds without one).
 * Every schedule renews at t = 1.
 */
bool renewal_due(const RenewalSchedule& schedule, std::size_t t, std::size_t dim,
                 const std::vector<double>& grad_history, std::size_t rounds_since_renewal);

/*
 To run one agent's side of a round: on renew, recompute the local Hessian
 at theta, eigendecompose it, and restart the pair stream; always evaluate
 the local gradient and cost, advance the stream by min(d, n-1-sent) pairs,
 and price them at the policy's rho for the new stream position.
*/
UpdatePayload agent_round(AgentState& agent, const objectives::ObjectiveSpec& spec,
                          const Vector& theta, bool renew, std::size_t d, RhoPolicy policy,
                          std::size_t round);

/*
 * Armijo line search over the shared candidate grid {1, beta, beta^2, ...}:
 * returns the largest candidate with f(theta - eta p) <= f(theta) - alpha
 * eta p^T g, where f is the weight-averaged sum of agent-reported costs.
 * The whole grid is exchanged in one extra communication round.  Throws
 * after 60 shrinks without acceptance, and requires p^T g > 0,
 * alpha in (0, 1/2), beta in (0, 1).
 */
double federated_backtracking(const Vector& theta, const Vector& p, const Vector& g, double alpha,
                              double beta,
                              const std::vector<std::function<double(const Vector&)>>& agent_costs,
                              const std::vector<double>& weights);

/*
 * Drivers.  Each consumes disjoint shards (weights summing to 1) and a
 * config, runs from theta = 0 until the gradient tolerance or the round
 * cap, and emits one metrics row per round.  Identical config and seed
 * give bit-identical results for any thread count.
 */

// Incremental eigenpair sharing with renewals.  Star pricing steps with
// eta = 1; Convex pricing line-searches every step.
RunResult run_shed(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards,
                   RhoPolicy policy);

// Convex pricing with a renewal every round (no pair accumulates past the
// round it was sent in).
RunResult run_montdec(const ExperimentConfig& cfg,
                      const std::vector<objectives::LocalData>& shards);

// Harmonic-mean Newton-type baseline: p = (1/M) sum_i H_i^{-1} g with the
// global gradient, line-searched; three communication rounds per iteration.
RunResult run_giant(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards);

// Rank-1 Hessian-learning baseline: full local Hessians in round one, then
// one compressed correction pair per round; solves on the learned aggregate
// with an eigenvalue floor at mu.
RunResult run_fednl(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards);

// Accelerated gradient baseline with the strongly-convex schedule: step
// 1/K and momentum (sqrt(K)-sqrt(k))/(sqrt(K)+sqrt(k)), K the spectral norm
// of the pooled initial Hessian, k = mu.
RunResult run_agd(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards);

}  // namespace fedshed::federation
