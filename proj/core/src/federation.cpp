#include "fedshed/federation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace fedshed::federation {

namespace {

constexpr std::size_t BACKTRACK_MAX_SHRINKS = 60;

void check_shards(const std::vector<objectives::LocalData>& shards) {
  if (shards.empty()) throw std::invalid_argument("run: no shards");
  std::size_t n = shards.front().x.rows;
  double wsum = 0.0;
  for (const auto& s : shards) {
    if (s.x.rows != n) throw std::invalid_argument("run: shards disagree on dimension");
    if (s.y.empty()) throw std::invalid_argument("run: empty shard");
    wsum += s.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-9) throw std::invalid_argument("run: shard weights must sum to 1");
}

void check_config(const ExperimentConfig& cfg) {
  if (cfg.max_rounds == 0) throw std::invalid_argument("run: max_rounds must be >= 1");
  if (cfg.grad_tol < 0.0) throw std::invalid_argument("run: grad_tol must be >= 0");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 0.5))
    throw std::invalid_argument("run: alpha must lie in (0, 1/2)");
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0))
    throw std::invalid_argument("run: beta must lie in (0, 1)");
}

/* Run fn(i) for i in [0, count) across the configured worker count.
 * Each index writes only its own slot, so the schedule cannot change
 * results; reductions happen later in index order. */
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_lock;
  for (std::size_t w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += threads) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> hold(failure_lock);
        if (!failure) failure = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct CommonState {
  const ExperimentConfig* cfg = nullptr;
  std::vector<objectives::LocalData> shards;
  std::vector<double> weights;
  std::size_t dim = 0;
  std::size_t agents = 0;

  Vector theta;
  std::vector<RoundMetrics> metrics;
  std::size_t comm_cum = 0;
  std::size_t vectors_cum = 0;
  std::size_t hess_cum = 0;

  void init(const ExperimentConfig& c, const std::vector<objectives::LocalData>& sh) {
    check_config(c);
    check_shards(sh);
    cfg = &c;
    shards = sh;
    dim = shards.front().x.rows;
    agents = shards.size();
    weights.resize(agents);
    for (std::size_t i = 0; i < agents; ++i) weights[i] = shards[i].weight;
    theta.assign(dim, 0.0);
  }

  RoundMetrics base_row(std::size_t round, double cost, double grad_norm) const {
    RoundMetrics row;
    row.round = round;
    row.cost = cost;
    row.rel_cost = cost - cfg->cost_star;  // NaN-propagating when unknown
    row.grad_norm = grad_norm;
    row.param_err = std::numeric_limits<double>::quiet_NaN();
    if (cfg->theta_star.size() == dim)
      row.param_err = numkernel::norm2(numkernel::sub(theta, cfg->theta_star));
    row.comm_rounds_cum = comm_cum;
    row.vectors_total_cum = vectors_cum;
    row.hess_computations_cum = hess_cum;
    row.rho_bar = std::numeric_limits<double>::quiet_NaN();
    row.lambda_n_bar = std::numeric_limits<double>::quiet_NaN();
    return row;
  }

  std::vector<std::function<double(const Vector&)>> cost_evaluators() const {
    std::vector<std::function<double(const Vector&)>> fns;
    for (std::size_t i = 0; i < agents; ++i)
      fns.push_back([this, i](const Vector& at) {
        return objectives::cost(cfg->objective, shards[i], at);
      });
    return fns;
  }
};

}  // namespace

std::size_t sample_increment(const ChannelModel& ch, rng::SplitMix64& gen) {
  if (!(ch.base_vectors > 0.0) || !(ch.snr > 0.0) || !(ch.rate > 0.0))
    throw std::invalid_argument("sample_increment: channel parameters must be positive");
  double gamma = gen.exponential(ch.rate);
  double raw = std::floor(ch.base_vectors * std::log2(1.0 + gamma * ch.snr));
  if (raw <= 0.0) return 0;
  auto d = static_cast<std::size_t>(raw);
  return std::min(d, ch.cap);
}

std::size_t sample_increment_at(const ChannelModel& ch, std::uint64_t seed, std::size_t agent,
                                std::size_t round) {
  auto gen = rng::split_stream(seed, agent, round);
  return sample_increment(ch, gen);
}

bool renewal_due(const RenewalSchedule& schedule, std::size_t t, std::size_t dim,
                 const std::vector<double>& grad_history, std::size_t rounds_since_renewal) {
  if (t == 0) throw std::invalid_argument("renewal_due: rounds start at 1");
  if (t == 1) return true;
  switch (schedule.kind) {
    case RenewalKind::Once:
      return false;
    case RenewalKind::Periodic:
      if (schedule.period == 0) throw std::invalid_argument("renewal_due: period must be >= 1");
      return (t - 1) % schedule.period == 0;
    case RenewalKind::Fibonacci: {
      // Renewal rounds are cumulative Fibonacci sums 1, 2, 4, 7, 12, 20, 33,
      // ... switching to stride n-1 once the sums reach it.
      std::size_t stride = dim > 1 ? dim - 1 : 1;
      std::size_t fib_prev = 1, fib = 1;  // F_1, F_2
      std::size_t c = 1;                  // C_1
      while (c < t) {
        if (c >= stride) {
          c += stride;
        } else {
          std::size_t fib_next = fib_prev + fib;
          fib_prev = fib;
          fib = fib_next;
          c += fib_prev;  // C_{j+1} = C_j + F_{j+1}
        }
      }
      return c == t;
    }
    case RenewalKind::GradNorm: {
      if (rounds_since_renewal >= dim) return true;  // convergence guard
      std::size_t k = grad_history.size();
      if (k < 3) return false;
      double oldest = grad_history[k - 3];
      double mid = grad_history[k - 2];
      double newest = grad_history[k - 1];
      return (newest - mid) < schedule.budget * (mid - oldest);
    }
    case RenewalKind::EveryRound:
      return true;
  }
  throw std::invalid_argument("renewal_due: unknown schedule");
}

UpdatePayload agent_round(AgentState& agent, const objectives::ObjectiveSpec& spec,
                          const Vector& theta, bool renew, std::size_t d, RhoPolicy policy,
                          std::size_t round) {
  std::size_t n = agent.data.x.rows;
  if (theta.size() != n) throw std::invalid_argument("agent_round: theta has wrong length");
  if (renew) {
    agent.eig = numkernel::sym_eigendecompose(objectives::hessian(spec, agent.data, theta));
    agent.sent = 0;
    agent.anchor = round;
    agent.hess_count += 1;
  }
  if (agent.eig.values.empty())
    throw std::invalid_argument("agent_round: no spectrum cached; first round must renew");

  UpdatePayload out;
  out.grad = objectives::gradient(spec, agent.data, theta);
  out.cost = objectives::cost(spec, agent.data, theta);
  out.lambda_n = agent.eig.values.back();

  std::size_t take = std::min(d, n - 1 - agent.sent);
  std::size_t next_q = agent.sent + take;
  out.rho = policy == RhoPolicy::Star
                ? hessapprox::rho_star(agent.eig.values[next_q], agent.eig.values.back())
                : hessapprox::rho_convex(agent.eig.values[next_q]);
  std::vector<hessapprox::EigenPair> fresh;
  for (std::size_t j = agent.sent; j < next_q; ++j) {
    hessapprox::EigenPair pair;
    pair.lambda = agent.eig.values[j];
    pair.v.resize(n);
    for (std::size_t r = 0; r < n; ++r) pair.v[r] = agent.eig.vectors(r, j);
    fresh.push_back(std::move(pair));
  }
  out.pairs = hessapprox::encode_payload_pairs(fresh, out.rho);
  out.sent_now = take;
  agent.sent = next_q;
  return out;
}

double federated_backtracking(const Vector& theta, const Vector& p, const Vector& g, double alpha,
                              double beta,
                              const std::vector<std::function<double(const Vector&)>>& agent_costs,
                              const std::vector<double>& weights) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw std::invalid_argument("federated_backtracking: alpha must lie in (0, 1/2)");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("federated_backtracking: beta must lie in (0, 1)");
  if (agent_costs.empty() || agent_costs.size() != weights.size())
    throw std::invalid_argument("federated_backtracking: one cost evaluator per weight");
  double slope = numkernel::dot(p, g);
  if (!(slope > 0.0))
    throw std::invalid_argument("federated_backtracking: p must be a descent direction");

  auto global_cost = [&](const Vector& at) {
    double f = 0.0;
    for (std::size_t i = 0; i < agent_costs.size(); ++i) f += weights[i] * agent_costs[i](at);
    return f;
  };
  double f0 = global_cost(theta);
  double eta = 1.0;
  for (std::size_t k = 0; k <= BACKTRACK_MAX_SHRINKS; ++k) {
    Vector candidate = theta;
    numkernel::axpy(-eta, p, candidate);
    if (global_cost(candidate) <= f0 - alpha * eta * slope) return eta;
    eta *= beta;
  }
  throw std::runtime_error("federated_backtracking: no accepted step within 60 shrinks");
}

RunResult run_shed(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards,
                   RhoPolicy policy) {
  CommonState st;
  st.init(cfg, shards);

  std::vector<AgentState> agents(st.agents);
  std::vector<hessapprox::LocalApproxAssembly> assemblies;
  for (std::size_t i = 0; i < st.agents; ++i) {
    agents[i].id = i;
    agents[i].data = st.shards[i];
    assemblies.emplace_back(static_cast<int>(i), 0, st.dim);
  }
  auto costs = st.cost_evaluators();

  RunResult result;
  std::vector<double> grad_history;
  std::size_t since_renewal = 0;
  std::vector<UpdatePayload> payloads(st.agents);
  std::vector<std::size_t> increments(st.agents);

  for (std::size_t t = 1; t <= cfg.max_rounds; ++t) {
    bool renew = renewal_due(cfg.schedule, t, st.dim, grad_history, since_renewal);
    since_renewal = renew ? 1 : since_renewal + 1;

    for (std::size_t i = 0; i < st.agents; ++i)
      increments[i] = cfg.increment.rayleigh
                          ? sample_increment_at(cfg.increment.channel, cfg.seed, i, t)
                          : cfg.increment.fixed;
    parallel_for(st.agents, cfg.threads, [&](std::size_t i) {
      payloads[i] = agent_round(agents[i], cfg.objective, st.theta, renew, increments[i], policy, t);
    });

    // Master: fold payloads and reduce in agent-id order for determinism.
    Vector grad(st.dim, 0.0);
    Vector lambda_ns(st.agents, 0.0);
    double cost = 0.0;
    std::size_t vectors_round = 0;
    for (std::size_t i = 0; i < st.agents; ++i) {
      if (renew) assemblies[i] = hessapprox::LocalApproxAssembly(static_cast<int>(i),
                                                                 static_cast<int>(t), st.dim);
      assemblies[i] = hessapprox::apply_increment(assemblies[i], payloads[i].pairs,
                                                  payloads[i].rho);
      numkernel::axpy(st.weights[i], payloads[i].grad, grad);
      cost += st.weights[i] * payloads[i].cost;
      lambda_ns[i] = payloads[i].lambda_n;
      vectors_round += payloads[i].sent_now + 1;  // pairs plus the gradient
      if (renew) st.hess_cum += 1;
    }
    auto agg = hessapprox::aggregate(assemblies, st.weights, lambda_ns);
    double gnorm = numkernel::norm2(grad);
    grad_history.push_back(gnorm);
    st.comm_cum += 1;
    st.vectors_cum += vectors_round;

    RoundMetrics row = st.base_row(t, cost, gnorm);
    row.renewal = renew;
    row.rho_bar = agg.rho_bar;
    row.lambda_n_bar = agg.lambda_n_bar;
    row.vectors_per_agent = static_cast<double>(vectors_round) / static_cast<double>(st.agents);
    row.comm_rounds_cum = st.comm_cum;
    row.vectors_total_cum = st.vectors_cum;
    row.hess_computations_cum = st.hess_cum;

    if (gnorm <= cfg.grad_tol) {
      row.eta = 0.0;
      st.metrics.push_back(row);
      result.converged = true;
      break;
    }

    Vector p = numkernel::solve_spd(agg.h, grad);
    double eta = 1.0;
    if (policy == RhoPolicy::Convex) {
      eta = federated_backtracking(st.theta, p, grad, cfg.alpha, cfg.beta, costs, st.weights);
      st.comm_cum += 1;  // the candidate-grid exchange
      row.comm_rounds_cum = st.comm_cum;
    }
    row.eta = eta;
    st.metrics.push_back(row);
    numkernel::axpy(-eta, p, st.theta);
  }

  result.rounds = std::move(st.metrics);
  result.theta = std::move(st.theta);
  return result;
}

RunResult run_montdec(const ExperimentConfig& cfg,
                      const std::vector<objectives::LocalData>& shards) {
  ExperimentConfig every = cfg;
  every.schedule.kind = RenewalKind::EveryRound;
  return run_shed(every, shards, RhoPolicy::Convex);
}

RunResult run_giant(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards) {
  CommonState st;
  st.init(cfg, shards);
  auto costs = st.cost_evaluators();

  struct LocalOut {
    Vector grad;
    double cost = 0.0;
  };
  std::vector<LocalOut> locals(st.agents);
  std::vector<Vector> directions(st.agents);
  RunResult result;

  for (std::size_t t = 1; t <= cfg.max_rounds; ++t) {
    parallel_for(st.agents, cfg.threads, [&](std::size_t i) {
      locals[i].grad = objectives::gradient(cfg.objective, st.shards[i], st.theta);
      locals[i].cost = objectives::cost(cfg.objective, st.shards[i], st.theta);
    });
    Vector grad(st.dim, 0.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < st.agents; ++i) {
      numkernel::axpy(st.weights[i], locals[i].grad, grad);
      cost += st.weights[i] * locals[i].cost;
    }
    double gnorm = numkernel::norm2(grad);
    st.comm_cum += 1;                 // gradient exchange
    st.vectors_cum += st.agents;      // one gradient per agent

    RoundMetrics row = st.base_row(t, cost, gnorm);
    row.renewal = false;
    row.vectors_per_agent = 1.0;
    row.comm_rounds_cum = st.comm_cum;
    row.vectors_total_cum = st.vectors_cum;

    if (gnorm <= cfg.grad_tol) {
      row.eta = 0.0;
      st.metrics.push_back(row);
      result.converged = true;
      break;
    }

    // Harmonic-mean direction from the broadcast global gradient: each
    // agent solves its own Hessian system and uplinks the solution.
    parallel_for(st.agents, cfg.threads, [&](std::size_t i) {
      auto h = objectives::hessian(cfg.objective, st.shards[i], st.theta);
      directions[i] = numkernel::solve_spd(h, grad);
    });
    Vector p(st.dim, 0.0);
    for (std::size_t i = 0; i < st.agents; ++i)
      numkernel::axpy(1.0 / static_cast<double>(st.agents), directions[i], p);
    st.hess_cum += st.agents;
    st.vectors_cum += st.agents;  // one solved direction per agent
    st.comm_cum += 2;             // direction/line-search exchange + update broadcast
    row.renewal = true;           // local Hessians recomputed this iteration
    row.vectors_per_agent = 2.0;
    row.comm_rounds_cum = st.comm_cum;
    row.vectors_total_cum = st.vectors_cum;
    row.hess_computations_cum = st.hess_cum;

    double eta = federated_backtracking(st.theta, p, grad, cfg.alpha, cfg.beta, costs, st.weights);
    row.eta = eta;
    st.metrics.push_back(row);
    numkernel::axpy(-eta, p, st.theta);
  }

  result.rounds = std::move(st.metrics);
  result.theta = std::move(st.theta);
  return result;
}

RunResult run_fednl(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards) {
  CommonState st;
  st.init(cfg, shards);

  std::vector<DenseMatrix> learned(st.agents);
  struct LocalOut {
    Vector grad;
    double cost = 0.0;
    DenseMatrix hess;
  };
  std::vector<LocalOut> locals(st.agents);
  RunResult result;

  for (std::size_t t = 1; t <= cfg.max_rounds; ++t) {
    parallel_for(st.agents, cfg.threads, [&](std::size_t i) {
      locals[i].grad = objectives::gradient(cfg.objective, st.shards[i], st.theta);
      locals[i].cost = objectives::cost(cfg.objective, st.shards[i], st.theta);
      locals[i].hess = objectives::hessian(cfg.objective, st.shards[i], st.theta);
    });

    Vector grad(st.dim, 0.0);
    double cost = 0.0;
    std::size_t vectors_round = 0;
    for (std::size_t i = 0; i < st.agents; ++i) {
      numkernel::axpy(st.weights[i], locals[i].grad, grad);
      cost += st.weights[i] * locals[i].cost;
      st.hess_cum += 1;  // fresh local Hessian every round
      if (t == 1) {
        learned[i] = locals[i].hess;  // full transmission, counted as n vectors
        vectors_round += st.dim;
      } else {
        // Rank-1 correction: top-magnitude eigenpair of the residual.
        DenseMatrix diff = locals[i].hess;
        numkernel::add_scaled(diff, -1.0, learned[i]);
        auto eig = numkernel::sym_eigendecompose(diff);
        std::size_t top = std::abs(eig.values.front()) >= std::abs(eig.values.back())
                              ? 0
                              : eig.values.size() - 1;
        Vector u(st.dim);
        for (std::size_t r = 0; r < st.dim; ++r) u[r] = eig.vectors(r, top);
        numkernel::rank1_update(learned[i], eig.values[top], u);
        vectors_round += 2;  // correction vector plus the gradient
      }
    }
    double gnorm = numkernel::norm2(grad);
    st.comm_cum += 1;
    st.vectors_cum += vectors_round;

    RoundMetrics row = st.base_row(t, cost, gnorm);
    row.renewal = true;
    row.vectors_per_agent = static_cast<double>(vectors_round) / static_cast<double>(st.agents);
    row.comm_rounds_cum = st.comm_cum;
    row.vectors_total_cum = st.vectors_cum;
    row.hess_computations_cum = st.hess_cum;

    if (gnorm <= cfg.grad_tol) {
      row.eta = 0.0;
      st.metrics.push_back(row);
      result.converged = true;
      break;
    }

    DenseMatrix agg(st.dim, st.dim);
    for (std::size_t i = 0; i < st.agents; ++i) numkernel::add_scaled(agg, st.weights[i], learned[i]);
    // Learned aggregates can drift indefinite; floor the spectrum at mu.
    auto eig = numkernel::sym_eigendecompose(agg);
    bool floored = false;
    for (double v : eig.values) floored = floored || v < cfg.objective.mu;
    if (floored) {
      DenseMatrix safe(st.dim, st.dim);
      for (std::size_t j = 0; j < st.dim; ++j) {
        Vector col(st.dim);
        for (std::size_t r = 0; r < st.dim; ++r) col[r] = eig.vectors(r, j);
        numkernel::rank1_update(safe, std::max(eig.values[j], cfg.objective.mu), col);
      }
      agg = std::move(safe);
    }

    // Full step on the learned curvature; the scheme carries no line search.
    Vector p = numkernel::solve_spd(agg, grad);
    row.eta = 1.0;
    st.metrics.push_back(row);
    numkernel::axpy(-1.0, p, st.theta);
  }

  result.rounds = std::move(st.metrics);
  result.theta = std::move(st.theta);
  return result;
}

RunResult run_agd(const ExperimentConfig& cfg, const std::vector<objectives::LocalData>& shards) {
  CommonState st;
  st.init(cfg, shards);
  if (!(cfg.objective.mu > 0.0))
    throw std::invalid_argument("run_agd: needs mu > 0 for the strongly-convex schedule");

  // Curvature constants from the pooled initial Hessian.
  DenseMatrix pooled_h(st.dim, st.dim);
  for (std::size_t i = 0; i < st.agents; ++i) {
    auto h = objectives::hessian(cfg.objective, st.shards[i], st.theta);
    numkernel::add_scaled(pooled_h, st.weights[i], h);
    st.hess_cum += 1;
  }
  double big_k = numkernel::spectral_norm(pooled_h);
  double kappa = cfg.objective.mu;
  double step = 1.0 / big_k;
  double momentum = (std::sqrt(big_k) - std::sqrt(kappa)) / (std::sqrt(big_k) + std::sqrt(kappa));

  struct LocalOut {
    Vector grad;
    double cost = 0.0;
  };
  std::vector<LocalOut> locals(st.agents);
  Vector y = st.theta;
  RunResult result;

  for (std::size_t t = 1; t <= cfg.max_rounds; ++t) {
    parallel_for(st.agents, cfg.threads, [&](std::size_t i) {
      locals[i].grad = objectives::gradient(cfg.objective, st.shards[i], y);
      locals[i].cost = objectives::cost(cfg.objective, st.shards[i], st.theta);
    });
    Vector grad(st.dim, 0.0);
    double cost = 0.0;
    for (std::size_t i = 0; i < st.agents; ++i) {
      numkernel::axpy(st.weights[i], locals[i].grad, grad);
      cost += st.weights[i] * locals[i].cost;
    }
    double gnorm = numkernel::norm2(grad);
    st.comm_cum += 1;
    st.vectors_cum += st.agents;

    RoundMetrics row = st.base_row(t, cost, gnorm);
    row.renewal = (t == 1);
    row.vectors_per_agent = 1.0;
    row.comm_rounds_cum = st.comm_cum;
    row.vectors_total_cum = st.vectors_cum;
    row.hess_computations_cum = st.hess_cum;

    if (gnorm <= cfg.grad_tol) {
      row.eta = 0.0;
      st.metrics.push_back(row);
      result.converged = true;
      break;
    }

    Vector theta_next = y;
    numkernel::axpy(-step, grad, theta_next);
    Vector y_next = theta_next;
    Vector momentum_dir = numkernel::sub(theta_next, st.theta);
    numkernel::axpy(momentum, momentum_dir, y_next);
    st.theta = std::move(theta_next);
    y = std::move(y_next);

    row.eta = step;
    st.metrics.push_back(row);
  }

  result.rounds = std::move(st.metrics);
  result.theta = std::move(st.theta);
  return result;
}

}  // namespace fedshed::federation
