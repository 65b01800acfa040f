#include "fedshed/cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace fedshed::cli {

namespace {

using federation::RenewalKind;

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split_on(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == delim) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw std::invalid_argument(key + ": " + why);
}

double parse_double(const std::string& key, const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end != begin + s.size() || s.empty() || !std::isfinite(v))
    fail(key, "expected a finite number, got \"" + s + "\"");
  return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& s) {
  if (s.empty() || s[0] == '-') fail(key, "expected a nonnegative integer, got \"" + s + "\"");
  const char* begin = s.c_str();
  char* end = nullptr;
  unsigned long long v = std::strtoull(begin, &end, 10);
  if (end != begin + s.size()) fail(key, "expected an integer, got \"" + s + "\"");
  return static_cast<std::uint64_t>(v);
}

// Format a double so that parsing it back recovers the same bits.
std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_algorithm(const std::string& v) {
  if (v == "shed-ls" || v == "shed" || v == "mont-dec" || v == "giant" || v == "fednl" ||
      v == "agd")
    return;
  if (v.rfind("shed-periodic:", 0) == 0) {
    auto t = parse_uint("algorithm", v.substr(14));
    if (t < 1) fail("algorithm", "period must be >= 1");
    return;
  }
  fail("algorithm", "unknown algorithm \"" + v +
                        "\" (expected shed-ls, shed, shed-periodic:T, mont-dec, giant, fednl, "
                        "or agd)");
}

void check_partition(const std::string& v) {
  if (v == "iid" || v == "label-skew") return;
  if (v.rfind("iid:", 0) == 0) {
    parse_double("partition", v.substr(4));
    return;
  }
  if (v.rfind("two-class:", 0) == 0) {
    parse_double("partition", v.substr(10));
    return;
  }
  fail("partition",
       "unknown scheme \"" + v + "\" (expected iid, iid:TARGET, label-skew, or two-class:TARGET)");
}

void check_renewal(const std::string& v) {
  if (v.empty() || v == "once" || v == "fib" || v == "every") return;
  if (v.rfind("periodic:", 0) == 0) {
    if (parse_uint("renewal", v.substr(9)) < 1) fail("renewal", "period must be >= 1");
    return;
  }
  if (v.rfind("gn:", 0) == 0) {
    double b = parse_double("renewal", v.substr(3));
    if (!(b > 0.0)) fail("renewal", "trigger factor must be positive");
    return;
  }
  fail("renewal",
       "unknown schedule \"" + v + "\" (expected once, periodic:T, fib, gn:B, or every)");
}

void check_increment(const std::string& v) {
  if (v.rfind("fixed:", 0) == 0) {
    parse_uint("increment", v.substr(6));
    return;
  }
  if (v.rfind("rayleigh:", 0) == 0) {
    auto parts = split_on(v.substr(9), ',');
    if (parts.size() != 4) fail("increment", "rayleigh takes D0,GAMMA,NU,CAP");
    if (!(parse_double("increment", parts[0]) > 0.0)) fail("increment", "D0 must be positive");
    if (!(parse_double("increment", parts[1]) > 0.0)) fail("increment", "GAMMA must be positive");
    if (!(parse_double("increment", parts[2]) > 0.0)) fail("increment", "NU must be positive");
    parse_uint("increment", parts[3]);
    return;
  }
  fail("increment", "expected fixed:K or rayleigh:D0,GAMMA,NU,CAP, got \"" + v + "\"");
}

void check_dataset(const std::string& v) {
  if (v.rfind("synth:", 0) == 0) {
    auto parts = split_on(v.substr(6), ',');
    if (parts.size() != 5) fail("dataset", "synth takes KIND,N,D,COND,NOISE");
    if (parts[0] != "ls" && parts[0] != "logistic" && parts[0] != "clusters")
      fail("dataset", "unknown synthetic kind \"" + parts[0] + "\"");
    if (parse_uint("dataset", parts[1]) < 1) fail("dataset", "N must be >= 1");
    if (parse_uint("dataset", parts[2]) < 1) fail("dataset", "D must be >= 1");
    if (!(parse_double("dataset", parts[3]) >= 1.0)) fail("dataset", "COND must be >= 1");
    if (!(parse_double("dataset", parts[4]) >= 0.0)) fail("dataset", "NOISE must be >= 0");
    return;
  }
  if (v.rfind("csv:", 0) == 0) {
    auto pos = v.rfind(':');
    if (pos == 3) fail("dataset", "csv takes PATH:LABELCOL");
    parse_uint("dataset", v.substr(pos + 1));
    return;
  }
  if (v.rfind("libsvm:", 0) == 0) {
    auto pos = v.rfind(':');
    if (pos == 6) fail("dataset", "libsvm takes PATH:N");
    if (parse_uint("dataset", v.substr(pos + 1)) < 1) fail("dataset", "N must be >= 1");
    return;
  }
  fail("dataset",
       "expected csv:PATH:LABELCOL, libsvm:PATH:N, or synth:KIND,N,D,COND,NOISE, got \"" + v +
           "\"");
}

void set_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "algorithm") {
    check_algorithm(value);
    cfg.algorithm = value;
  } else if (key == "mu") {
    double v = parse_double(key, value);
    if (v < 0.0) fail(key, "must be >= 0");
    cfg.mu = v;
  } else if (key == "agents") {
    auto v = parse_uint(key, value);
    if (v < 1) fail(key, "must be >= 1");
    cfg.agents = v;
  } else if (key == "partition") {
    check_partition(value);
    cfg.partition = value;
  } else if (key == "renewal") {
    check_renewal(value);
    cfg.renewal = value;
  } else if (key == "increment") {
    check_increment(value);
    cfg.increment = value;
  } else if (key == "alpha") {
    double v = parse_double(key, value);
    if (!(v > 0.0 && v < 0.5)) fail(key, "must lie in (0, 0.5)");
    cfg.alpha = v;
  } else if (key == "beta") {
    double v = parse_double(key, value);
    if (!(v > 0.0 && v < 1.0)) fail(key, "must lie in (0, 1)");
    cfg.beta = v;
  } else if (key == "rounds") {
    auto v = parse_uint(key, value);
    if (v < 1) fail(key, "must be >= 1");
    cfg.rounds = v;
  } else if (key == "tol") {
    double v = parse_double(key, value);
    if (v < 0.0) fail(key, "must be >= 0");
    cfg.tol = v;
  } else if (key == "seed") {
    cfg.seed = parse_uint(key, value);
  } else if (key == "threads") {
    auto v = parse_uint(key, value);
    if (v < 1) fail(key, "must be >= 1");
    cfg.threads = v;
  } else if (key == "dataset") {
    check_dataset(value);
    cfg.dataset = value;
  } else if (key == "out") {
    if (value.empty()) fail(key, "must not be empty");
    cfg.out = value;
  } else {
    fail(key, "unknown key");
  }
}

data::Dataset load_dataset(const RunConfig& cfg) {
  const std::string& v = cfg.dataset;
  if (v.rfind("synth:", 0) == 0) {
    auto parts = split_on(v.substr(6), ',');
    return data::gen_synthetic(parts[0], parse_uint("dataset", parts[1]),
                               parse_uint("dataset", parts[2]),
                               parse_double("dataset", parts[3]),
                               parse_double("dataset", parts[4]), cfg.seed);
  }
  if (v.rfind("csv:", 0) == 0) {
    auto pos = v.rfind(':');
    return data::load_csv(v.substr(4, pos - 4), parse_uint("dataset", v.substr(pos + 1)));
  }
  auto pos = v.rfind(':');
  return data::load_libsvm(v.substr(7, pos - 7), parse_uint("dataset", v.substr(pos + 1)));
}

data::PartitionSpec make_partition(const RunConfig& cfg) {
  data::PartitionSpec part;
  part.agents = cfg.agents;
  part.seed = cfg.seed;
  const std::string& v = cfg.partition;
  if (v == "iid") {
    part.scheme = data::PartitionScheme::Iid;
  } else if (v.rfind("iid:", 0) == 0) {
    part.scheme = data::PartitionScheme::Iid;
    part.target = parse_double("partition", v.substr(4));
  } else if (v == "label-skew") {
    part.scheme = data::PartitionScheme::LabelSkew;
  } else {
    part.scheme = data::PartitionScheme::TwoClass;
    part.target = parse_double("partition", v.substr(10));
  }
  return part;
}

federation::RenewalSchedule make_schedule(const RunConfig& cfg, RenewalKind fallback,
                                          std::size_t fallback_period) {
  federation::RenewalSchedule sched;
  sched.kind = fallback;
  sched.period = fallback_period;
  const std::string& v = cfg.renewal;
  if (v.empty()) return sched;
  if (v == "once") {
    sched.kind = RenewalKind::Once;
  } else if (v == "fib") {
    sched.kind = RenewalKind::Fibonacci;
  } else if (v == "every") {
    sched.kind = RenewalKind::EveryRound;
  } else if (v.rfind("periodic:", 0) == 0) {
    sched.kind = RenewalKind::Periodic;
    sched.period = parse_uint("renewal", v.substr(9));
  } else {
    sched.kind = RenewalKind::GradNorm;
    sched.budget = parse_double("renewal", v.substr(3));
  }
  return sched;
}

federation::IncrementSpec make_increment(const RunConfig& cfg) {
  federation::IncrementSpec inc;
  const std::string& v = cfg.increment;
  if (v.rfind("fixed:", 0) == 0) {
    inc.rayleigh = false;
    inc.fixed = parse_uint("increment", v.substr(6));
  } else {
    auto parts = split_on(v.substr(9), ',');
    inc.rayleigh = true;
    inc.channel.base_vectors = parse_double("increment", parts[0]);
    inc.channel.snr = parse_double("increment", parts[1]);
    inc.channel.rate = parse_double("increment", parts[2]);
    inc.channel.cap = parse_uint("increment", parts[3]);
  }
  return inc;
}

std::string csv_field(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trimmed(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value, got \"" + line + "\"");
    std::string key = trimmed(line.substr(0, eq));
    std::string value = trimmed(line.substr(eq + 1));
    if (key.empty())
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    set_key(cfg, key, value);
  }
  return cfg;
}

RunConfig apply_overrides(RunConfig base, const std::map<std::string, std::string>& flags) {
  for (const auto& [key, value] : flags) set_key(base, key, value);
  return base;
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "algorithm = " << cfg.algorithm << "\n";
  out << "mu = " << fmt(cfg.mu) << "\n";
  out << "agents = " << cfg.agents << "\n";
  out << "partition = " << cfg.partition << "\n";
  if (!cfg.renewal.empty()) out << "renewal = " << cfg.renewal << "\n";
  out << "increment = " << cfg.increment << "\n";
  out << "alpha = " << fmt(cfg.alpha) << "\n";
  out << "beta = " << fmt(cfg.beta) << "\n";
  out << "rounds = " << cfg.rounds << "\n";
  out << "tol = " << fmt(cfg.tol) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "threads = " << cfg.threads << "\n";
  out << "dataset = " << cfg.dataset << "\n";
  out << "out = " << cfg.out << "\n";
  return out.str();
}

Experiment build_experiment(const RunConfig& cfg) {
  check_algorithm(cfg.algorithm);
  auto ds = load_dataset(cfg);
  auto part = make_partition(cfg);

  Experiment exp;
  exp.shards = data::partition(ds, part);

  bool binary_after = ds.kind == data::DatasetKind::Binary || part.target.has_value();
  objectives::Kind kind;
  if (ds.kind == data::DatasetKind::Regression) {
    kind = objectives::Kind::LeastSquares;
  } else if (binary_after) {
    kind = objectives::Kind::Logistic;
  } else {
    fail("partition", "dataset has more than two classes; choose two-class:TARGET or iid:TARGET");
  }
  exp.fed.objective = {kind, cfg.mu};

  if (cfg.algorithm == "shed-ls") {
    exp.driver = "shed";
    exp.policy = federation::RhoPolicy::Star;
    exp.fed.schedule = make_schedule(cfg, RenewalKind::Once, 10);
  } else if (cfg.algorithm == "shed") {
    exp.driver = "shed";
    exp.policy = federation::RhoPolicy::Convex;
    exp.fed.schedule = make_schedule(cfg, RenewalKind::Fibonacci, 10);
  } else if (cfg.algorithm.rfind("shed-periodic:", 0) == 0) {
    exp.driver = "shed";
    exp.policy = federation::RhoPolicy::Convex;
    exp.fed.schedule =
        make_schedule(cfg, RenewalKind::Periodic, parse_uint("algorithm", cfg.algorithm.substr(14)));
  } else if (cfg.algorithm == "mont-dec") {
    exp.driver = "shed";
    exp.policy = federation::RhoPolicy::Convex;
    if (!cfg.renewal.empty() && cfg.renewal != "every")
      fail("renewal", "mont-dec renews every round; drop the renewal key");
    exp.fed.schedule.kind = RenewalKind::EveryRound;
  } else {
    exp.driver = cfg.algorithm;
    if (!cfg.renewal.empty())
      fail("renewal", "only the incremental-sharing algorithms take a renewal schedule");
  }

  exp.fed.increment = make_increment(cfg);
  exp.fed.alpha = cfg.alpha;
  exp.fed.beta = cfg.beta;
  exp.fed.max_rounds = cfg.rounds;
  exp.fed.grad_tol = cfg.tol;
  exp.fed.seed = cfg.seed;
  exp.fed.threads = cfg.threads;

  // Resolve the optimum for the error columns when a cheap oracle exists.
  auto pool = objectives::pooled(exp.shards);
  try {
    if (kind == objectives::Kind::LeastSquares) {
      exp.fed.theta_star = objectives::ls_optimum(exp.fed.objective, pool);
    } else {
      exp.fed.theta_star = objectives::newton_optimum(exp.fed.objective, pool, 1e-12, 400);
    }
    exp.fed.cost_star = objectives::cost(exp.fed.objective, pool, exp.fed.theta_star);
  } catch (const std::exception&) {
    exp.fed.theta_star.clear();
    exp.fed.cost_star = std::numeric_limits<double>::quiet_NaN();
  }
  return exp;
}

RunOutcome execute_config(const RunConfig& cfg) {
  auto exp = build_experiment(cfg);
  RunOutcome out;
  if (exp.driver == "shed") {
    out.result = federation::run_shed(exp.fed, exp.shards, exp.policy);
  } else if (exp.driver == "giant") {
    out.result = federation::run_giant(exp.fed, exp.shards);
  } else if (exp.driver == "fednl") {
    out.result = federation::run_fednl(exp.fed, exp.shards);
  } else {
    out.result = federation::run_agd(exp.fed, exp.shards);
  }
  const auto& rows = out.result.rounds;
  if (!rows.empty()) {
    out.comm_rounds_total = rows.back().comm_rounds_cum;
    out.vectors_total = rows.back().vectors_total_cum;
    out.hess_computations_total = rows.back().hess_computations_cum;
    if (out.result.converged) out.rounds_to_tolerance = rows.back().round;
  }
  return out;
}

std::string metrics_csv(const std::vector<federation::RoundMetrics>& rounds) {
  std::ostringstream out;
  out << "round,cost,rel_cost,grad_norm,param_err,eta,comm_rounds_cum,vectors_per_agent,"
         "vectors_total_cum,hess_computations_cum,renewal,rho_bar,lambda_n_bar\n";
  for (const auto& r : rounds) {
    out << r.round << ',' << fmt(r.cost) << ',' << fmt(r.rel_cost) << ',' << fmt(r.grad_norm)
        << ',' << fmt(r.param_err) << ',' << fmt(r.eta) << ',' << r.comm_rounds_cum << ','
        << fmt(r.vectors_per_agent) << ',' << r.vectors_total_cum << ','
        << r.hess_computations_cum << ',' << (r.renewal ? 1 : 0) << ',' << fmt(r.rho_bar) << ','
        << fmt(r.lambda_n_bar) << '\n';
  }
  return out.str();
}

std::string summary_json(const RunConfig& cfg, const RunOutcome& outcome) {
  nlohmann::ordered_json j;
  j["algorithm"] = cfg.algorithm;
  j["dataset"] = cfg.dataset;
  j["partition"] = cfg.partition;
  j["agents"] = cfg.agents;
  j["mu"] = cfg.mu;
  j["seed"] = cfg.seed;
  j["tol"] = cfg.tol;
  j["round_cap"] = cfg.rounds;
  j["converged"] = outcome.result.converged;
  j["rounds"] = outcome.result.rounds.size();
  j["rounds_to_tolerance"] = outcome.rounds_to_tolerance;
  const auto& rows = outcome.result.rounds;
  j["final_cost"] = rows.empty() ? nullptr : nlohmann::ordered_json(rows.back().cost);
  j["final_rel_cost"] = rows.empty() ? nullptr : nlohmann::ordered_json(rows.back().rel_cost);
  j["final_grad_norm"] = rows.empty() ? nullptr : nlohmann::ordered_json(rows.back().grad_norm);
  j["comm_rounds_total"] = outcome.comm_rounds_total;
  j["vectors_total"] = outcome.vectors_total;
  j["hess_computations_total"] = outcome.hess_computations_total;
  return j.dump(2) + "\n";
}

std::string compare_csv(const std::vector<RunConfig>& configs,
                        const std::vector<RunOutcome>& outcomes) {
  if (configs.size() != outcomes.size())
    throw std::invalid_argument("compare_csv: configs and outcomes differ in length");
  std::ostringstream out;
  out << "algorithm,dataset,partition,agents,mu,seed,converged,rounds,rounds_to_tolerance,"
         "comm_rounds_total,vectors_total,hess_computations_total,final_grad_norm,"
         "final_rel_cost\n";
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& cfg = configs[i];
    const auto& oc = outcomes[i];
    const auto& rows = oc.result.rounds;
    double gn = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().grad_norm;
    double rc = rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().rel_cost;
    out << csv_field(cfg.algorithm) << ',' << csv_field(cfg.dataset) << ','
        << csv_field(cfg.partition) << ',' << cfg.agents << ',' << fmt(cfg.mu) << ',' << cfg.seed
        << ',' << (oc.result.converged ? 1 : 0) << ',' << rows.size() << ','
        << oc.rounds_to_tolerance << ',' << oc.comm_rounds_total << ',' << oc.vectors_total << ','
        << oc.hess_computations_total << ',' << fmt(gn) << ',' << fmt(rc) << '\n';
  }
  return out.str();
}

RunOutcome run_experiment(const RunConfig& cfg) {
  auto outcome = execute_config(cfg);
  std::ofstream csv(cfg.out, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open output file " + cfg.out);
  csv << metrics_csv(outcome.result.rounds);
  if (!csv.flush()) throw std::runtime_error("failed writing " + cfg.out);
  std::string jpath = cfg.out + ".json";
  std::ofstream js(jpath, std::ios::binary);
  if (!js) throw std::runtime_error("cannot open output file " + jpath);
  js << summary_json(cfg, outcome);
  if (!js.flush()) throw std::runtime_error("failed writing " + jpath);
  return outcome;
}

}  // namespace fedshed::cli
