#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "fedshed/objectives.hpp"
#include "fedshed/rng.hpp"

using namespace fedshed;
using numkernel::DenseMatrix;
using numkernel::Vector;
using objectives::Kind;
using objectives::LocalData;
using objectives::ObjectiveSpec;

namespace {

LocalData random_shard(std::uint64_t seed, std::size_t n, std::size_t ni, bool binary) {
  rng::SplitMix64 g(seed);
  LocalData d;
  d.x = DenseMatrix(n, ni);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < ni; ++j) d.x(i, j) = g.gaussian();
  d.y.resize(ni);
  for (std::size_t j = 0; j < ni; ++j)
    d.y[j] = binary ? (g.uniform() < 0.5 ? 1.0 : -1.0) : g.gaussian();
  return d;
}

Vector fd_gradient(const ObjectiveSpec& spec, const LocalData& d, const Vector& theta) {
  Vector g(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    double h = 1e-6 * (1.0 + std::fabs(theta[k]));
    Vector tp = theta, tm = theta;
    tp[k] += h;
    tm[k] -= h;
    g[k] = (objectives::cost(spec, d, tp) - objectives::cost(spec, d, tm)) / (2.0 * h);
  }
  return g;
}

DenseMatrix fd_hessian(const ObjectiveSpec& spec, const LocalData& d, const Vector& theta) {
  std::size_t n = theta.size();
  DenseMatrix h(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    double step = 1e-6 * (1.0 + std::fabs(theta[k]));
    Vector tp = theta, tm = theta;
    tp[k] += step;
    tm[k] -= step;
    Vector gp = objectives::gradient(spec, d, tp);
    Vector gm = objectives::gradient(spec, d, tm);
    for (std::size_t i = 0; i < n; ++i) h(i, k) = (gp[i] - gm[i]) / (2.0 * step);
  }
  return h;
}

}  // namespace

TEST_CASE("least squares single sample") {
  ObjectiveSpec spec{Kind::LeastSquares, 0.0};
  LocalData d;
  d.x = DenseMatrix(1, 1);
  d.x(0, 0) = 1.0;
  d.y = {0.0};
  Vector theta{2.0};
  CHECK(objectives::cost(spec, d, theta) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(objectives::gradient(spec, d, theta)[0] == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("least squares hessian with identity samples") {
  ObjectiveSpec spec{Kind::LeastSquares, 0.0};
  LocalData d;
  d.x = DenseMatrix::identity(2);
  d.y = {0.0, 0.0};
  DenseMatrix h = objectives::hessian(spec, d, Vector{0.0, 0.0});
  CHECK(h(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h(1, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(h(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("logistic cost and curvature at zero") {
  ObjectiveSpec spec{Kind::Logistic, 0.05};
  LocalData d = random_shard(3, 4, 9, true);
  Vector zero(4, 0.0);
  CHECK(objectives::cost(spec, d, zero) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

  // At theta = 0 every sigmoid weight is 1/4.
  DenseMatrix h = objectives::hessian(spec, d, zero);
  DenseMatrix expect = numkernel::gram(d.x);
  for (double& v : expect.entries) v *= 0.25 / 9.0;
  for (std::size_t i = 0; i < 4; ++i) expect(i, i) += spec.mu;
  numkernel::add_scaled(expect, -1.0, h);
  CHECK(numkernel::max_abs(expect) <= 1e-14);
}

TEST_CASE("frozen logistic instance matches a 50-digit oracle") {
  ObjectiveSpec spec{Kind::Logistic, 0.1};
  LocalData d;
  d.x = DenseMatrix(3, 4);
  const double xs[3][4] = {
      {1.3649922974572282, -0.39652397525381783, 0.0044985261598320912, -0.580613055262029},
      {-1.7128889914555152, 2.0622780064401693, 0.28564841585326495, -0.51599624805554756},
      {-0.23379899967590284, 0.045034396217303943, 0.69530547053316938, -1.2957354278544932}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) d.x(i, j) = xs[i][j];
  d.y = {-1.0, -1.0, 1.0, 1.0};
  Vector theta{-0.39130464545419102, 0.22810905200093937, -0.28163996396914664};

  double c = objectives::cost(spec, d, theta);
  CHECK(std::fabs(c - 0.6753175999380332) <= 1e-12 * 0.6753175999380332);

  Vector g = objectives::gradient(spec, d, theta);
  const double gexp[3] = {0.05318715879920851, 0.24120767221033176, -0.0066616069390869736};
  for (int i = 0; i < 3; ++i) CHECK(std::fabs(g[i] - gexp[i]) <= 1e-12);

  DenseMatrix h = objectives::hessian(spec, d, theta);
  const double hexp[3][3] = {
      {0.22624555315844677, -0.15097732130054586, 0.026971817230052143},
      {-0.15097732130054586, 0.51645861156540485, 0.078098129512099934},
      {0.026971817230052143, 0.078098129512099934, 0.23229858186590144}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(h(i, j) - hexp[i][j]) <= 1e-12);
}

TEST_CASE("derivatives agree with central differences") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    bool logistic = seed % 2 == 0;
    ObjectiveSpec spec{logistic ? Kind::Logistic : Kind::LeastSquares, 0.01 * (seed % 3)};
    std::size_t n = 2 + seed % 5;
    LocalData d = random_shard(100 + seed, n, 3 * n, logistic);
    rng::SplitMix64 g(200 + seed);
    Vector theta(n);
    for (double& v : theta) v = 0.5 * g.gaussian();

    Vector grad = objectives::gradient(spec, d, theta);
    Vector fd = fd_gradient(spec, d, theta);
    numkernel::axpy(-1.0, grad, fd);
    CAPTURE(seed);
    CHECK(numkernel::norm2(fd) <= 1e-5 * std::max(1.0, numkernel::norm2(grad)));

    DenseMatrix hess = objectives::hessian(spec, d, theta);
    DenseMatrix fh = fd_hessian(spec, d, theta);
    numkernel::add_scaled(fh, -1.0, hess);
    CHECK(numkernel::max_abs(fh) <= 1e-4 * std::max(1.0, numkernel::max_abs(hess)));
  }
}

TEST_CASE("weighted shard averages equal the pooled objective") {
  ObjectiveSpec spec{Kind::Logistic, 0.02};
  std::vector<LocalData> shards;
  std::size_t n = 5, total = 0;
  for (std::uint64_t i = 0; i < 4; ++i) {
    LocalData s = random_shard(300 + i, n, 6 + 3 * i, true);
    total += s.x.cols;
    shards.push_back(s);
  }
  for (auto& s : shards) s.weight = static_cast<double>(s.x.cols) / static_cast<double>(total);
  LocalData all = objectives::pooled(shards);

  rng::SplitMix64 g(400);
  Vector theta(n);
  for (double& v : theta) v = g.gaussian();

  double cavg = 0.0;
  Vector gavg(n, 0.0);
  DenseMatrix havg(n, n);
  for (const auto& s : shards) {
    cavg += s.weight * objectives::cost(spec, s, theta);
    numkernel::axpy(s.weight, objectives::gradient(spec, s, theta), gavg);
    numkernel::add_scaled(havg, s.weight, objectives::hessian(spec, s, theta));
  }
  CHECK(std::fabs(cavg - objectives::cost(spec, all, theta)) <= 1e-12);
  Vector gg = objectives::gradient(spec, all, theta);
  numkernel::axpy(-1.0, gg, gavg);
  CHECK(numkernel::norm2(gavg) <= 1e-12);
  DenseMatrix hh = objectives::hessian(spec, all, theta);
  numkernel::add_scaled(havg, -1.0, hh);
  CHECK(numkernel::max_abs(havg) <= 1e-12);
}

TEST_CASE("hessian eigenvalues stay above the ridge") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    ObjectiveSpec spec{seed % 2 ? Kind::Logistic : Kind::LeastSquares, 0.3};
    LocalData d = random_shard(500 + seed, 4, 3, seed % 2 == 1);  // rank deficient shard
    rng::SplitMix64 g(600 + seed);
    Vector theta(4);
    for (double& v : theta) v = g.gaussian();
    auto e = numkernel::sym_eigendecompose(objectives::hessian(spec, d, theta));
    CAPTURE(seed);
    CHECK(e.values.back() >= spec.mu - 1e-10);
  }
}

TEST_CASE("closed form least squares optimum") {
  ObjectiveSpec spec{Kind::LeastSquares, 0.0};
  LocalData d;
  d.x = DenseMatrix::identity(2);
  d.y = {3.0, 5.0};
  Vector opt = objectives::ls_optimum(spec, d);
  CHECK(opt[0] == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(opt[1] == doctest::Approx(5.0).epsilon(1e-12));

  ObjectiveSpec ridge{Kind::LeastSquares, 0.7};
  LocalData z = random_shard(900, 3, 8, false);
  for (double& v : z.y) v = 0.0;
  Vector zopt = objectives::ls_optimum(ridge, z);
  CHECK(numkernel::norm2(zopt) <= 1e-12);

  LocalData r = random_shard(901, 4, 12, false);
  Vector ropt = objectives::ls_optimum(ridge, r);
  Vector g = objectives::gradient(ridge, r, ropt);
  CHECK(numkernel::norm2(g) <= 1e-9 * (1.0 + numkernel::norm2(ropt)));
}

TEST_CASE("newton solve reaches the ls optimum") {
  ObjectiveSpec spec{Kind::LeastSquares, 0.2};
  LocalData d = random_shard(950, 4, 20, false);
  Vector direct = objectives::ls_optimum(spec, d);
  Vector iterated = objectives::newton_optimum(spec, d, 1e-13, 50);
  numkernel::axpy(-1.0, direct, iterated);
  CHECK(numkernel::norm2(iterated) <= 1e-10);
}

TEST_CASE("extreme margins stay finite") {
  CHECK(std::isfinite(objectives::softplus(1e4)));
  CHECK(std::isfinite(objectives::softplus(-1e4)));
  CHECK(objectives::softplus(1e4) == doctest::Approx(1e4).epsilon(1e-15));
  CHECK(objectives::softplus(-1e4) >= 0.0);
  CHECK(objectives::sigmoid(1e4) == doctest::Approx(1.0));
  CHECK(objectives::sigmoid(-1e4) >= 0.0);
  CHECK(objectives::sigmoid(0.0) == doctest::Approx(0.5));

  ObjectiveSpec spec{Kind::Logistic, 0.0};
  LocalData d;
  d.x = DenseMatrix(1, 2);
  d.x(0, 0) = 1e4;
  d.x(0, 1) = -1e4;
  d.y = {1.0, 1.0};
  Vector theta{1.0};
  CHECK(std::isfinite(objectives::cost(spec, d, theta)));
  CHECK(std::isfinite(objectives::gradient(spec, d, theta)[0]));
  CHECK(std::isfinite(objectives::hessian(spec, d, theta)(0, 0)));
}

TEST_CASE("logistic rejects labels outside {-1,+1}") {
  ObjectiveSpec spec{Kind::Logistic, 0.0};
  LocalData d;
  d.x = DenseMatrix(1, 2);
  d.x(0, 0) = 1.0;
  d.x(0, 1) = 2.0;
  d.y = {1.0, 0.0};
  CHECK_THROWS_AS((void)objectives::cost(spec, d, Vector{0.0}), std::invalid_argument);
}
