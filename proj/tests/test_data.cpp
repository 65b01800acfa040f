#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "fedshed/data.hpp"
#include "fedshed/numkernel.hpp"
#include "fedshed/rng.hpp"
#include "fedshed/objectives.hpp"
#include "fedshed/rng.hpp"

using fedshed::data::Dataset;
using fedshed::data::DatasetKind;
using fedshed::data::PartitionScheme;
using fedshed::data::PartitionSpec;
using fedshed::numkernel::DenseMatrix;
using fedshed::numkernel::Vector;

namespace {

std::string temp_path(const std::string& name) { return "/tmp/fedshed_test_" + name; }

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  REQUIRE(static_cast<bool>(out));
  out << text;
}

// Datasets whose feature row 0 is the class id and row 1 the sample id,
// so shard membership and provenance stay checkable after partitioning.
Dataset tagged_classes(const std::vector<std::size_t>& class_sizes) {
  Dataset ds;
  std::size_t total = 0;
  for (auto s : class_sizes) total += s;
  ds.x = DenseMatrix(2, total);
  ds.y.resize(total);
  std::size_t j = 0;
  for (std::size_t c = 0; c < class_sizes.size(); ++c)
    for (std::size_t k = 0; k < class_sizes[c]; ++k, ++j) {
      ds.x(0, j) = static_cast<double>(c);
      ds.x(1, j) = static_cast<double>(j);
      ds.y[j] = static_cast<double>(c);
    }
  ds.kind = DatasetKind::Multiclass;
  return ds;
}

std::vector<std::size_t> shard_sample_ids(const fedshed::objectives::LocalData& shard) {
  std::vector<std::size_t> ids;
  for (std::size_t j = 0; j < shard.x.cols; ++j)
    ids.push_back(static_cast<std::size_t>(std::llround(shard.x(1, j))));
  return ids;
}

void check_disjoint_exhaustive(const std::vector<fedshed::objectives::LocalData>& shards,
                               std::size_t total) {
  std::set<std::size_t> seen;
  std::size_t count = 0;
  for (const auto& s : shards) {
    for (auto id : shard_sample_ids(s)) {
      CHECK(seen.insert(id).second);
      ++count;
    }
  }
  CHECK(count == total);
  double wsum = 0.0;
  for (const auto& s : shards) wsum += s.weight;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

double pairwise_distance(const DenseMatrix& x, std::size_t a, std::size_t b) {
  double d = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double t = x(i, a) - x(i, b);
    d += t * t;
  }
  return std::sqrt(d);
}

}  // namespace

TEST_CASE("libsvm loader handles sparse records and canonical labels") {
  auto path = temp_path("basic.libsvm");
  write_file(path, "+1 1:0.5 3:1.0\n-1 2:2.0\n0 1:7.0\n");
  auto ds = fedshed::data::load_libsvm(path, 3);
  REQUIRE(ds.x.rows == 3);
  REQUIRE(ds.x.cols == 3);
  CHECK(ds.x(0, 0) == 0.5);
  CHECK(ds.x(1, 0) == 0.0);
  CHECK(ds.x(2, 0) == 1.0);
  CHECK(ds.x(0, 1) == 0.0);
  CHECK(ds.x(1, 1) == 2.0);
  CHECK(ds.x(2, 1) == 0.0);
  CHECK(ds.x(0, 2) == 7.0);
  CHECK(ds.y == Vector{1.0, -1.0, -1.0});
  CHECK(ds.kind == DatasetKind::Binary);
}

TEST_CASE("libsvm loader keeps genuine multiclass labels untouched") {
  auto path = temp_path("multi.libsvm");
  write_file(path, "0 1:1.0\n3 1:2.0\n7 1:3.0\n");
  auto ds = fedshed::data::load_libsvm(path, 1);
  CHECK(ds.y == Vector{0.0, 3.0, 7.0});
  CHECK(ds.kind == DatasetKind::Multiclass);
}

TEST_CASE("libsvm loader reports malformed records with line numbers") {
  auto path = temp_path("bad.libsvm");
  write_file(path, "+1 1:0.5\n-1 5:1.0\n");
  CHECK_THROWS_WITH_AS(fedshed::data::load_libsvm(path, 3),
                       doctest::Contains("line 2"), std::invalid_argument);
  write_file(path, "+1 2:0.5 2:1.0\n");
  CHECK_THROWS_WITH_AS(fedshed::data::load_libsvm(path, 3),
                       doctest::Contains("ascending"), std::invalid_argument);
  write_file(path, "+1 2:abc\n");
  CHECK_THROWS_AS(fedshed::data::load_libsvm(path, 3), std::invalid_argument);
}

TEST_CASE("csv loader parses rows, detects headers and label kinds") {
  auto path = temp_path("basic.csv");
  write_file(path, "f0,f1,label\n1.0,2.0,3.5\n4.0,5.0,-1.25\n");
  auto ds = fedshed::data::load_csv(path, 2);
  REQUIRE(ds.x.rows == 2);
  REQUIRE(ds.x.cols == 2);
  CHECK(ds.x(0, 0) == 1.0);
  CHECK(ds.x(1, 0) == 2.0);
  CHECK(ds.y == Vector{3.5, -1.25});
  CHECK(ds.kind == DatasetKind::Regression);

  write_file(path, "1.0,0\n2.0,1\n3.0,1\n");
  auto bin = fedshed::data::load_csv(path, 1);
  CHECK(bin.y == Vector{-1.0, 1.0, 1.0});
  CHECK(bin.kind == DatasetKind::Binary);

  // Label in a middle column.
  write_file(path, "1.0,9.0,2.0\n3.0,8.0,4.0\n");
  auto mid = fedshed::data::load_csv(path, 1);
  CHECK(mid.y == Vector{9.0, 8.0});
  CHECK(mid.x(0, 1) == 3.0);
  CHECK(mid.x(1, 1) == 4.0);
}

TEST_CASE("csv loader rejects ragged and non-numeric rows by line") {
  auto path = temp_path("ragged.csv");
  write_file(path, "1.0,2.0\n3.0\n");
  CHECK_THROWS_WITH_AS(fedshed::data::load_csv(path, 1),
                       doctest::Contains("line 2"), std::invalid_argument);
  write_file(path, "1.0,2.0\n3.0,oops\n");
  CHECK_THROWS_WITH_AS(fedshed::data::load_csv(path, 1),
                       doctest::Contains("line 2"), std::invalid_argument);
  write_file(path, "");
  CHECK_THROWS_AS(fedshed::data::load_csv(path, 1), std::invalid_argument);
  write_file(path, "1.0,2.0\n");
  CHECK_THROWS_WITH_AS(fedshed::data::load_csv(path, 7),
                       doctest::Contains("label column"), std::invalid_argument);
}

TEST_CASE("csv round-trip is bit-exact") {
  fedshed::rng::SplitMix64 gen(99);
  Dataset ds;
  ds.x = DenseMatrix(3, 17);
  ds.y.resize(17);
  for (double& e : ds.x.entries) e = gen.gaussian() * std::pow(10.0, gen.gaussian() * 4.0);
  for (double& v : ds.y) v = gen.gaussian();
  ds.x(0, 0) = 1.0 / 3.0;
  ds.x(1, 0) = 1e-300;
  ds.kind = DatasetKind::Regression;
  auto path = temp_path("roundtrip.csv");
  fedshed::data::write_csv(ds, path, 3);
  auto back = fedshed::data::load_csv(path, 3);
  REQUIRE(back.x.rows == ds.x.rows);
  REQUIRE(back.x.cols == ds.x.cols);
  for (std::size_t k = 0; k < ds.x.entries.size(); ++k) CHECK(back.x.entries[k] == ds.x.entries[k]);
  for (std::size_t j = 0; j < ds.y.size(); ++j) CHECK(back.y[j] == ds.y[j]);
}

TEST_CASE("min-max rescale maps each feature to [0,1] and is idempotent") {
  Dataset ds;
  ds.x = DenseMatrix(2, 3);
  ds.x(0, 0) = 0.0; ds.x(0, 1) = 5.0; ds.x(0, 2) = 10.0;
  ds.x(1, 0) = 4.0; ds.x(1, 1) = 4.0; ds.x(1, 2) = 4.0;  // constant feature
  ds.y = {10.0, 30.0, 20.0};
  ds.kind = DatasetKind::Regression;
  auto r = fedshed::data::rescale_minmax(ds);
  CHECK(r.x(0, 0) == 0.0);
  CHECK(r.x(0, 1) == 0.5);
  CHECK(r.x(0, 2) == 1.0);
  CHECK(r.x(1, 0) == 0.0);
  CHECK(r.x(1, 2) == 0.0);
  CHECK(r.y == Vector{0.0, 1.0, 0.5});
  auto rr = fedshed::data::rescale_minmax(r);
  CHECK(rr.x.entries == r.x.entries);
  CHECK(rr.y == r.y);

  // Classification labels stay untouched.
  Dataset bin = ds;
  bin.y = {-1.0, 1.0, 1.0};
  bin.kind = DatasetKind::Binary;
  CHECK(fedshed::data::rescale_minmax(bin).y == bin.y);
}

TEST_CASE("pca with k = n preserves pairwise distances") {
  fedshed::rng::SplitMix64 gen(3);
  Dataset ds;
  ds.x = DenseMatrix(5, 40);
  ds.y.assign(40, 0.0);
  for (double& e : ds.x.entries) e = gen.gaussian();
  auto proj = fedshed::data::pca_project(ds, 5);
  REQUIRE(proj.x.rows == 5);
  for (std::size_t a = 0; a < 40; ++a)
    for (std::size_t b = a + 1; b < 40; ++b)
      CHECK(pairwise_distance(proj.x, a, b) ==
            doctest::Approx(pairwise_distance(ds.x, a, b)).epsilon(1e-8));
}

TEST_CASE("pca recovers a one-dimensional subspace exactly") {
  fedshed::rng::SplitMix64 gen(4);
  std::size_t n = 4, N = 30;
  Vector a(n), b(n);
  for (double& e : a) e = gen.gaussian();
  for (double& e : b) e = gen.gaussian();
  Dataset ds;
  ds.x = DenseMatrix(n, N);
  ds.y.assign(N, 0.0);
  Vector t(N);
  for (std::size_t j = 0; j < N; ++j) {
    t[j] = gen.gaussian();
    for (std::size_t i = 0; i < n; ++i) ds.x(i, j) = a[i] + t[j] * b[i];
  }
  auto proj = fedshed::data::pca_project(ds, 1);
  for (std::size_t p = 0; p < N; ++p)
    for (std::size_t q = p + 1; q < N; ++q)
      CHECK(pairwise_distance(proj.x, p, q) ==
            doctest::Approx(pairwise_distance(ds.x, p, q)).epsilon(1e-8));
  // All variance lives on the line, so the single component captures it.
  double total = 0.0, captured = 0.0;
  Vector mean(n, 0.0);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < n; ++i) mean[i] += ds.x(i, j) / static_cast<double>(N);
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      double d = ds.x(i, j) - mean[i];
      total += d * d;
    }
    captured += proj.x(0, j) * proj.x(0, j);
  }
  CHECK(captured == doctest::Approx(total).epsilon(1e-10));
}

TEST_CASE("one-vs-all relabel flips everything but the target") {
  auto ds = tagged_classes({2, 3, 1});
  auto rel = fedshed::data::relabel_one_vs_all(ds, 1.0);
  CHECK(rel.y == Vector{-1.0, -1.0, 1.0, 1.0, 1.0, -1.0});
  CHECK(rel.kind == DatasetKind::Binary);
  CHECK_THROWS_AS(fedshed::data::relabel_one_vs_all(ds, 9.0), std::invalid_argument);
}

TEST_CASE("iid partition shuffles, balances and keeps every sample once") {
  auto ds = tagged_classes({7, 7, 7});
  PartitionSpec spec;
  spec.scheme = PartitionScheme::Iid;
  spec.agents = 4;
  spec.seed = 5;
  auto shards = fedshed::data::partition(ds, spec);
  REQUIRE(shards.size() == 4);
  check_disjoint_exhaustive(shards, 21);
  std::vector<std::size_t> sizes;
  for (const auto& s : shards) sizes.push_back(s.y.size());
  std::sort(sizes.begin(), sizes.end());
  CHECK(sizes == std::vector<std::size_t>{5, 5, 5, 6});
  CHECK(shards[0].weight == doctest::Approx(6.0 / 21.0).epsilon(1e-12));

  // Same seed reproduces the split; a different seed moves samples.
  auto again = fedshed::data::partition(ds, spec);
  CHECK(shard_sample_ids(again[0]) == shard_sample_ids(shards[0]));
  spec.seed = 6;
  auto moved = fedshed::data::partition(ds, spec);
  bool any_diff = false;
  for (std::size_t i = 0; i < 4; ++i)
    if (shard_sample_ids(moved[i]) != shard_sample_ids(shards[i])) any_diff = true;
  CHECK(any_diff);

  spec.agents = 1;
  auto whole = fedshed::data::partition(ds, spec);
  REQUIRE(whole.size() == 1);
  auto ids = shard_sample_ids(whole[0]);
  std::sort(ids.begin(), ids.end());
  for (std::size_t j = 0; j < 21; ++j) CHECK(ids[j] == j);
  CHECK(whole[0].weight == 1.0);
}

TEST_CASE("iid partition with a target builds a balanced one-vs-all pool") {
  auto ds = tagged_classes({20, 20, 20, 20, 20});
  PartitionSpec spec;
  spec.scheme = PartitionScheme::Iid;
  spec.agents = 4;
  spec.seed = 11;
  spec.target = 2.0;
  auto shards = fedshed::data::partition(ds, spec);
  REQUIRE(shards.size() == 4);
  std::size_t pos = 0, neg = 0, total = 0;
  for (const auto& s : shards) {
    for (std::size_t j = 0; j < s.y.size(); ++j) {
      REQUIRE((s.y[j] == 1.0 || s.y[j] == -1.0));
      if (s.y[j] == 1.0) {
        CHECK(s.x(0, j) == 2.0);
        ++pos;
      } else {
        CHECK(s.x(0, j) != 2.0);
        ++neg;
      }
    }
    total += s.y.size();
  }
  CHECK(pos == 20);
  CHECK(neg == 20);
  CHECK(total == 40);
  // Contrast drawn equally from the four other classes.
  std::vector<std::size_t> per_class(5, 0);
  for (const auto& s : shards)
    for (std::size_t j = 0; j < s.y.size(); ++j)
      per_class[static_cast<std::size_t>(std::llround(s.x(0, j)))] += 1;
  CHECK(per_class[0] == 5);
  CHECK(per_class[1] == 5);
  CHECK(per_class[3] == 5);
  CHECK(per_class[4] == 5);
}

TEST_CASE("label-skew partition keeps one label per shard with skewed sizes") {
  auto ds = tagged_classes({5, 15, 60});
  PartitionSpec spec;
  spec.scheme = PartitionScheme::LabelSkew;
  spec.agents = 3;
  spec.seed = 7;
  auto shards = fedshed::data::partition(ds, spec);
  REQUIRE(shards.size() == 3);
  check_disjoint_exhaustive(shards, 80);
  std::size_t smallest = 80, largest = 0;
  for (const auto& s : shards) {
    std::set<double> labels(s.y.begin(), s.y.end());
    CHECK(labels.size() == 1);
    smallest = std::min(smallest, s.y.size());
    largest = std::max(largest, s.y.size());
  }
  CHECK(largest >= 3 * smallest);
}

TEST_CASE("label-skew with more agents than labels cuts inside groups") {
  auto ds = tagged_classes({30, 30, 40});
  PartitionSpec spec;
  spec.scheme = PartitionScheme::LabelSkew;
  spec.agents = 10;
  spec.seed = 21;
  auto shards = fedshed::data::partition(ds, spec);
  REQUIRE(shards.size() == 10);
  check_disjoint_exhaustive(shards, 100);
  for (const auto& s : shards) {
    std::set<double> labels(s.y.begin(), s.y.end());
    CHECK(labels.size() == 1);
    CHECK(s.y.size() >= 1);
  }

  // Size clip is honored when feasible.
  spec.min_shard = 5;
  spec.max_shard = 20;
  auto clipped = fedshed::data::partition(ds, spec);
  check_disjoint_exhaustive(clipped, 100);
  for (const auto& s : clipped) {
    CHECK(s.y.size() >= 5);
    CHECK(s.y.size() <= 20);
  }
}

TEST_CASE("label-skew with fewer agents than labels deals whole groups") {
  auto ds = tagged_classes({10, 20, 30, 40});
  PartitionSpec spec;
  spec.scheme = PartitionScheme::LabelSkew;
  spec.agents = 2;
  spec.seed = 1;
  auto shards = fedshed::data::partition(ds, spec);
  REQUIRE(shards.size() == 2);
  check_disjoint_exhaustive(shards, 100);
  // Round-robin in label order: {0,2} and {1,3}.
  std::set<double> first(shards[0].y.begin(), shards[0].y.end());
  std::set<double> second(shards[1].y.begin(), shards[1].y.end());
  CHECK(first == std::set<double>{0.0, 2.0});
  CHECK(second == std::set<double>{1.0, 3.0});
}

TEST_CASE("two-class partition pairs the target with one contrast class each") {
  auto ds = tagged_classes({12, 12, 12, 12});
  PartitionSpec spec;
  spec.scheme = PartitionScheme::TwoClass;
  spec.agents = 6;
  spec.seed = 13;
  spec.target = 0.0;
  auto shards = fedshed::data::partition(ds, spec);
  REQUIRE(shards.size() == 6);
  std::set<std::size_t> seen;
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& s = shards[i];
    REQUIRE(s.y.size() == 4);  // 2 target + 2 contrast, balanced
    std::set<double> classes;
    std::size_t pos = 0;
    for (std::size_t j = 0; j < s.y.size(); ++j) {
      REQUIRE((s.y[j] == 1.0 || s.y[j] == -1.0));
      if (s.y[j] == 1.0) ++pos;
      classes.insert(s.x(0, j));
      CHECK(seen.insert(static_cast<std::size_t>(std::llround(s.x(1, j)))).second);
    }
    CHECK(pos == 2);
    REQUIRE(classes.size() == 2);
    CHECK(classes.count(0.0) == 1);
    // Contrast classes cycle 1,2,3,1,2,3 in label order.
    double expect = static_cast<double>(1 + (i % 3));
    CHECK(classes.count(expect) == 1);
  }
  double wsum = 0.0;
  for (const auto& s : shards) wsum += s.weight;
  CHECK(wsum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("partition argument validation") {
  auto ds = tagged_classes({4, 4});
  PartitionSpec spec;
  spec.agents = 0;
  CHECK_THROWS_AS(fedshed::data::partition(ds, spec), std::invalid_argument);
  spec.agents = 9;
  CHECK_THROWS_AS(fedshed::data::partition(ds, spec), std::invalid_argument);
  spec.agents = 2;
  spec.scheme = PartitionScheme::TwoClass;
  CHECK_THROWS_AS(fedshed::data::partition(ds, spec), std::invalid_argument);
  spec.target = 7.0;
  CHECK_THROWS_AS(fedshed::data::partition(ds, spec), std::invalid_argument);
}

TEST_CASE("synthetic least-squares design hits the requested conditioning") {
  auto ds = fedshed::data::gen_synthetic("ls", 120, 8, 1.0, 0.1, 17);
  CHECK(ds.kind == DatasetKind::Regression);
  REQUIRE(ds.x.rows == 8);
  REQUIRE(ds.x.cols == 120);
  fedshed::objectives::LocalData shard{ds.x, ds.y, 1.0};
  fedshed::objectives::ObjectiveSpec ls{fedshed::objectives::Kind::LeastSquares, 0.0};
  auto h = fedshed::objectives::hessian(ls, shard, Vector(8, 0.0));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j)
      CHECK(h(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8).scale(1.0));

  auto hard = fedshed::data::gen_synthetic("ls", 200, 10, 1e3, 0.1, 18);
  fedshed::objectives::LocalData hs{hard.x, hard.y, 1.0};
  auto hh = fedshed::objectives::hessian(ls, hs, Vector(10, 0.0));
  auto eig = fedshed::numkernel::sym_eigendecompose(hh);
  double measured = eig.values.front() / eig.values.back();
  CHECK(measured > 0.9e3);
  CHECK(measured < 1.1e3);
}

TEST_CASE("noise-free synthetic regression is solved exactly by its optimum") {
  auto ds = fedshed::data::gen_synthetic("ls", 100, 6, 50.0, 0.0, 23);
  fedshed::objectives::LocalData shard{ds.x, ds.y, 1.0};
  fedshed::objectives::ObjectiveSpec ls{fedshed::objectives::Kind::LeastSquares, 0.0};
  auto theta = fedshed::objectives::ls_optimum(ls, {shard});
  CHECK(fedshed::objectives::cost(ls, shard, theta) <= 1e-12);
}

TEST_CASE("synthetic logistic and cluster generators label as promised") {
  auto lg = fedshed::data::gen_synthetic("logistic", 150, 5, 10.0, 0.0, 31);
  CHECK(lg.kind == DatasetKind::Binary);
  std::size_t pos = 0;
  for (double v : lg.y) {
    REQUIRE((v == 1.0 || v == -1.0));
    if (v == 1.0) ++pos;
  }
  CHECK(pos > 15);
  CHECK(pos < 135);

  auto cl = fedshed::data::gen_synthetic("clusters", 100, 4, 1.0, 0.2, 41);
  CHECK(cl.kind == DatasetKind::Multiclass);
  std::vector<std::size_t> counts(5, 0);
  for (double v : cl.y) counts[static_cast<std::size_t>(std::llround(v))] += 1;
  for (auto c : counts) CHECK(c == 20);

  CHECK_THROWS_AS(fedshed::data::gen_synthetic("nope", 10, 2, 1.0, 0.0, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(fedshed::data::gen_synthetic("ls", 10, 2, 0.5, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fedshed::data::gen_synthetic("ls", 3, 5, 1.0, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(fedshed::data::gen_synthetic("clusters", 10, 2, 0.5, 1.0, 1),
                  std::invalid_argument);
}

TEST_CASE("anisotropic cluster noise squeezes trailing coordinates") {
  // cond sets the first-to-last per-coordinate noise ratio; verify the
  // within-cluster deviations shrink by roughly that factor.
  const double cond = 10.0;
  auto ds = fedshed::data::gen_synthetic("clusters", 5000, 6, cond, 1.0, 7);
  std::array<double, 6> dev_first{}, dev_last{};
  std::array<std::size_t, 5> seen{};
  // Per-class coordinate means over the sample.
  std::array<std::array<double, 6>, 5> mean{};
  for (std::size_t j = 0; j < 5000; ++j) {
    auto c = static_cast<std::size_t>(ds.y[j]);
    seen[c] += 1;
    for (std::size_t i = 0; i < 6; ++i) mean[c][i] += ds.x(i, j);
  }
  for (std::size_t c = 0; c < 5; ++c)
    for (std::size_t i = 0; i < 6; ++i) mean[c][i] /= static_cast<double>(seen[c]);
  for (std::size_t j = 0; j < 5000; ++j) {
    auto c = static_cast<std::size_t>(ds.y[j]);
    for (std::size_t i = 0; i < 6; ++i) {
      double d = ds.x(i, j) - mean[c][i];
      dev_first[i] += d * d;
    }
  }
  double sd0 = std::sqrt(dev_first[0] / 5000.0);
  double sd5 = std::sqrt(dev_first[5] / 5000.0);
  CHECK(sd0 / sd5 > 0.8 * cond);
  CHECK(sd0 / sd5 < 1.2 * cond);
  (void)dev_last;

  // cond = 1 keeps the isotropic draws bit-identical to the unscaled form.
  auto iso = fedshed::data::gen_synthetic("clusters", 40, 3, 1.0, 0.7, 9);
  fedshed::rng::SplitMix64 gen(9);
  fedshed::numkernel::DenseMatrix means(3, 5);
  for (double& e : means.entries) e = 2.0 * gen.gaussian();
  for (std::size_t j = 0; j < 40; ++j)
    for (std::size_t i = 0; i < 3; ++i)
      CHECK(iso.x(i, j) == means(i, j % 5) + 0.7 * gen.gaussian());
}
