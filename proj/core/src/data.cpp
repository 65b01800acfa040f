#include "fedshed/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedshed/rng.hpp"

namespace fedshed::data {

namespace {

constexpr double LABEL_SKEW_PARETO_SHAPE = 1.2;  // heavy-tailed shard sizes
constexpr std::size_t CLUSTER_CLASSES = 5;
constexpr double CLUSTER_SPREAD = 2.0;

// Distinct sub-stream ids so independent draws never share a sequence.
enum StreamId : std::uint64_t {
  STREAM_SHUFFLE = 1,
  STREAM_CLASS_POOL = 2,
  STREAM_SKEW_SIZES = 3,
};

bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  const char* s = token.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end == s + token.size() && std::isfinite(out);
}

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string trimmed(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// Labels that are all whole numbers with a few distinct values mark a
// classification source; {-1,+1} (or {0,1}, remapped) mark it binary.
DatasetKind detect_kind(Vector& y) {
  bool integral = true;
  std::vector<double> distinct;
  for (double v : y) {
    if (std::abs(v - std::round(v)) > 1e-9) integral = false;
    if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) distinct.push_back(v);
  }
  if (integral && distinct.size() == 2) {
    std::sort(distinct.begin(), distinct.end());
    if (distinct[0] == -1.0 && distinct[1] == 1.0) return DatasetKind::Binary;
    if (distinct[0] == 0.0 && distinct[1] == 1.0) {
      std::cerr << "W: remapping labels {0,1} to {-1,+1}\n";
      for (double& v : y) v = (v == 0.0) ? -1.0 : 1.0;
      return DatasetKind::Binary;
    }
  }
  if (integral && distinct.size() >= 3 && distinct.size() <= 1000 && distinct.size() < y.size())
    return DatasetKind::Multiclass;
  return DatasetKind::Regression;
}

std::vector<std::size_t> shuffled_indices(std::size_t n, rng::SplitMix64& gen) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Fisher-Yates, descending so each position is drawn exactly once.
  for (std::size_t i = n; i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(gen.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

Dataset take_columns(const Dataset& ds, const std::vector<std::size_t>& cols) {
  Dataset out;
  out.kind = ds.kind;
  out.x = DenseMatrix(ds.x.rows, cols.size());
  out.y.resize(cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < ds.x.rows; ++i) out.x(i, j) = ds.x(i, cols[j]);
    out.y[j] = ds.y[cols[j]];
  }
  return out;
}

objectives::LocalData make_shard(const Dataset& ds, const std::vector<std::size_t>& cols) {
  Dataset sub = take_columns(ds, cols);
  objectives::LocalData shard;
  shard.x = std::move(sub.x);
  shard.y = std::move(sub.y);
  shard.weight = 0.0;  // filled once the total placed count is known
  return shard;
}

// Split [0,n) into m contiguous near-equal chunks (first n%m get one extra).
std::vector<std::size_t> chunk_sizes(std::size_t n, std::size_t m) {
  std::vector<std::size_t> sizes(m, n / m);
  for (std::size_t i = 0; i < n % m; ++i) sizes[i] += 1;
  return sizes;
}

// Group sample indices by exact label value, ordered by label.
std::map<double, std::vector<std::size_t>> group_by_label(const Dataset& ds) {
  std::map<double, std::vector<std::size_t>> groups;
  for (std::size_t j = 0; j < ds.y.size(); ++j) groups[ds.y[j]].push_back(j);
  return groups;
}

/*
 * Draw m heavy-tailed shard sizes summing to total, each at least 1 and
 * clipped to [min_shard, max_shard] where that stays feasible.
 */
std::vector<std::size_t> pareto_sizes(std::size_t total, std::size_t m, std::size_t min_shard,
                                      std::size_t max_shard, rng::SplitMix64& gen) {
  if (m == 0) throw std::invalid_argument("pareto_sizes: zero shards");
  if (total < m) throw std::invalid_argument("pareto_sizes: fewer samples than shards");
  std::vector<double> w(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double u = gen.uniform();
    w[i] = std::pow(1.0 - u, -1.0 / LABEL_SKEW_PARETO_SHAPE);
    sum += w[i];
  }
  std::size_t lo = std::max<std::size_t>(1, min_shard);
  std::size_t hi = std::min<std::size_t>(total, max_shard);
  if (hi < lo) throw std::invalid_argument("pareto_sizes: empty clip range");
  std::vector<std::size_t> sizes(m);
  std::size_t placed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double share = w[i] / sum * static_cast<double>(total);
    sizes[i] = std::clamp(static_cast<std::size_t>(std::llround(share)), lo, hi);
    placed += sizes[i];
  }
  // Repair rounding drift one unit at a time, never leaving [lo, hi].
  while (placed > total) {
    std::size_t k = static_cast<std::size_t>(
        std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    if (sizes[k] <= lo) break;
    sizes[k] -= 1;
    placed -= 1;
  }
  while (placed < total) {
    std::size_t k = static_cast<std::size_t>(
        std::min_element(sizes.begin(), sizes.end()) - sizes.begin());
    if (sizes[k] >= hi) break;
    sizes[k] += 1;
    placed += 1;
  }
  if (placed != total) throw std::invalid_argument("pareto_sizes: clip range cannot hold total");
  return sizes;
}

void finalize_weights(std::vector<objectives::LocalData>& shards) {
  double total = 0.0;
  for (const auto& s : shards) {
    if (s.y.empty()) throw std::invalid_argument("partition: produced an empty shard");
    total += static_cast<double>(s.y.size());
  }
  for (auto& s : shards) s.weight = static_cast<double>(s.y.size()) / total;
}

std::vector<objectives::LocalData> partition_iid(const Dataset& ds, const PartitionSpec& spec) {
  const Dataset* src = &ds;
  Dataset pooled;
  if (spec.target.has_value()) {
    // Balanced one-vs-all pool: every target sample plus an equal number
    // of other-class samples drawn equally from each remaining class.
    auto groups = group_by_label(ds);
    auto it = groups.find(*spec.target);
    if (it == groups.end()) throw std::invalid_argument("partition: target label not present");
    std::vector<std::size_t> pool = it->second;
    std::size_t want = pool.size();
    std::vector<std::pair<double, std::vector<std::size_t>>> others;
    for (auto& [label, idx] : groups)
      if (label != *spec.target) others.emplace_back(label, idx);
    if (others.empty()) throw std::invalid_argument("partition: target is the only class");
    std::size_t avail = 0;
    for (std::size_t c = 0; c < others.size(); ++c) {
      auto gen = rng::split_stream(spec.seed, STREAM_CLASS_POOL, c);
      auto perm = shuffled_indices(others[c].second.size(), gen);
      std::vector<std::size_t> out(perm.size());
      for (std::size_t i = 0; i < perm.size(); ++i) out[i] = others[c].second[perm[i]];
      avail += out.size();
      others[c].second = std::move(out);
    }
    want = std::min(want, avail);  // fewer contrast samples than targets: take them all
    std::vector<std::size_t> taken(others.size(), 0);
    for (std::size_t k = 0, c = 0; k < want; ++c) {
      std::size_t at = c % others.size();
      if (taken[at] < others[at].second.size()) {
        pool.push_back(others[at].second[taken[at]++]);
        ++k;
      }
    }
    pooled = take_columns(ds, pool);
    pooled = relabel_one_vs_all(pooled, *spec.target);
    src = &pooled;
  }
  std::size_t n = src->y.size();
  if (spec.agents > n) throw std::invalid_argument("partition: more agents than samples");
  auto gen = rng::split_stream(spec.seed, STREAM_SHUFFLE, 0);
  auto perm = shuffled_indices(n, gen);
  auto sizes = chunk_sizes(n, spec.agents);
  std::vector<objectives::LocalData> shards;
  std::size_t at = 0;
  for (std::size_t i = 0; i < spec.agents; ++i) {
    std::vector<std::size_t> cols(perm.begin() + at, perm.begin() + at + sizes[i]);
    std::sort(cols.begin(), cols.end());
    shards.push_back(make_shard(*src, cols));
    at += sizes[i];
  }
  finalize_weights(shards);
  return shards;
}

std::vector<objectives::LocalData> partition_label_skew(const Dataset& ds,
                                                        const PartitionSpec& spec) {
  auto groups = group_by_label(ds);
  std::size_t L = groups.size();
  std::size_t M = spec.agents;
  std::vector<std::vector<std::size_t>> assignment(M);
  if (M <= L) {
    // Whole label groups, dealt round-robin in label order.
    std::size_t g = 0;
    for (auto& [label, idx] : groups) {
      auto& dst = assignment[g % M];
      dst.insert(dst.end(), idx.begin(), idx.end());
      ++g;
    }
  } else {
    // Every group boundary is a shard boundary; extra cuts go inside
    // groups, allotted by size (largest remainder), sized heavy-tailed.
    std::vector<std::pair<double, std::vector<std::size_t>>> glist(groups.begin(), groups.end());
    std::size_t total = ds.y.size();
    std::size_t extra = M - L;
    std::vector<std::size_t> parts(L, 1);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t g = 0; g < L; ++g) {
      double share = static_cast<double>(glist[g].second.size()) / static_cast<double>(total) *
                     static_cast<double>(extra);
      std::size_t whole = static_cast<std::size_t>(share);
      whole = std::min(whole, glist[g].second.size() - 1);  // at least 1 sample per part
      parts[g] += whole;
      assigned += whole;
      remainders.push_back({share - static_cast<double>(whole), g});
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < extra && r < remainders.size(); ++r) {
      std::size_t g = remainders[r].second;
      if (parts[g] < glist[g].second.size()) {
        parts[g] += 1;
        assigned += 1;
      }
    }
    if (assigned != extra)
      throw std::invalid_argument("partition: label-skew cannot place this many agents");
    std::size_t shard_at = 0;
    for (std::size_t g = 0; g < L; ++g) {
      auto gen = rng::split_stream(spec.seed, STREAM_SKEW_SIZES, g);
      auto sizes = parts[g] == 1
                       ? std::vector<std::size_t>{glist[g].second.size()}
                       : pareto_sizes(glist[g].second.size(), parts[g], spec.min_shard,
                                      spec.max_shard, gen);
      std::size_t at = 0;
      for (std::size_t p = 0; p < parts[g]; ++p) {
        assignment[shard_at].assign(glist[g].second.begin() + at,
                                    glist[g].second.begin() + at + sizes[p]);
        at += sizes[p];
        ++shard_at;
      }
    }
  }
  std::vector<objectives::LocalData> shards;
  for (auto& cols : assignment) shards.push_back(make_shard(ds, cols));
  finalize_weights(shards);
  return shards;
}

std::vector<objectives::LocalData> partition_two_class(const Dataset& ds,
                                                       const PartitionSpec& spec) {
  if (!spec.target.has_value())
    throw std::invalid_argument("partition: two-class scheme needs a target label");
  auto groups = group_by_label(ds);
  auto it = groups.find(*spec.target);
  if (it == groups.end()) throw std::invalid_argument("partition: target label not present");
  std::vector<double> others;
  for (auto& [label, idx] : groups)
    if (label != *spec.target) others.push_back(label);
  if (others.empty()) throw std::invalid_argument("partition: target is the only class");

  std::size_t M = spec.agents;
  // Target samples split near-equally across all agents.
  auto tgen = rng::split_stream(spec.seed, STREAM_SHUFFLE, 0);
  auto tperm = shuffled_indices(it->second.size(), tgen);
  auto tsizes = chunk_sizes(it->second.size(), M);

  // Each agent additionally gets one non-target class, cycling in label
  // order; its contrast pool is matched in size to its target share.
  std::vector<std::vector<std::size_t>> class_pool(others.size());
  std::vector<std::size_t> class_used(others.size(), 0);
  for (std::size_t c = 0; c < others.size(); ++c) {
    auto& idx = groups[others[c]];
    auto gen = rng::split_stream(spec.seed, STREAM_CLASS_POOL, c);
    auto perm = shuffled_indices(idx.size(), gen);
    class_pool[c].resize(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) class_pool[c][i] = idx[perm[i]];
  }

  std::vector<objectives::LocalData> shards;
  std::size_t t_at = 0;
  for (std::size_t i = 0; i < M; ++i) {
    std::vector<std::size_t> cols;
    for (std::size_t k = 0; k < tsizes[i]; ++k) cols.push_back(it->second[tperm[t_at + k]]);
    t_at += tsizes[i];
    std::size_t c = i % others.size();
    std::size_t take = std::min(tsizes[i], class_pool[c].size() - class_used[c]);
    for (std::size_t k = 0; k < take; ++k) cols.push_back(class_pool[c][class_used[c] + k]);
    class_used[c] += take;
    std::sort(cols.begin(), cols.end());
    Dataset sub = take_columns(ds, cols);
    sub = relabel_one_vs_all(sub, *spec.target);
    objectives::LocalData shard;
    shard.x = std::move(sub.x);
    shard.y = std::move(sub.y);
    shard.weight = 0.0;
    shards.push_back(std::move(shard));
  }
  finalize_weights(shards);
  return shards;
}

}  // namespace

Dataset load_csv(const std::string& path, std::size_t label_column) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_csv: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trimmed(line).empty()) continue;
    auto fields = split_fields(line, ',');
    std::vector<double> row(fields.size());
    bool numeric = true;
    for (std::size_t k = 0; k < fields.size(); ++k)
      if (!parse_double(trimmed(fields[k]), row[k])) {
        numeric = false;
        if (!(rows.empty() && k == 0))
          throw std::invalid_argument("load_csv: non-numeric value at line " +
                                      std::to_string(lineno) + ", column " + std::to_string(k + 1));
        break;
      }
    if (!numeric) continue;  // header line
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw std::invalid_argument("load_csv: line " + std::to_string(lineno) + " has " +
                                  std::to_string(row.size()) + " fields, expected " +
                                  std::to_string(width));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("load_csv: no data rows in " + path);
  if (width < 2) throw std::invalid_argument("load_csv: rows need at least one feature and a label");
  if (label_column >= width)
    throw std::invalid_argument("load_csv: label column " + std::to_string(label_column) +
                                " out of range for width " + std::to_string(width));
  Dataset ds;
  std::size_t n = width - 1;
  ds.x = DenseMatrix(n, rows.size());
  ds.y.resize(rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    std::size_t at = 0;
    for (std::size_t k = 0; k < width; ++k) {
      if (k == label_column)
        ds.y[j] = rows[j][k];
      else
        ds.x(at++, j) = rows[j][k];
    }
  }
  ds.kind = detect_kind(ds.y);
  return ds;
}

void write_csv(const Dataset& ds, const std::string& path, std::size_t label_column) {
  std::size_t width = ds.x.rows + 1;
  if (label_column >= width)
    throw std::invalid_argument("write_csv: label column out of range");
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("write_csv: cannot open " + path);
  char buf[40];
  for (std::size_t j = 0; j < ds.y.size(); ++j) {
    std::size_t at = 0;
    for (std::size_t k = 0; k < width; ++k) {
      double v = (k == label_column) ? ds.y[j] : ds.x(at++, j);
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << buf << (k + 1 < width ? "," : "\n");
    }
  }
  if (!out) throw std::runtime_error("write_csv: write failed for " + path);
}

Dataset load_libsvm(const std::string& path, std::size_t n_features) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("load_libsvm: cannot open " + path);
  std::vector<std::vector<double>> cols;
  Vector labels;
  std::string line;
  std::size_t lineno = 0;
  bool warned_zero = false;
  bool binary = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (trimmed(line).empty()) continue;
    std::istringstream ss(line);
    std::string token;
    if (!(ss >> token))
      throw std::invalid_argument("load_libsvm: empty record at line " + std::to_string(lineno));
    double label;
    if (!parse_double(token, label))
      throw std::invalid_argument("load_libsvm: bad label at line " + std::to_string(lineno));
    if (label != -1.0 && label != 0.0 && label != 1.0) binary = false;
    std::vector<double> col(n_features, 0.0);
    std::size_t prev = 0;
    while (ss >> token) {
      std::size_t colon = token.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("load_libsvm: missing ':' at line " + std::to_string(lineno));
      double idx_d, val;
      if (!parse_double(token.substr(0, colon), idx_d) || idx_d != std::floor(idx_d) || idx_d < 1)
        throw std::invalid_argument("load_libsvm: bad feature index at line " +
                                    std::to_string(lineno));
      std::size_t idx = static_cast<std::size_t>(idx_d);
      if (idx > n_features)
        throw std::invalid_argument("load_libsvm: feature index " + std::to_string(idx) +
                                    " exceeds " + std::to_string(n_features) + " at line " +
                                    std::to_string(lineno));
      if (idx <= prev)
        throw std::invalid_argument("load_libsvm: indices not ascending at line " +
                                    std::to_string(lineno));
      if (!parse_double(token.substr(colon + 1), val))
        throw std::invalid_argument("load_libsvm: bad feature value at line " +
                                    std::to_string(lineno));
      col[idx - 1] = val;
      prev = idx;
    }
    cols.push_back(std::move(col));
    labels.push_back(label);
  }
  if (cols.empty()) throw std::invalid_argument("load_libsvm: no records in " + path);
  if (binary) {
    // Canonicalize the common {0,1} / {-1,+1} conventions to {-1,+1}.
    for (double& v : labels)
      if (v == 0.0) {
        if (!warned_zero) {
          std::cerr << "W: remapping label 0 to -1\n";
          warned_zero = true;
        }
        v = -1.0;
      }
  }
  Dataset ds;
  ds.x = DenseMatrix(n_features, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < n_features; ++i) ds.x(i, j) = cols[j][i];
  ds.y = std::move(labels);
  ds.kind = binary ? DatasetKind::Binary : DatasetKind::Multiclass;
  return ds;
}

Dataset rescale_minmax(const Dataset& ds) {
  Dataset out = ds;
  for (std::size_t i = 0; i < out.x.rows; ++i) {
    double lo = out.x(i, 0), hi = out.x(i, 0);
    for (std::size_t j = 1; j < out.x.cols; ++j) {
      lo = std::min(lo, out.x(i, j));
      hi = std::max(hi, out.x(i, j));
    }
    double span = hi - lo;
    for (std::size_t j = 0; j < out.x.cols; ++j)
      out.x(i, j) = span > 0.0 ? (out.x(i, j) - lo) / span : 0.0;
  }
  if (out.kind == DatasetKind::Regression && !out.y.empty()) {
    double lo = *std::min_element(out.y.begin(), out.y.end());
    double hi = *std::max_element(out.y.begin(), out.y.end());
    double span = hi - lo;
    for (double& v : out.y) v = span > 0.0 ? (v - lo) / span : 0.0;
  }
  return out;
}

Dataset pca_project(const Dataset& ds, std::size_t k) {
  std::size_t n = ds.x.rows, N = ds.x.cols;
  if (k == 0 || k > n) throw std::invalid_argument("pca_project: k out of range");
  if (N == 0) throw std::invalid_argument("pca_project: empty dataset");
  Vector mean(n, 0.0);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < n; ++i) mean[i] += ds.x(i, j);
  for (double& m : mean) m /= static_cast<double>(N);
  DenseMatrix centered(n, N);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t i = 0; i < n; ++i) centered(i, j) = ds.x(i, j) - mean[i];
  DenseMatrix cov = numkernel::gram(centered);
  for (double& e : cov.entries) e /= static_cast<double>(N);
  auto eig = numkernel::sym_eigendecompose(cov);
  Dataset out;
  out.kind = ds.kind;
  out.y = ds.y;
  out.x = DenseMatrix(k, N);
  for (std::size_t j = 0; j < N; ++j)
    for (std::size_t c = 0; c < k; ++c) {
      double z = 0.0;
      for (std::size_t i = 0; i < n; ++i) z += eig.vectors(i, c) * centered(i, j);
      out.x(c, j) = z;
    }
  return out;
}

Dataset relabel_one_vs_all(const Dataset& ds, double target) {
  bool seen = false;
  Dataset out = ds;
  for (double& v : out.y) {
    seen = seen || (v == target);
    v = (v == target) ? 1.0 : -1.0;
  }
  if (!seen) throw std::invalid_argument("relabel_one_vs_all: target label not present");
  out.kind = DatasetKind::Binary;
  return out;
}

std::vector<objectives::LocalData> partition(const Dataset& ds, const PartitionSpec& spec) {
  if (spec.agents == 0) throw std::invalid_argument("partition: need at least one agent");
  if (ds.y.empty()) throw std::invalid_argument("partition: empty dataset");
  switch (spec.scheme) {
    case PartitionScheme::Iid:
      return partition_iid(ds, spec);
    case PartitionScheme::LabelSkew:
      return partition_label_skew(ds, spec);
    case PartitionScheme::TwoClass:
      return partition_two_class(ds, spec);
  }
  throw std::invalid_argument("partition: unknown scheme");
}

Dataset gen_synthetic(const std::string& kind, std::size_t n_samples, std::size_t dim,
                      double cond, double noise, std::uint64_t seed) {
  if (dim == 0 || n_samples == 0) throw std::invalid_argument("gen_synthetic: empty shape");
  if (noise < 0.0) throw std::invalid_argument("gen_synthetic: negative noise");
  rng::SplitMix64 gen(seed);

  if (kind == "clusters") {
    if (cond < 1.0) throw std::invalid_argument("gen_synthetic: cond must be >= 1");
    Dataset ds;
    ds.kind = DatasetKind::Multiclass;
    ds.x = DenseMatrix(dim, n_samples);
    ds.y.resize(n_samples);
    DenseMatrix means(dim, CLUSTER_CLASSES);
    for (double& e : means.entries) e = CLUSTER_SPREAD * gen.gaussian();
    // Per-coordinate noise scales fall log-spaced from 1 to 1/cond, so the
    // leading coordinates carry the overlap and the trailing ones stay tight.
    std::vector<double> scale(dim, 1.0);
    if (dim > 1)
      for (std::size_t i = 0; i < dim; ++i)
        scale[i] = std::pow(cond, -static_cast<double>(i) / static_cast<double>(dim - 1));
    for (std::size_t j = 0; j < n_samples; ++j) {
      std::size_t c = j % CLUSTER_CLASSES;
      ds.y[j] = static_cast<double>(c);
      for (std::size_t i = 0; i < dim; ++i)
        ds.x(i, j) = means(i, c) + noise * scale[i] * gen.gaussian();
    }
    return ds;
  }

  if (kind != "ls" && kind != "logistic")
    throw std::invalid_argument("gen_synthetic: unknown kind '" + kind + "'");
  if (cond < 1.0) throw std::invalid_argument("gen_synthetic: cond must be >= 1");
  if (n_samples < dim) throw std::invalid_argument("gen_synthetic: need n_samples >= dim");

  // Feature design X = U diag(s) sqrt(N) Q^T with orthogonal U (n x n) and
  // orthonormal-column Q (N x n), so (1/N) X X^T = U diag(s^2) U^T has the
  // requested spectrum exactly: log-spaced eigenvalues 1 down to 1/cond.
  auto orthonormalize = [](DenseMatrix& a) {
    for (std::size_t c = 0; c < a.cols; ++c) {
      for (std::size_t p = 0; p < c; ++p) {
        double d = 0.0;
        for (std::size_t r = 0; r < a.rows; ++r) d += a(r, p) * a(r, c);
        for (std::size_t r = 0; r < a.rows; ++r) a(r, c) -= d * a(r, p);
      }
      // Second pass restores orthogonality lost to rounding.
      for (std::size_t p = 0; p < c; ++p) {
        double d = 0.0;
        for (std::size_t r = 0; r < a.rows; ++r) d += a(r, p) * a(r, c);
        for (std::size_t r = 0; r < a.rows; ++r) a(r, c) -= d * a(r, p);
      }
      double nrm = 0.0;
      for (std::size_t r = 0; r < a.rows; ++r) nrm += a(r, c) * a(r, c);
      nrm = std::sqrt(nrm);
      if (nrm < 1e-12) throw std::runtime_error("gen_synthetic: degenerate random basis");
      for (std::size_t r = 0; r < a.rows; ++r) a(r, c) /= nrm;
    }
  };
  DenseMatrix u(dim, dim);
  for (double& e : u.entries) e = gen.gaussian();
  orthonormalize(u);
  DenseMatrix q(n_samples, dim);
  for (double& e : q.entries) e = gen.gaussian();
  orthonormalize(q);

  Vector s(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    double t = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
    s[i] = std::sqrt(std::pow(cond, -t));
  }
  double root_n = std::sqrt(static_cast<double>(n_samples));
  Dataset ds;
  ds.x = DenseMatrix(dim, n_samples);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < n_samples; ++j) {
      double v = 0.0;
      for (std::size_t r = 0; r < dim; ++r) v += u(i, r) * s[r] * q(j, r);
      ds.x(i, j) = root_n * v;
    }

  Vector planted(dim);
  for (double& e : planted) e = gen.gaussian();
  ds.y.resize(n_samples);
  if (kind == "ls") {
    ds.kind = DatasetKind::Regression;
    for (std::size_t j = 0; j < n_samples; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < dim; ++i) m += ds.x(i, j) * planted[i];
      ds.y[j] = m + noise * gen.gaussian();
    }
  } else {
    ds.kind = DatasetKind::Binary;
    if (noise >= 1.0) throw std::invalid_argument("gen_synthetic: logistic flip rate must be < 1");
    for (std::size_t j = 0; j < n_samples; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < dim; ++i) m += ds.x(i, j) * planted[i];
      double p = objectives::sigmoid(m);
      double lab = gen.uniform() < p ? 1.0 : -1.0;
      if (noise > 0.0 && gen.uniform() < noise) lab = -lab;
      ds.y[j] = lab;
    }
  }
  return ds;
}

}  // namespace fedshed::data
