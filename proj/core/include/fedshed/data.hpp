#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fedshed/numkernel.hpp"
#include "fedshed/objectives.hpp"

namespace fedshed::data {

using numkernel::DenseMatrix;
using numkernel::Vector;

enum class DatasetKind { Regression, Binary, Multiclass };

/* Samples are the columns of x; y holds one label per column.
 * Binary datasets keep labels in {-1, +1}. */
struct Dataset {
  DenseMatrix x;
  Vector y;
  DatasetKind kind = DatasetKind::Regression;
};

enum class PartitionScheme { Iid, LabelSkew, TwoClass };

struct PartitionSpec {
  PartitionScheme scheme = PartitionScheme::Iid;
  std::size_t agents = 1;
  std::uint64_t seed = 0;
  /* One-vs-all target class.  Required for TwoClass.  When set for Iid,
   * shards are drawn from a balanced pool (all target samples plus an
   * equal number of other-class samples, equally mixed) and relabeled. */
  std::optional<double> target;
  // Shard size clip for the unbalanced LabelSkew draw.
  std::size_t min_shard = 1;
  std::size_t max_shard = std::numeric_limits<std::size_t>::max();
};

/*
 * CSV loader: one sample per row, label at label_column (0-based), all
 * other columns features.  A first line whose first token is not numeric
 * is treated as a header.  Ragged rows and non-numeric cells are reported
 * with their line number.
 */
Dataset load_csv(const std::string& path, std::size_t label_column);

// Writer matching load_csv, 17 significant digits (lossless round-trip).
void write_csv(const Dataset& ds, const std::string& path, std::size_t label_column);

/*
 * LIBSVM-format loader: "label idx:val ..." with 1-based strictly
 * ascending indices, dense output of n_features rows.  Binary labels are
 * canonicalized to {-1,+1}; a 0 label maps to -1 with a logged warning.
 */
Dataset load_libsvm(const std::string& path, std::size_t n_features);

// Per-feature min-max rescale to [0,1]; regression labels too. Idempotent.
Dataset rescale_minmax(const Dataset& ds);

// Center, then project onto the top-k principal directions.
Dataset pca_project(const Dataset& ds, std::size_t k);

// target -> +1, every other label -> -1.
Dataset relabel_one_vs_all(const Dataset& ds, double target);

/*
 * Split a dataset into per-agent shards.  Shards are disjoint and
 * reproducible from the seed; plain Iid and LabelSkew use every sample,
 * one-vs-all compositions (Iid with target, TwoClass) are exhaustive over
 * the balanced pool they select.  Weights are N_i over the total placed.
 */
std::vector<objectives::LocalData> partition(const Dataset& ds, const PartitionSpec& spec);

/*
 * Synthetic generators.  kind:
 *   "ls"       regression with exact Hessian condition number `cond`
 *              (log-spaced spectrum) and Gaussian label noise `noise`;
 *   "logistic" planted-model binary labels on the same feature design,
 *              each label flipped with probability `noise`;
 *   "clusters" 5-class Gaussian mixture (labels 0..4), cluster spread
 *              fixed and intra-cluster deviation `noise`; `cond` sets the
 *              anisotropy of the within-cluster noise: per-coordinate
 *              scales fall log-spaced from 1 to 1/cond, so cond=1 is
 *              isotropic and larger values leave trailing coordinates
 *              nearly noise-free.
 */
Dataset gen_synthetic(const std::string& kind, std::size_t n_samples, std::size_t dim,
                      double cond, double noise, std::uint64_t seed);

}  // namespace fedshed::data
