// Copyright 2026 The phishevo Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phishevo/isolation_forest.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "phishevo/common.h"

namespace phishevo::textstats {

namespace {

constexpr double kEulerGamma = 0.5772156649;

std::uint64_t column_hash(std::span<const std::vector<double>> rows, std::size_t col) {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& r : rows) {
    const double v = r[col] == 0.0 ? 0.0 : r[col];  // fold -0.0
    h ^= std::bit_cast<std::uint64_t>(v);
    h *= 1099511628211ull;
  }
  return h;
}

struct Builder {
  std::span<const std::vector<double>> rows;
  const std::vector<std::size_t>& order;  // canonical feature order
  std::size_t height_limit;
  Rng& rng;
  IsoTree tree;

  int build(std::vector<std::size_t>& idx, std::size_t depth) {
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({});
    tree.nodes[id].size = idx.size();
    if (depth >= height_limit || idx.size() <= 1) return id;

    std::vector<std::size_t> candidates;
    std::vector<std::pair<double, double>> ranges;
    for (std::size_t f : order) {
      double lo = rows[idx[0]][f], hi = lo;
      for (std::size_t i : idx) {
        lo = std::min(lo, rows[i][f]);
        hi = std::max(hi, rows[i][f]);
      }
      if (lo < hi) {
        candidates.push_back(f);
        ranges.emplace_back(lo, hi);
      }
    }
    if (candidates.empty()) return id;
    const std::size_t pick = rng.uniform_index(candidates.size());
    const auto [lo, hi] = ranges[pick];
    double v = rng.uniform(lo, hi);
    while (v <= lo || v > hi) v = rng.uniform(lo, hi);

    const std::size_t f = candidates[pick];
    std::vector<std::size_t> left, right;
    for (std::size_t i : idx) (rows[i][f] < v ? left : right).push_back(i);
    tree.nodes[id].feature = static_cast<int>(f);
    tree.nodes[id].split = v;
    const int l = build(left, depth + 1);
    const int r = build(right, depth + 1);
    tree.nodes[id].left = l;
    tree.nodes[id].right = r;
    return id;
  }
};

nlohmann::ordered_json node_json(const IsoTree& t, int id) {
  const auto& n = t.nodes[id];
  nlohmann::ordered_json j;
  if (!n.is_leaf()) {
    j["feature"] = n.feature;
    j["split"] = n.split;
  }
  j["size"] = n.size;
  if (!n.is_leaf()) {
    j["left"] = node_json(t, n.left);
    j["right"] = node_json(t, n.right);
  }
  return j;
}

int node_from_json(const nlohmann::json& j, IsoTree& t) {
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.push_back({});
  t.nodes[id].size = j.at("size").get<std::size_t>();
  if (j.contains("feature")) {
    t.nodes[id].feature = j.at("feature").get<int>();
    t.nodes[id].split = j.at("split").get<double>();
    const int l = node_from_json(j.at("left"), t);
    const int r = node_from_json(j.at("right"), t);
    t.nodes[id].left = l;
    t.nodes[id].right = r;
  }
  return id;
}

}  // namespace

double average_path_length(double m) {
  if (m <= 1.0) return 0.0;
  return 2.0 * (std::log(m - 1.0) + kEulerGamma) - 2.0 * (m - 1.0) / m;
}

IsolationForest IsolationForest::fit(std::span<const std::vector<double>> rows,
                                     const IsoForestConfig& config) {
  if (rows.size() < 2) throw ConfigError("isolation forest needs at least 2 rows");
  if (config.trees == 0) throw ConfigError("isolation forest needs at least 1 tree");
  if (config.psi < 2) throw ConfigError("isolation forest subsample size must be >= 2");
  IsolationForest forest;
  forest.dims_ = rows[0].size();
  for (const auto& r : rows) {
    if (r.size() != forest.dims_) throw ConfigError("isolation forest rows differ in dimension");
  }
  forest.psi_ = config.psi;
  if (forest.psi_ > rows.size()) {
    forest.warnings_.push_back("subsample size " + std::to_string(config.psi) +
                               " exceeds row count; clipped to " + std::to_string(rows.size()));
    forest.psi_ = rows.size();
  }
  forest.height_limit_ =
      static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(forest.psi_))));
  forest.threshold_ = config.threshold;

  // Features are visited in an order defined by their column contents, so
  // permuting columns consistently leaves every tree unchanged.
  std::vector<std::uint64_t> hashes(forest.dims_);
  for (std::size_t f = 0; f < forest.dims_; ++f) hashes[f] = column_hash(rows, f);
  std::vector<std::size_t> order(forest.dims_);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return hashes[a] < hashes[b]; });

  for (std::size_t t = 0; t < config.trees; ++t) {
    Rng rng(derive_seed(config.seed, t));
    std::vector<std::size_t> all(rows.size());
    std::iota(all.begin(), all.end(), 0);
    for (std::size_t i = 0; i < forest.psi_; ++i) {
      std::swap(all[i], all[i + rng.uniform_index(all.size() - i)]);
    }
    std::vector<std::size_t> sample(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(forest.psi_));
    Builder b{rows, order, forest.height_limit_, rng, {}};
    b.build(sample, 0);
    forest.trees_.push_back(std::move(b.tree));
  }
  return forest;
}

double IsolationForest::path_length(std::span<const double> row, const IsoTree& tree) const {
  int id = 0;
  double depth = 0.0;
  while (!tree.nodes[id].is_leaf()) {
    const auto& n = tree.nodes[id];
    id = row[static_cast<std::size_t>(n.feature)] < n.split ? n.left : n.right;
    depth += 1.0;
  }
  return depth + average_path_length(static_cast<double>(tree.nodes[id].size));
}

double IsolationForest::mean_path_length(std::span<const double> row) const {
  if (row.size() != dims_) {
    throw ConfigError("isolation forest expects " + std::to_string(dims_) + " features, got " +
                      std::to_string(row.size()));
  }
  double sum = 0.0;
  for (const auto& t : trees_) sum += path_length(row, t);
  return sum / static_cast<double>(trees_.size());
}

IsoScore IsolationForest::score(std::span<const double> row) const {
  IsoScore s;
  s.score = std::exp2(-mean_path_length(row) / average_path_length(static_cast<double>(psi_)));
  s.signed_score = 0.5 - s.score;
  s.anomaly = s.score > threshold_;
  return s;
}

nlohmann::ordered_json IsolationForest::to_json() const {
  nlohmann::ordered_json j;
  j["psi"] = psi_;
  j["dims"] = dims_;
  j["height_limit"] = height_limit_;
  j["threshold"] = threshold_;
  auto trees = nlohmann::ordered_json::array();
  for (const auto& t : trees_) trees.push_back(node_json(t, 0));
  j["trees"] = trees;
  return j;
}

IsolationForest IsolationForest::from_json(const nlohmann::json& j) {
  IsolationForest f;
  f.psi_ = j.at("psi").get<std::size_t>();
  f.dims_ = j.at("dims").get<std::size_t>();
  f.height_limit_ = j.at("height_limit").get<std::size_t>();
  f.threshold_ = j.at("threshold").get<double>();
  for (const auto& t : j.at("trees")) {
    IsoTree tree;
    node_from_json(t, tree);
    f.trees_.push_back(std::move(tree));
  }
  return f;
}

}  // namespace phishevo::textstats
