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

// Isolation forest over dense feature rows.

#ifndef PHISHEVO_ISOLATION_FOREST_H_
#define PHISHEVO_ISOLATION_FOREST_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace phishevo::textstats {

// Expected path length of an unsuccessful BST search over m points:
// 2*H(m-1) - 2(m-1)/m with H(i) = ln(i) + Euler's constant, and 0 for m <= 1.
double average_path_length(double m);

struct IsoNode {
  int feature = -1;  // -1 marks a leaf
  double split = 0.0;
  std::size_t size = 0;  // training points that reached this node
  int left = -1;         // x[feature] < split
  int right = -1;

  bool is_leaf() const { return feature < 0; }
};

struct IsoTree {
  std::vector<IsoNode> nodes;  // nodes[0] is the root
};

struct IsoScore {
  double score = 0.0;         // 2^(-E[h]/c(psi)), in (0, 1]
  double signed_score = 0.0;  // 0.5 - score; negative means anomalous-leaning
  bool anomaly = false;       // score > threshold
};

struct IsoForestConfig {
  std::size_t trees = 100;
  std::size_t psi = 256;
  std::uint64_t seed = 0;
  double threshold = 0.6;
};

class IsolationForest {
 public:
  static IsolationForest fit(std::span<const std::vector<double>> rows,
                             const IsoForestConfig& config);

  double path_length(std::span<const double> row, const IsoTree& tree) const;
  double mean_path_length(std::span<const double> row) const;
  IsoScore score(std::span<const double> row) const;

  const std::vector<IsoTree>& trees() const { return trees_; }
  std::size_t psi() const { return psi_; }
  std::size_t dims() const { return dims_; }
  std::size_t height_limit() const { return height_limit_; }
  double threshold() const { return threshold_; }
  void set_threshold(double t) { threshold_ = t; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  // Trees as nested objects: {"feature", "split", "size", "left", "right"}
  // for internal nodes, {"size"} for leaves.
  nlohmann::ordered_json to_json() const;
  static IsolationForest from_json(const nlohmann::json& j);

 private:
  std::vector<IsoTree> trees_;
  std::size_t psi_ = 0;
  std::size_t dims_ = 0;
  std::size_t height_limit_ = 0;
  double threshold_ = 0.6;
  std::vector<std::string> warnings_;
};

}  // namespace phishevo::textstats

#endif  // PHISHEVO_ISOLATION_FOREST_H_
