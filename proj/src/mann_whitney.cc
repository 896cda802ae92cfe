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

#include "phishevo/mann_whitney.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "phishevo/common.h"

namespace phishevo::textstats {

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw ConfigError("mann_whitney needs two non-empty samples");
  for (double v : a) if (!std::isfinite(v)) throw NumericError("mann_whitney: non-finite value");
  for (double v : b) if (!std::isfinite(v)) throw NumericError("mann_whitney: non-finite value");
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  const auto ranks = midranks(pooled);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double n = na + nb;
  const double ra = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);

  MannWhitneyResult res;
  res.u_a = ra - na * (na + 1.0) / 2.0;
  res.u_b = na * nb - res.u_a;
  res.u = std::min(res.u_a, res.u_b);

  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double variance = na * nb / 12.0 * ((n + 1.0) - tie_term / (n * (n - 1.0)));
  if (!(variance > 0.0)) {
    res.u = res.u_a = res.u_b = na * nb / 2.0;
    return res;
  }
  const double mu = na * nb / 2.0;
  res.z = std::max(0.0, std::abs(res.u_a - mu) - 0.5) / std::sqrt(variance);
  res.p = std::clamp(std::erfc(res.z / std::sqrt(2.0)), std::numeric_limits<double>::min(), 1.0);
  return res;
}

}  // namespace phishevo::textstats
