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

#ifndef PHISHEVO_MANN_WHITNEY_H_
#define PHISHEVO_MANN_WHITNEY_H_

#include <span>
#include <vector>

namespace phishevo::textstats {

struct MannWhitneyResult {
  double u = 0.0;    // min(u_a, u_b)
  double u_a = 0.0;  // R_A - n_A(n_A+1)/2 with midranks
  double u_b = 0.0;
  double z = 0.0;
  double p = 1.0;  // two-sided, in (0, 1]
};

// Two-sided test with the tie-corrected normal approximation and a 0.5
// continuity correction.
MannWhitneyResult mann_whitney(std::span<const double> a, std::span<const double> b);

// Midranks (1-based) of `values` in their pooled order.
std::vector<double> midranks(std::span<const double> values);

}  // namespace phishevo::textstats

#endif  // PHISHEVO_MANN_WHITNEY_H_
