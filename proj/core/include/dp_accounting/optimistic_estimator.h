// Copyright 2026 The dp_accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Optimistic finite-support estimates: pairs supported on a grid whose
// hockey-stick curve lies below a given curve.

#ifndef DP_ACCOUNTING_OPTIMISTIC_ESTIMATOR_H_
#define DP_ACCOUNTING_OPTIMISTIC_ESTIMATOR_H_

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dp_accounting/discretization_grid.h"
#include "dp_accounting/finite_pld.h"
#include "dp_accounting/mechanism_curves.h"
#include "dp_accounting/pessimistic_estimator.h"

namespace dp_accounting {

// Tangent-line candidates. With i* the index of alpha = 1,
//   forward[i]  = h(alpha_{i-1}) + (alpha_i - alpha_{i-1}) h'_+(alpha_{i-1})
// for 0 < i <= i* (forward[0] = 1), and
//   backward[i - i*] = h(alpha_{i+1}) - (alpha_{i+1} - alpha_i)
//                      h'_-(alpha_{i+1})
// for i* <= i < k - 1 (the entry for k - 1 is 0).
struct CandidateSet {
  size_t index_of_one = 0;
  std::vector<double> forward;
  std::vector<double> backward;

  // The candidate used at grid index i < k; the smaller of the two at i*.
  double Value(size_t i) const;
};

struct OptimisticOptions {
  // Candidates are independent; values above 1 split them across threads.
  int num_threads = 1;
};

// Fails unless the grid contains alpha = 1 and h(+inf) = 0.
absl::StatusOr<CandidateSet> ComputeCandidates(
    const HockeyStickCurve& curve, const DiscretizationGrid& grid,
    const OptimisticOptions& options = {});

// Checks f_fwd(alpha_i) >= 1 - alpha_i, f_bwd(alpha_i) >= 0 and that every
// candidate is at most h(alpha_i), all up to kValidityTolerance.
absl::Status CheckCandidateBounds(const CandidateSet& candidates,
                                  const HockeyStickCurve& curve,
                                  const DiscretizationGrid& grid);

// Values at the grid points (including 0 at +inf) of the lower convex hull
// of the candidate points. Collinear points stay on the hull.
std::vector<double> LowerHullValues(const CandidateSet& candidates,
                                    const DiscretizationGrid& grid);

// A pair supported on `grid` that is dominated by `curve`.
absl::StatusOr<DiscreteDominatingPair> OptimisticPair(
    const HockeyStickCurve& curve, const DiscretizationGrid& grid,
    const OptimisticOptions& options = {});

// Privacy Buckets optimistic rounding: the mass of the true PLD on
// [epsilon_{i-1}, epsilon_i) is placed at epsilon_{i-1}. The result may put
// mass at -inf and then is not the PLD of any pair; it is only meant for
// evaluating delta.
absl::StatusOr<FinitePld> PbOptimisticPld(const HockeyStickCurve& curve,
                                          const DiscretizationGrid& grid);
absl::StatusOr<FinitePld> PbOptimisticPld(std::span<const PldAtom> atoms,
                                          const DiscretizationGrid& grid);

// Two grid-supported pairs, neither of which dominates the other, that are
// both dominated by the two-fold composition of randomized response with
// parameter epsilon / 2, and hence by randomized response with parameter
// epsilon. The grid is {0, e^-epsilon, alpha_1, alpha_2, e^epsilon, +inf}
// with alpha_{1,2} = 1 -+ gamma straddling the kink of the composed curve at
// alpha = 1. `first` follows the composed curve up to alpha_1 and continues
// along its left tangent; `second` follows the right tangent back from
// alpha_2. No grid-supported pair dominated by the composed curve can
// dominate both, since its chord across alpha = 1 would pass above the kink.
struct NonUniquenessFixture {
  double alpha1;
  double alpha2;
  DiscreteDominatingPair first;
  DiscreteDominatingPair second;
};

// Largest admissible gamma: both tangent extensions must stay above
// [1 - alpha]_+ and alpha_1 must exceed e^-epsilon.
double MaxNonUniquenessGamma(double epsilon);

// 0.1 * MaxNonUniquenessGamma(epsilon).
double DefaultNonUniquenessGamma(double epsilon);

absl::StatusOr<NonUniquenessFixture> MakeNonUniquenessFixture(
    double epsilon, std::optional<double> gamma = std::nullopt);

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_OPTIMISTIC_ESTIMATOR_H_
