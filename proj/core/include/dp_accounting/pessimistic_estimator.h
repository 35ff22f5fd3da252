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


// Pessimistic finite-support estimates of a hockey-stick curve.

#ifndef DP_ACCOUNTING_PESSIMISTIC_ESTIMATOR_H_
#define DP_ACCOUNTING_PESSIMISTIC_ESTIMATOR_H_

#include <span>

#include "absl/status/statusor.h"
#include "dp_accounting/discretization_grid.h"
#include "dp_accounting/finite_pld.h"
#include "dp_accounting/mechanism_curves.h"

namespace dp_accounting {

// An atom of an exactly known privacy loss distribution.
struct PldAtom {
  double epsilon;
  double mass;
};

// The least pair supported on `grid` that dominates `curve`: its curve
// interpolates h linearly between grid points and stays at h(alpha_{k-1})
// beyond the last finite point.
absl::StatusOr<DiscreteDominatingPair> PessimisticPair(
    const HockeyStickCurve& curve, const DiscretizationGrid& grid);

// Privacy Buckets pessimistic rounding: the mass of the true PLD on
// (epsilon_{i-1}, epsilon_i] is placed at epsilon_i. The curve overload
// recovers interval masses from h(alpha) - alpha h'_+(alpha) = PLD(L >
// log alpha).
absl::StatusOr<FinitePld> PbPessimisticPld(const HockeyStickCurve& curve,
                                           const DiscretizationGrid& grid);
absl::StatusOr<FinitePld> PbPessimisticPld(std::span<const PldAtom> atoms,
                                           const DiscretizationGrid& grid);

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_PESSIMISTIC_ESTIMATOR_H_
