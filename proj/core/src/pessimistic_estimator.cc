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


#include "dp_accounting/pessimistic_estimator.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dp_accounting/common.h"

namespace dp_accounting {
namespace {

// PLD(L > log alpha) for the privacy loss L of the curve's pair.
double UpperTailAbove(const HockeyStickCurve& curve, double alpha) {
  if (alpha == 0) return 1.0;
  return curve.Evaluate(alpha) - alpha * curve.RightDerivative(alpha);
}

}  // namespace

absl::StatusOr<DiscreteDominatingPair> PessimisticPair(
    const HockeyStickCurve& curve, const DiscretizationGrid& grid) {
  const size_t k = grid.size() - 1;
  std::vector<double> h(k + 1);
  for (size_t i = 0; i < k; ++i) h[i] = curve.Evaluate(grid.alpha(i));
  h[k] = std::max(curve.ValueAtInfinity(), h[k - 1]);
  return DiscretizeFromCurve(h, grid);
}

absl::StatusOr<FinitePld> PbPessimisticPld(const HockeyStickCurve& curve,
                                           const DiscretizationGrid& grid) {
  const size_t k = grid.size() - 1;
  std::vector<double> masses(k + 1, 0.0);
  double previous = 1.0;
  for (size_t i = 1; i < k; ++i) {
    const double tail = UpperTailAbove(curve, grid.alpha(i));
    masses[i] = std::max(0.0, previous - tail);
    previous = tail;
  }
  masses[k] = std::max(0.0, previous);
  return FinitePld::Create(grid, std::move(masses));
}

absl::StatusOr<FinitePld> PbPessimisticPld(std::span<const PldAtom> atoms,
                                           const DiscretizationGrid& grid) {
  std::vector<double> masses(grid.size(), 0.0);
  std::span<const double> epsilons = grid.epsilons();
  for (const PldAtom& atom : atoms) {
    if (std::isnan(atom.epsilon) || !(atom.mass >= 0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "invalid privacy loss atom (%g, %g).", atom.epsilon, atom.mass));
    }
    // Smallest grid point at or above the atom.
    const size_t i =
        std::lower_bound(epsilons.begin(), epsilons.end(), atom.epsilon) -
        epsilons.begin();
    masses[i] += atom.mass;
  }
  return FinitePld::Create(grid, std::move(masses));
}

}  // namespace dp_accounting
