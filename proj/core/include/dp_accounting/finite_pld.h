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

// Finitely supported privacy loss distributions and the discrete dominating
// pairs that generate them.

#ifndef DP_ACCOUNTING_FINITE_PLD_H_
#define DP_ACCOUNTING_FINITE_PLD_H_

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dp_accounting/discretization_grid.h"
#include "dp_accounting/mechanism_curves.h"

namespace dp_accounting {

// Total mass of a FinitePld must be within this distance of 1.
inline constexpr double kTotalMassTolerance = 1e-9;

// Bisection tolerance of EpsilonForDelta.
inline constexpr double kEpsilonTolerance = 1e-9;

// Probability masses on the epsilon-points of a grid, index-aligned with
// grid.epsilons(). Index 0 is -inf and index k is +inf.
//
// A distribution coming out of a dominating pair has no mass at -inf; only
// optimistic truncation and the optimistic Privacy Buckets baseline place
// mass there, and such mass never contributes to delta.
class FinitePld {
 public:
  // Masses in [-kValidityTolerance, 0) are clamped to zero.
  static absl::StatusOr<FinitePld> Create(DiscretizationGrid grid,
                                          std::vector<double> masses);

  // Builds a distribution on a uniform lattice from its finite masses
  // (finite_masses[0] sits at epsilon = lattice.lowest_index * interval).
  static absl::StatusOr<FinitePld> CreateOnLattice(
      Lattice lattice, std::vector<double> finite_masses,
      double mass_at_infinity, double mass_at_negative_infinity = 0.0);

  // The distribution of the empty composition.
  static FinitePld PointMassAtZero(double interval);

  const DiscretizationGrid& grid() const { return grid_; }
  std::span<const double> masses() const { return masses_; }
  std::span<const double> finite_masses() const {
    return std::span<const double>(masses_).subspan(1, masses_.size() - 2);
  }
  double mass_at_infinity() const { return masses_.back(); }
  double mass_at_negative_infinity() const { return masses_.front(); }
  bool is_valid_pld() const { return masses_.front() == 0.0; }
  double total_mass() const;

 private:
  FinitePld(DiscretizationGrid grid, std::vector<double> masses)
      : grid_(std::move(grid)), masses_(std::move(masses)) {}

  DiscretizationGrid grid_;
  std::vector<double> masses_;
};

// Distributions P, Q supported on the grid alphas with P(alpha) =
// alpha * Q(alpha) for every finite alpha and Q(+inf) = 0.
struct DiscreteDominatingPair {
  DiscretizationGrid grid;
  std::vector<double> p_masses;
  std::vector<double> q_masses;
  // Negative masses that exceeded floating-point round-off but stayed within
  // kValidityTolerance and were clamped to zero.
  int clamp_events = 0;
};

// Builds the pair whose hockey-stick curve passes through (alpha_i, h_i) and
// is linear in between. `h_values` must be convex, non-increasing, start at
// 1, stay above [1 - alpha]_+ and satisfy h_{k-1} = h_k (the curve is
// constant past the last finite point).
absl::StatusOr<DiscreteDominatingPair> DiscretizeFromCurve(
    std::span<const double> h_values, const DiscretizationGrid& grid);

// Checks the structural properties of a pair: P(alpha) = alpha Q(alpha),
// Q(+inf) = 0, non-negative masses summing to one.
absl::Status ValidatePair(const DiscreteDominatingPair& pair);

// masses(epsilon_i) = P(alpha_i).
absl::StatusOr<FinitePld> PldOf(const DiscreteDominatingPair& pair);

// delta(epsilon) = sum over epsilon' of [1 - e^{epsilon - epsilon'}]_+ m'.
// epsilon may be +-inf.
double DeltaAt(const FinitePld& pld, double epsilon);

// Smallest epsilon (up to kEpsilonTolerance, rounded towards the safe side)
// with DeltaAt(pld, epsilon) <= delta. Returns +inf when the mass at +inf
// already exceeds delta and -inf when every epsilon qualifies.
absl::StatusOr<double> EpsilonForDelta(const FinitePld& pld, double delta);

// The piecewise-linear hockey-stick curve of a finitely supported pair.
class PiecewiseLinearCurve final : public HockeyStickCurve {
 public:
  // `values[i]` is h(alpha_i) for i = 0..k-1 and `value_at_infinity` is
  // h(+inf). The curve is linear between grid points and constant after
  // alpha_{k-1}.
  PiecewiseLinearCurve(std::vector<double> alphas, std::vector<double> values,
                       double value_at_infinity);

  double Evaluate(double alpha) const override;
  double RightDerivative(double alpha) const override;
  double LeftDerivative(double alpha) const override;
  double ValueAtInfinity() const override { return value_at_infinity_; }

  std::span<const double> grid_values() const { return values_; }

 private:
  double Slope(size_t segment) const;

  std::vector<double> alphas_;
  std::vector<double> values_;
  double value_at_infinity_;
};

// The hockey-stick curve of `pair`, with grid values D_{alpha_i}(P || Q).
std::unique_ptr<PiecewiseLinearCurve> CurveOf(
    const DiscreteDominatingPair& pair);

// JSON of the form
//   {"discretization": d, "epsilon_offset": i0, "masses": [...],
//    "mass_at_infinity": m}
// where masses[i0] is the mass at epsilon = 0. A non-zero mass at -inf is
// written as "mass_at_negative_infinity". Requires a uniform lattice.
absl::StatusOr<std::string> FinitePldToJson(const FinitePld& pld);
absl::StatusOr<FinitePld> FinitePldFromJson(std::string_view json);

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_FINITE_PLD_H_
