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


// End-to-end accounting: mechanism curve, grid-supported estimates,
// self-composition and (epsilon, delta) queries.

#ifndef DP_ACCOUNTING_ACCOUNTANT_H_
#define DP_ACCOUNTING_ACCOUNTANT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dp_accounting/composition.h"
#include "dp_accounting/discretization_grid.h"
#include "dp_accounting/mechanism_curves.h"

namespace dp_accounting {

enum class EstimateSelection {
  kPessimistic,
  kOptimistic,
  kBoth,
};

// The automatic grid extends until the curve (upper end) or the lower-tail
// bound alpha (1 + h'_+(alpha)) (lower end) drops below this.
inline constexpr double kGridTailThreshold = 1e-20;

struct GridOptions {
  double discretization = 1e-3;
  // Interior epsilons are covered by [floor(min / d), ceil(max / d)] * d.
  std::optional<std::pair<double, double>> epsilon_range;
  int64_t max_points = 4'000'000;
};

// The uniform grid used for `curve`: it always contains epsilon = 0.
absl::StatusOr<DiscretizationGrid> BuildGrid(const HockeyStickCurve& curve,
                                             const GridOptions& options);

struct AccountingRequest {
  MechanismSpec mechanism;
  int64_t compositions = 1;
  // Exactly one of these is set.
  std::optional<double> delta_target;
  std::optional<double> epsilon_target;
  GridOptions grid;
  EstimateSelection estimate = EstimateSelection::kBoth;
  bool privacy_buckets_baseline = false;
  ConvolutionMethod convolution = ConvolutionMethod::kAuto;
  double truncation_tail_mass = 1e-15;
  size_t max_support = size_t{1} << 24;
  int num_threads = 1;

  absl::Status Validate() const;
};

// One bound of a report.
struct BoundEstimate {
  EstimateType type;
  // "connect_the_dots", "greedy_convex_hull", "privacy_buckets".
  std::string method;
  // epsilon for delta queries (clamped at 0, possibly +inf), delta for
  // epsilon queries.
  double value;
  // Finite lattice points of the composed distribution.
  int64_t support_size;
  TruncationStats truncation;
  int clamp_events = 0;
};

struct GridSummary {
  double discretization = 0;
  int64_t lowest_index = 0;
  int64_t highest_index = 0;
  int64_t num_points = 0;
};

struct PrivacyBoundReport {
  AccountingRequest request;
  GridSummary grid;
  std::optional<BoundEstimate> pessimistic;
  std::optional<BoundEstimate> optimistic;
  std::optional<BoundEstimate> pb_pessimistic;
  std::optional<BoundEstimate> pb_optimistic;
  double duration_ms = 0;

  // Lower and upper end of the reported interval; NaN if the corresponding
  // estimate was not requested.
  double low() const;
  double high() const;
};

absl::StatusOr<PrivacyBoundReport> ComputeBounds(
    const AccountingRequest& request);

struct SweepOptions {
  // Each row is recomputed this many times; runtime quantiles are reported.
  int repeats = 1;
  // Rows may be computed concurrently. Row order follows the input.
  int num_threads = 1;
};

struct SweepRow {
  PrivacyBoundReport report;
  double runtime_ms_p25;
  double runtime_ms_median;
  double runtime_ms_p75;
};

// One report per composition count; counts must be ascending.
absl::StatusOr<std::vector<SweepRow>> Sweep(
    const AccountingRequest& base, const std::vector<int64_t>& compositions,
    const SweepOptions& options = {});

struct CurveRow {
  double alpha;
  double h_true;
  double h_pessimistic;
  // NaN when the curve does not admit an optimistic estimate.
  double h_optimistic;
  double h_pb_pessimistic;
};

// Single-step curves on the request's grid, sampled at alpha = 0, at every
// finite grid point, at the midpoints between neighbours and at twice the
// last finite grid point.
absl::StatusOr<std::vector<CurveRow>> CurveTable(
    const AccountingRequest& request);

// Parameter sets of the standard benchmark experiments.
struct Preset {
  std::string name;
  AccountingRequest request;
  std::vector<int64_t> compositions;
};
std::vector<Preset> Presets();
absl::StatusOr<Preset> FindPreset(const std::string& name);

std::string EstimateSelectionName(EstimateSelection selection);

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_ACCOUNTANT_H_
