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


#include "dp_accounting/accountant.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dp_accounting/finite_pld.h"
#include "dp_accounting/optimistic_estimator.h"
#include "dp_accounting/pessimistic_estimator.h"

namespace dp_accounting {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// exp() of anything beyond these is 0 or +inf in double precision.
constexpr double kLargestExponent = 709.0;
constexpr double kSmallestExponent = -745.0;

bool WantsPessimistic(EstimateSelection s) {
  return s != EstimateSelection::kOptimistic;
}
bool WantsOptimistic(EstimateSelection s) {
  return s != EstimateSelection::kPessimistic;
}

// Smallest m >= 1 with done(m), or an error once m exceeds `limit`.
absl::StatusOr<int64_t> FirstTrue(const std::function<bool(int64_t)>& done,
                                  int64_t limit) {
  int64_t hi = 1;
  while (!done(hi)) {
    if (hi > limit) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "the automatic grid would need more than %d points; pass an "
          "explicit epsilon range or a coarser discretization.",
          limit));
    }
    hi *= 2;
  }
  int64_t lo = hi / 2;  // done(lo) is false unless lo == 0.
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    if (done(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double Quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double position = q * static_cast<double>(values.size() - 1);
  const size_t below = static_cast<size_t>(std::floor(position));
  const size_t above = std::min(values.size() - 1, below + 1);
  const double t = position - static_cast<double>(below);
  return (1 - t) * values[below] + t * values[above];
}

class Pipeline {
 public:
  Pipeline(const AccountingRequest& request, const HockeyStickCurve& curve,
           const DiscretizationGrid& grid)
      : request_(request), curve_(curve), grid_(grid) {}

  absl::StatusOr<BoundEstimate> Run(EstimateType type, bool privacy_buckets) {
    int clamp_events = 0;
    absl::StatusOr<FinitePld> pld = SingleStep(type, privacy_buckets,
                                               clamp_events);
    if (!pld.ok()) return pld.status();
    CompositionPolicy policy{.direction = type,
                             .method = request_.convolution,
                             .truncation_tail_mass =
                                 request_.truncation_tail_mass,
                             .max_support = request_.max_support};
    absl::StatusOr<CompositionResult> composed =
        SelfCompose(*pld, request_.compositions, policy);
    if (!composed.ok()) return composed.status();
    BoundEstimate estimate{
        .type = type,
        .method = privacy_buckets                  ? "privacy_buckets"
                  : type == EstimateType::kPessimistic ? "connect_the_dots"
                                                       : "greedy_convex_hull",
        .value = 0,
        .support_size =
            static_cast<int64_t>(composed->pld.finite_masses().size()),
        .truncation = composed->truncation,
        .clamp_events = clamp_events};
    if (request_.delta_target.has_value()) {
      absl::StatusOr<double> epsilon =
          EpsilonForDelta(composed->pld, *request_.delta_target);
      if (!epsilon.ok()) return epsilon.status();
      estimate.value = std::max(0.0, *epsilon);
    } else {
      estimate.value = DeltaAt(composed->pld, *request_.epsilon_target);
    }
    return estimate;
  }

 private:
  absl::StatusOr<FinitePld> SingleStep(EstimateType type, bool privacy_buckets,
                                       int& clamp_events) {
    if (privacy_buckets) {
      return type == EstimateType::kPessimistic
                 ? PbPessimisticPld(curve_, grid_)
                 : PbOptimisticPld(curve_, grid_);
    }
    absl::StatusOr<DiscreteDominatingPair> pair =
        type == EstimateType::kPessimistic
            ? PessimisticPair(curve_, grid_)
            : OptimisticPair(curve_, grid_,
                             {.num_threads = request_.num_threads});
    if (!pair.ok()) return pair.status();
    clamp_events = pair->clamp_events;
    return PldOf(*pair);
  }

  const AccountingRequest& request_;
  const HockeyStickCurve& curve_;
  const DiscretizationGrid& grid_;
};

AccountingRequest WithDefaults(MechanismSpec mechanism, double discretization,
                               bool privacy_buckets) {
  AccountingRequest request;
  request.mechanism = std::move(mechanism);
  request.delta_target = 1e-5;
  request.grid.discretization = discretization;
  request.estimate = EstimateSelection::kBoth;
  request.privacy_buckets_baseline = privacy_buckets;
  return request;
}

std::vector<int64_t> HundredToThousand() {
  std::vector<int64_t> counts;
  for (int64_t n = 100; n <= 1000; n += 100) counts.push_back(n);
  return counts;
}

}  // namespace

absl::StatusOr<DiscretizationGrid> BuildGrid(const HockeyStickCurve& curve,
                                             const GridOptions& options) {
  const double d = options.discretization;
  if (!(d > 0) || !std::isfinite(d)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "discretization interval should be positive, got %g.", d));
  }
  if (options.epsilon_range.has_value()) {
    const auto [low, high] = *options.epsilon_range;
    if (!(low < 0) || !(high > 0) || !std::isfinite(low) ||
        !std::isfinite(high)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "epsilon range [%g, %g] must satisfy min < 0 < max.", low, high));
    }
    const double lowest = std::floor(low / d);
    const double highest = std::ceil(high / d);
    if (highest - lowest + 1 > static_cast<double>(options.max_points)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "epsilon range [%g, %g] at interval %g needs more than %d points.",
          low, high, d, options.max_points));
    }
    return DiscretizationGrid::Uniform(d, static_cast<int64_t>(lowest),
                                       static_cast<int64_t>(highest));
  }
  auto upper_done = [&](int64_t j) {
    const double epsilon = static_cast<double>(j) * d;
    if (epsilon > kLargestExponent) return true;
    return curve.Evaluate(std::exp(epsilon)) < kGridTailThreshold;
  };
  auto lower_done = [&](int64_t m) {
    const double epsilon = -static_cast<double>(m) * d;
    if (epsilon < kSmallestExponent) return true;
    const double alpha = std::exp(epsilon);
    return alpha == 0 ||
           alpha * (1 + curve.RightDerivative(alpha)) < kGridTailThreshold;
  };
  int64_t highest = 0;
  if (!upper_done(0)) {
    absl::StatusOr<int64_t> j = FirstTrue(upper_done, options.max_points);
    if (!j.ok()) return j.status();
    highest = *j;
  }
  absl::StatusOr<int64_t> m = FirstTrue(lower_done, options.max_points);
  if (!m.ok()) return m.status();
  const int64_t lowest = -*m;
  if (highest - lowest + 1 > options.max_points) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "the automatic grid would need %d points, more than %d.",
        highest - lowest + 1, options.max_points));
  }
  return DiscretizationGrid::Uniform(d, lowest, highest);
}

absl::Status AccountingRequest::Validate() const {
  if (absl::Status status = mechanism.Validate(); !status.ok()) return status;
  if (compositions < 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "number of compositions must be >= 0, got %d.", compositions));
  }
  if (delta_target.has_value() == epsilon_target.has_value()) {
    return absl::InvalidArgumentError(
        "exactly one of the delta and epsilon targets must be set.");
  }
  if (delta_target.has_value() && (!(*delta_target > 0) || *delta_target > 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1], got %g.", *delta_target));
  }
  if (epsilon_target.has_value() && std::isnan(*epsilon_target)) {
    return absl::InvalidArgumentError("epsilon target is NaN.");
  }
  if (!(grid.discretization > 0) || !std::isfinite(grid.discretization)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "discretization interval should be positive, got %g.",
        grid.discretization));
  }
  if (!(truncation_tail_mass >= 0) ||
      truncation_tail_mass > kMaxTruncationTailMass) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "truncation tail mass must lie in [0, %g], got %g.",
        kMaxTruncationTailMass, truncation_tail_mass));
  }
  if (WantsOptimistic(estimate) && compositions > 1 &&
      mechanism.kind == MechanismKind::kPoissonSubsampled &&
      mechanism.adjacency_direction == AdjacencyDirection::kBoth) {
    return absl::InvalidArgumentError(
        "optimistic estimates are not available for adjacency 'both' with "
        "more than one composition: the maximum of the add and remove "
        "curves is not tight under composition, so its composition is not "
        "a lower bound.");
  }
  return absl::OkStatus();
}

double PrivacyBoundReport::low() const {
  return optimistic.has_value() ? optimistic->value : kNaN;
}

double PrivacyBoundReport::high() const {
  return pessimistic.has_value() ? pessimistic->value : kNaN;
}

absl::StatusOr<PrivacyBoundReport> ComputeBounds(
    const AccountingRequest& request) {
  const auto start = std::chrono::steady_clock::now();
  if (absl::Status status = request.Validate(); !status.ok()) return status;
  absl::StatusOr<std::unique_ptr<HockeyStickCurve>> curve =
      CurveFor(request.mechanism);
  if (!curve.ok()) return curve.status();
  absl::StatusOr<DiscretizationGrid> grid = BuildGrid(**curve, request.grid);
  if (!grid.ok()) return grid.status();

  const Lattice& lattice = *grid->lattice();
  PrivacyBoundReport report;
  report.request = request;
  report.grid = {.discretization = lattice.interval,
                 .lowest_index = lattice.lowest_index,
                 .highest_index = lattice.lowest_index +
                                  static_cast<int64_t>(grid->size()) - 3,
                 .num_points = static_cast<int64_t>(grid->size())};
  Pipeline pipeline(request, **curve, *grid);
  auto run = [&](EstimateType type, bool privacy_buckets,
                 std::optional<BoundEstimate>& slot) -> absl::Status {
    absl::StatusOr<BoundEstimate> estimate =
        pipeline.Run(type, privacy_buckets);
    if (!estimate.ok()) return estimate.status();
    slot = *std::move(estimate);
    return absl::OkStatus();
  };
  if (WantsPessimistic(request.estimate)) {
    if (absl::Status s = run(EstimateType::kPessimistic, false,
                             report.pessimistic);
        !s.ok()) {
      return s;
    }
    if (request.privacy_buckets_baseline) {
      if (absl::Status s = run(EstimateType::kPessimistic, true,
                               report.pb_pessimistic);
          !s.ok()) {
        return s;
      }
    }
  }
  if (WantsOptimistic(request.estimate)) {
    if (absl::Status s = run(EstimateType::kOptimistic, false,
                             report.optimistic);
        !s.ok()) {
      return s;
    }
    if (request.privacy_buckets_baseline) {
      if (absl::Status s = run(EstimateType::kOptimistic, true,
                               report.pb_optimistic);
          !s.ok()) {
        return s;
      }
    }
  }
  report.duration_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
  return report;
}

absl::StatusOr<std::vector<SweepRow>> Sweep(
    const AccountingRequest& base, const std::vector<int64_t>& compositions,
    const SweepOptions& options) {
  if (compositions.empty()) {
    return absl::InvalidArgumentError("a sweep needs at least one count.");
  }
  for (size_t i = 1; i < compositions.size(); ++i) {
    if (compositions[i] <= compositions[i - 1]) {
      return absl::InvalidArgumentError(
          "sweep composition counts must be strictly ascending.");
    }
  }
  if (options.repeats < 1) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "repeat count must be at least 1, got %d.", options.repeats));
  }
  std::vector<std::optional<SweepRow>> rows(compositions.size());
  std::vector<absl::Status> statuses(compositions.size());
  auto compute_row = [&](size_t i) {
    AccountingRequest request = base;
    request.compositions = compositions[i];
    std::vector<double> runtimes;
    std::optional<PrivacyBoundReport> first;
    for (int r = 0; r < options.repeats; ++r) {
      absl::StatusOr<PrivacyBoundReport> report = ComputeBounds(request);
      if (!report.ok()) {
        statuses[i] = report.status();
        return;
      }
      runtimes.push_back(report->duration_ms);
      if (!first.has_value()) first = *std::move(report);
    }
    rows[i] = SweepRow{.report = *std::move(first),
                       .runtime_ms_p25 = Quantile(runtimes, 0.25),
                       .runtime_ms_median = Quantile(runtimes, 0.5),
                       .runtime_ms_p75 = Quantile(runtimes, 0.75)};
  };
  const size_t threads = std::clamp<size_t>(
      static_cast<size_t>(std::max(options.num_threads, 1)), 1,
      compositions.size());
  if (threads == 1) {
    for (size_t i = 0; i < compositions.size(); ++i) compute_row(i);
  } else {
    std::vector<std::jthread> workers;
    for (size_t t = 0; t < threads; ++t) {
      workers.emplace_back([&, t] {
        for (size_t i = t; i < compositions.size(); i += threads) {
          compute_row(i);
        }
      });
    }
  }
  std::vector<SweepRow> out;
  for (size_t i = 0; i < compositions.size(); ++i) {
    if (!statuses[i].ok()) return statuses[i];
    out.push_back(*std::move(rows[i]));
  }
  return out;
}

absl::StatusOr<std::vector<CurveRow>> CurveTable(
    const AccountingRequest& request) {
  if (absl::Status status = request.mechanism.Validate(); !status.ok()) {
    return status;
  }
  absl::StatusOr<std::unique_ptr<HockeyStickCurve>> curve =
      CurveFor(request.mechanism);
  if (!curve.ok()) return curve.status();
  absl::StatusOr<DiscretizationGrid> grid = BuildGrid(**curve, request.grid);
  if (!grid.ok()) return grid.status();

  absl::StatusOr<DiscreteDominatingPair> pessimistic =
      PessimisticPair(**curve, *grid);
  if (!pessimistic.ok()) return pessimistic.status();
  const std::unique_ptr<PiecewiseLinearCurve> h_pessimistic =
      CurveOf(*pessimistic);
  std::unique_ptr<PiecewiseLinearCurve> h_optimistic;
  if ((*curve)->ValueAtInfinity() == 0) {
    absl::StatusOr<DiscreteDominatingPair> optimistic =
        OptimisticPair(**curve, *grid, {.num_threads = request.num_threads});
    if (!optimistic.ok()) return optimistic.status();
    h_optimistic = CurveOf(*optimistic);
  }
  absl::StatusOr<FinitePld> pb = PbPessimisticPld(**curve, *grid);
  if (!pb.ok()) return pb.status();

  std::vector<double> alphas;
  const size_t last = grid->last_finite_index();
  for (size_t i = 0; i <= last; ++i) {
    alphas.push_back(grid->alpha(i));
    if (i < last) alphas.push_back(0.5 * (grid->alpha(i) + grid->alpha(i + 1)));
  }
  alphas.push_back(2 * grid->alpha(last));

  std::vector<CurveRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    rows.push_back(CurveRow{
        .alpha = alpha,
        .h_true = (*curve)->Evaluate(alpha),
        .h_pessimistic = h_pessimistic->Evaluate(alpha),
        .h_optimistic =
            h_optimistic == nullptr ? kNaN : h_optimistic->Evaluate(alpha),
        .h_pb_pessimistic = DeltaAt(*pb, std::log(alpha))});
  }
  return rows;
}

std::vector<Preset> Presets() {
  std::vector<Preset> presets;
  presets.push_back({"gaussian",
                     WithDefaults(MechanismSpec::Gaussian(80), 0.005, false),
                     HundredToThousand()});
  presets.push_back(
      {"subsampled-gaussian",
       WithDefaults(MechanismSpec::PoissonSubsampled(
                        MechanismSpec::Gaussian(1), 0.01),
                    0.005, true),
       HundredToThousand()});
  // Descriptions of this benchmark disagree between noise scale 5 and 1.
  presets.push_back(
      {"subsampled-laplace",
       WithDefaults(MechanismSpec::PoissonSubsampled(
                        MechanismSpec::Laplace(5), 0.01),
                    0.0002, true),
       HundredToThousand()});
  for (Preset& preset : presets) {
    preset.request.compositions = preset.compositions.back();
  }
  return presets;
}

absl::StatusOr<Preset> FindPreset(const std::string& name) {
  for (Preset& preset : Presets()) {
    if (preset.name == name) return preset;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown preset '", name,
      "'; expected gaussian, subsampled-gaussian or subsampled-laplace."));
}

std::string EstimateSelectionName(EstimateSelection selection) {
  switch (selection) {
    case EstimateSelection::kPessimistic:
      return "pessimistic";
    case EstimateSelection::kOptimistic:
      return "optimistic";
    case EstimateSelection::kBoth:
      return "both";
  }
  return "unknown";
}

}  // namespace dp_accounting
