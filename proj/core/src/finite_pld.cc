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


#include "dp_accounting/finite_pld.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dp_accounting/common.h"
#include "internal/compensated_sum.h"
#include "nlohmann/json.hpp"

namespace dp_accounting {
namespace {

constexpr double kMachineEpsilon = std::numeric_limits<double>::epsilon();

double Slope(double h_left, double h_right, double alpha_left,
             double alpha_right) {
  return (h_left - h_right) / (alpha_right - alpha_left);
}

// Upper bound on the floating-point error of Slope(). A hockey-stick value is
// computed as a difference P(L > ln a) - a Q(L > ln a), so its absolute error
// scales with |h| + a |h'| rather than with |h| alone.
double SlopeRoundoff(double h_left, double h_right, double alpha_left,
                     double alpha_right) {
  const double slope =
      std::abs(Slope(h_left, h_right, alpha_left, alpha_right));
  const double value_error = std::abs(h_left) + std::abs(h_right) +
                             slope * (alpha_left + alpha_right);
  return 8 * kMachineEpsilon *
         (slope + value_error / (alpha_right - alpha_left));
}

absl::Status CheckCurveValues(std::span<const double> h,
                              const DiscretizationGrid& grid) {
  const size_t k = grid.size() - 1;
  if (std::abs(h[0] - 1.0) > kValidityTolerance) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "hockey-stick curve must equal 1 at alpha = 0, got %.17g.", h[0]));
  }
  for (size_t i = 0; i <= k; ++i) {
    if (!std::isfinite(h[i]) || h[i] < -kValidityTolerance ||
        h[i] > 1 + kValidityTolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "hockey-stick value at index %d is %.17g, outside [0, 1].", i,
          h[i]));
    }
    if (i < k && h[i] < 1 - grid.alpha(i) - kValidityTolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "hockey-stick value %.17g at alpha = %.17g (index %d) lies below "
          "1 - alpha.",
          h[i], grid.alpha(i), i));
    }
    if (i > 0 && h[i] > h[i - 1] + kValidityTolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "hockey-stick values must be non-increasing; index %d has %.17g "
          "after %.17g.",
          i, h[i], h[i - 1]));
    }
  }
  if (std::abs(h[k - 1] - h[k]) > kValidityTolerance) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "hockey-stick value at the last finite point (%.17g) must equal the "
        "value at infinity (%.17g).",
        h[k - 1], h[k]));
  }
  return absl::OkStatus();
}

// Applies the clamping rule to a computed mass. Errors within `roundoff` are
// dropped silently; larger ones within kValidityTolerance count as clamp
// events.
absl::Status ClampMass(double& mass, double roundoff, size_t index,
                       int& clamp_events) {
  if (mass >= 0) return absl::OkStatus();
  if (mass >= -roundoff) {
    mass = 0;
  } else if (mass >= -kValidityTolerance) {
    mass = 0;
    ++clamp_events;
  } else {
    return absl::FailedPreconditionError(absl::StrFormat(
        "hockey-stick curve is not convex at index %d: the discretized mass "
        "would be %.17g.",
        index, mass));
  }
  return absl::OkStatus();
}

absl::Status CheckMasses(std::span<const double> masses,
                         std::string_view what) {
  internal::CompensatedSum total;
  for (size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] >= 0) || !std::isfinite(masses[i])) {
      return absl::FailedPreconditionError(
          absl::StrFormat("%s mass at index %d is %.17g.", std::string(what), i,
                          masses[i]));
    }
    total.Add(masses[i]);
  }
  if (std::abs(total.Value() - 1.0) > kTotalMassTolerance) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "%s masses sum to %.17g instead of 1.", std::string(what),
        total.Value()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<FinitePld> FinitePld::Create(DiscretizationGrid grid,
                                            std::vector<double> masses) {
  if (masses.size() != grid.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "got %d masses for a grid of %d points.", masses.size(),
        grid.size()));
  }
  for (double& mass : masses) {
    if (mass < 0 && mass >= -kValidityTolerance) mass = 0;
  }
  if (absl::Status status = CheckMasses(masses, "privacy loss distribution");
      !status.ok()) {
    return status;
  }
  return FinitePld(std::move(grid), std::move(masses));
}

absl::StatusOr<FinitePld> FinitePld::CreateOnLattice(
    Lattice lattice, std::vector<double> finite_masses,
    double mass_at_infinity, double mass_at_negative_infinity) {
  if (finite_masses.empty()) {
    return absl::InvalidArgumentError(
        "a lattice distribution needs at least one finite point.");
  }
  absl::StatusOr<DiscretizationGrid> grid = DiscretizationGrid::Uniform(
      lattice.interval, lattice.lowest_index,
      lattice.lowest_index + static_cast<int64_t>(finite_masses.size()) - 1);
  if (!grid.ok()) return grid.status();
  std::vector<double> masses;
  masses.reserve(finite_masses.size() + 2);
  masses.push_back(mass_at_negative_infinity);
  masses.insert(masses.end(), finite_masses.begin(), finite_masses.end());
  masses.push_back(mass_at_infinity);
  return Create(*std::move(grid), std::move(masses));
}

FinitePld FinitePld::PointMassAtZero(double interval) {
  absl::StatusOr<DiscretizationGrid> grid =
      DiscretizationGrid::Uniform(interval, 0, 0);
  if (!grid.ok()) {
    const double zero[] = {0.0};
    grid = DiscretizationGrid::FromEpsilons(zero);
  }
  return FinitePld(*std::move(grid), {0.0, 1.0, 0.0});
}

double FinitePld::total_mass() const {
  internal::CompensatedSum total;
  for (double mass : masses_) total.Add(mass);
  return total.Value();
}

absl::StatusOr<DiscreteDominatingPair> DiscretizeFromCurve(
    std::span<const double> h_values, const DiscretizationGrid& grid) {
  if (h_values.size() != grid.size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "got %d hockey-stick values for a grid of %d points.",
        h_values.size(), grid.size()));
  }
  if (absl::Status status = CheckCurveValues(h_values, grid); !status.ok()) {
    return status;
  }
  const size_t k = grid.size() - 1;
  DiscreteDominatingPair pair{.grid = grid,
                              .p_masses = std::vector<double>(k + 1, 0.0),
                              .q_masses = std::vector<double>(k + 1, 0.0)};
  // Q(alpha > alpha_{i-1}) equals the slope magnitude left of alpha_i. It is
  // tracked as a running maximum of the slopes so that masses zeroed for
  // round-off do not accumulate into the cumulative sums.
  double above = 0;
  double above_roundoff = 0;
  for (size_t i = k - 1; i >= 1; --i) {
    const double slope =
        Slope(h_values[i - 1], h_values[i], grid.alpha(i - 1), grid.alpha(i));
    const double roundoff = SlopeRoundoff(h_values[i - 1], h_values[i],
                                          grid.alpha(i - 1), grid.alpha(i));
    double q = slope - above;
    if (absl::Status status =
            ClampMass(q, roundoff + above_roundoff, i, pair.clamp_events);
        !status.ok()) {
      return status;
    }
    pair.q_masses[i] = q;
    pair.p_masses[i] = grid.alpha(i) * q;
    if (q > 0) {
      above = slope;
      above_roundoff = roundoff;
    }
  }
  double q0 = 1.0 - above;
  if (absl::Status status = ClampMass(q0, above_roundoff + 8 * kMachineEpsilon,
                                      0, pair.clamp_events);
      !status.ok()) {
    return status;
  }
  pair.q_masses[0] = q0;
  pair.p_masses[k] = h_values[k];
  return pair;
}

absl::Status ValidatePair(const DiscreteDominatingPair& pair) {
  const size_t n = pair.grid.size();
  if (pair.p_masses.size() != n || pair.q_masses.size() != n) {
    return absl::InvalidArgumentError(
        "pair masses are not aligned with the grid.");
  }
  if (pair.q_masses.back() != 0.0) {
    return absl::FailedPreconditionError(
        "the second distribution of a dominating pair has mass at +inf.");
  }
  for (size_t i = 0; i + 1 < n; ++i) {
    const double expected = pair.grid.alpha(i) * pair.q_masses[i];
    if (std::abs(pair.p_masses[i] - expected) >
        kValidityTolerance * std::max(1.0, expected)) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "P(alpha) != alpha Q(alpha) at index %d: %.17g vs %.17g.", i,
          pair.p_masses[i], expected));
    }
  }
  if (absl::Status status = CheckMasses(pair.p_masses, "P"); !status.ok()) {
    return status;
  }
  return CheckMasses(pair.q_masses, "Q");
}

absl::StatusOr<FinitePld> PldOf(const DiscreteDominatingPair& pair) {
  if (absl::Status status = ValidatePair(pair); !status.ok()) return status;
  return FinitePld::Create(pair.grid, pair.p_masses);
}

double DeltaAt(const FinitePld& pld, double epsilon) {
  if (std::isnan(epsilon)) return epsilon;
  std::span<const double> masses = pld.masses();
  if (epsilon == kInfinity) return pld.mass_at_infinity();
  internal::CompensatedSum delta;
  if (epsilon == -kInfinity) {
    for (size_t i = 1; i < masses.size(); ++i) delta.Add(masses[i]);
    return delta.Value();
  }
  delta.Add(pld.mass_at_infinity());
  std::span<const double> epsilons = pld.grid().epsilons();
  for (size_t i = masses.size() - 2; i >= 1 && epsilons[i] > epsilon; --i) {
    if (masses[i] == 0) continue;
    delta.Add(-std::expm1(epsilon - epsilons[i]) * masses[i]);
  }
  return delta.Value();
}

absl::StatusOr<double> EpsilonForDelta(const FinitePld& pld, double delta) {
  if (!(delta > 0) || delta > 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("delta must lie in (0, 1], got %g.", delta));
  }
  if (pld.mass_at_infinity() > delta) return kInfinity;
  if (DeltaAt(pld, -kInfinity) <= delta) return -kInfinity;

  std::span<const double> finite = pld.finite_masses();
  size_t first = 0;
  while (first < finite.size() && finite[first] == 0) ++first;
  size_t last = finite.size();
  while (last > first && finite[last - 1] == 0) --last;
  if (first == last) {
    // Unreachable: with no finite mass, delta(-inf) equals the mass at +inf.
    return absl::InternalError("no finite support in EpsilonForDelta.");
  }
  const double support_low = pld.grid().epsilon(first + 1);
  double hi = pld.grid().epsilon(last) + 1;
  double width = 1;
  double lo = support_low - width;
  while (DeltaAt(pld, lo) <= delta) {
    width *= 2;
    lo = support_low - width;
  }
  while (hi - lo > kEpsilonTolerance) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (DeltaAt(pld, mid) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

PiecewiseLinearCurve::PiecewiseLinearCurve(std::vector<double> alphas,
                                           std::vector<double> values,
                                           double value_at_infinity)
    : alphas_(std::move(alphas)),
      values_(std::move(values)),
      value_at_infinity_(value_at_infinity) {}

double PiecewiseLinearCurve::Slope(size_t segment) const {
  return (values_[segment] - values_[segment - 1]) /
         (alphas_[segment] - alphas_[segment - 1]);
}

double PiecewiseLinearCurve::Evaluate(double alpha) const {
  if (alpha == kInfinity) return value_at_infinity_;
  if (alpha <= alphas_.front()) return values_.front();
  if (alpha >= alphas_.back()) return values_.back();
  const size_t i =
      std::upper_bound(alphas_.begin(), alphas_.end(), alpha) - alphas_.begin();
  const double t = (alpha - alphas_[i - 1]) / (alphas_[i] - alphas_[i - 1]);
  return (1 - t) * values_[i - 1] + t * values_[i];
}

double PiecewiseLinearCurve::RightDerivative(double alpha) const {
  if (alpha >= alphas_.back()) return 0;
  const size_t i =
      std::upper_bound(alphas_.begin(), alphas_.end(), alpha) - alphas_.begin();
  return Slope(std::max<size_t>(i, 1));
}

double PiecewiseLinearCurve::LeftDerivative(double alpha) const {
  if (alpha > alphas_.back()) return 0;
  if (alphas_.size() < 2) return 0;
  const size_t i =
      std::lower_bound(alphas_.begin(), alphas_.end(), alpha) - alphas_.begin();
  return Slope(std::max<size_t>(i, 1));
}

std::unique_ptr<PiecewiseLinearCurve> CurveOf(
    const DiscreteDominatingPair& pair) {
  const size_t k = pair.grid.size() - 1;
  std::vector<double> alphas(pair.grid.alphas().begin(),
                             pair.grid.alphas().end() - 1);
  // D_{alpha_i} = D_{alpha_{i+1}} + (alpha_{i+1} - alpha_i) Q(alpha > alpha_i)
  // accumulates only non-negative terms.
  std::vector<double> values(k);
  values[k - 1] = pair.p_masses[k];
  double q_above = 0;
  for (size_t i = k - 1; i-- > 0;) {
    q_above += pair.q_masses[i + 1];
    values[i] = values[i + 1] + (alphas[i + 1] - alphas[i]) * q_above;
  }
  return std::make_unique<PiecewiseLinearCurve>(
      std::move(alphas), std::move(values), pair.p_masses[k]);
}

absl::StatusOr<std::string> FinitePldToJson(const FinitePld& pld) {
  const std::optional<Lattice>& lattice = pld.grid().lattice();
  if (!lattice.has_value()) {
    return absl::FailedPreconditionError(
        "only distributions on a uniform lattice can be serialized.");
  }
  std::string out = absl::StrFormat(
      "{\"discretization\": %.17g, \"epsilon_offset\": %d, \"masses\": [",
      lattice->interval, -lattice->lowest_index);
  absl::StrAppend(&out, absl::StrJoin(pld.finite_masses(), ", ",
                                      [](std::string* s, double m) {
                                        absl::StrAppendFormat(s, "%.17g", m);
                                      }));
  absl::StrAppendFormat(&out, "], \"mass_at_infinity\": %.17g",
                        pld.mass_at_infinity());
  if (pld.mass_at_negative_infinity() != 0) {
    absl::StrAppendFormat(&out, ", \"mass_at_negative_infinity\": %.17g",
                          pld.mass_at_negative_infinity());
  }
  absl::StrAppend(&out, "}");
  return out;
}

absl::StatusOr<FinitePld> FinitePldFromJson(std::string_view json) {
  nlohmann::json parsed = nlohmann::json::parse(json, nullptr,
                                                /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object()) {
    return absl::InvalidArgumentError("malformed privacy loss JSON.");
  }
  for (const char* key :
       {"discretization", "epsilon_offset", "masses", "mass_at_infinity"}) {
    if (!parsed.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("privacy loss JSON lacks \"", key, "\"."));
    }
  }
  if (!parsed["discretization"].is_number() ||
      !parsed["epsilon_offset"].is_number_integer() ||
      !parsed["masses"].is_array() || !parsed["mass_at_infinity"].is_number()) {
    return absl::InvalidArgumentError(
        "privacy loss JSON fields have the wrong types.");
  }
  std::vector<double> masses;
  for (const nlohmann::json& mass : parsed["masses"]) {
    if (!mass.is_number()) {
      return absl::InvalidArgumentError("masses must be numbers.");
    }
    masses.push_back(mass.get<double>());
  }
  double negative = 0;
  if (parsed.contains("mass_at_negative_infinity")) {
    if (!parsed["mass_at_negative_infinity"].is_number()) {
      return absl::InvalidArgumentError(
          "mass_at_negative_infinity must be a number.");
    }
    negative = parsed["mass_at_negative_infinity"].get<double>();
  }
  const Lattice lattice{
      .interval = parsed["discretization"].get<double>(),
      .lowest_index = -parsed["epsilon_offset"].get<int64_t>()};
  return FinitePld::CreateOnLattice(lattice, std::move(masses),
                                    parsed["mass_at_infinity"].get<double>(),
                                    negative);
}

}  // namespace dp_accounting
