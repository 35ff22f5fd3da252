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


#include "dp_accounting/optimistic_estimator.h"

#include <algorithm>
#include <cmath>
#include <thread>
#include <utility>

#include "absl/strings/str_format.h"
#include "dp_accounting/common.h"

namespace dp_accounting {
namespace {

struct Point {
  double x;
  double y;
};

// Positive for a counter-clockwise turn o -> a -> b.
double Cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// PLD(L >= log alpha).
double UpperTailFrom(const HockeyStickCurve& curve, double alpha) {
  if (alpha == 0) return 1.0;
  if (alpha == kInfinity) return curve.ValueAtInfinity();
  return curve.Evaluate(alpha) - alpha * curve.LeftDerivative(alpha);
}

}  // namespace

double CandidateSet::Value(size_t i) const {
  if (i < index_of_one) return forward[i];
  if (i == index_of_one) return std::min(forward[i], backward[0]);
  return backward[i - index_of_one];
}

absl::StatusOr<CandidateSet> ComputeCandidates(
    const HockeyStickCurve& curve, const DiscretizationGrid& grid,
    const OptimisticOptions& options) {
  if (!grid.index_of_one().has_value()) {
    return absl::InvalidArgumentError(
        "optimistic estimation needs alpha = 1 in the grid: for identical "
        "distributions every dominated pair has privacy loss 0 in its "
        "support.");
  }
  if (curve.ValueAtInfinity() > 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "optimistic estimation only supports curves with h(+inf) = 0, got "
        "%g.",
        curve.ValueAtInfinity()));
  }
  const size_t k = grid.size() - 1;
  const size_t one = *grid.index_of_one();
  CandidateSet candidates{.index_of_one = one,
                          .forward = std::vector<double>(one + 1),
                          .backward = std::vector<double>(k - one)};
  candidates.forward[0] = 1.0;
  candidates.backward.back() = 0.0;

  // Task t < i* extends the tangent at alpha_t forwards; task t >= i*
  // extends the tangent at alpha_{t+1} backwards. Tasks touch disjoint
  // entries.
  auto run = [&](size_t begin, size_t end) {
    for (size_t t = begin; t < end; ++t) {
      if (t < one) {
        const double a = grid.alpha(t);
        candidates.forward[t + 1] =
            curve.Evaluate(a) +
            (grid.alpha(t + 1) - a) * curve.RightDerivative(a);
      } else {
        const double a = grid.alpha(t + 1);
        candidates.backward[t - one] =
            curve.Evaluate(a) - (a - grid.alpha(t)) * curve.LeftDerivative(a);
      }
    }
  };
  const size_t tasks = k - 1;
  const size_t threads = std::clamp<size_t>(
      static_cast<size_t>(std::max(options.num_threads, 1)), 1,
      std::max<size_t>(tasks, 1));
  if (threads == 1) {
    run(0, tasks);
  } else {
    std::vector<std::jthread> workers;
    const size_t chunk = (tasks + threads - 1) / threads;
    for (size_t begin = 0; begin < tasks; begin += chunk) {
      workers.emplace_back(run, begin, std::min(tasks, begin + chunk));
    }
  }
  return candidates;
}

absl::Status CheckCandidateBounds(const CandidateSet& candidates,
                                  const HockeyStickCurve& curve,
                                  const DiscretizationGrid& grid) {
  const size_t one = candidates.index_of_one;
  for (size_t i = 0; i < candidates.forward.size(); ++i) {
    const double f = candidates.forward[i];
    const double h = curve.Evaluate(grid.alpha(i));
    if (f < 1 - grid.alpha(i) - kValidityTolerance ||
        f > h + kValidityTolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "forward candidate %.17g at index %d leaves [1 - alpha, h] = "
          "[%.17g, %.17g].",
          f, i, 1 - grid.alpha(i), h));
    }
  }
  for (size_t j = 0; j < candidates.backward.size(); ++j) {
    const double f = candidates.backward[j];
    const double h = curve.Evaluate(grid.alpha(one + j));
    if (f < -kValidityTolerance || f > h + kValidityTolerance) {
      return absl::FailedPreconditionError(absl::StrFormat(
          "backward candidate %.17g at index %d leaves [0, h] = [0, %.17g].",
          f, one + j, h));
    }
  }
  return absl::OkStatus();
}

std::vector<double> LowerHullValues(const CandidateSet& candidates,
                                    const DiscretizationGrid& grid) {
  const size_t k = grid.size() - 1;
  std::vector<Point> points(k);
  for (size_t i = 0; i < k; ++i) {
    const double alpha = grid.alpha(i);
    // Candidates never lie below [1 - alpha]_+ beyond round-off.
    points[i] = {alpha,
                 std::max(candidates.Value(i), std::max(0.0, 1.0 - alpha))};
  }
  std::vector<size_t> hull;
  for (size_t i = 0; i < k; ++i) {
    while (hull.size() >= 2 &&
           Cross(points[hull[hull.size() - 2]], points[hull.back()],
                 points[i]) < 0) {
      hull.pop_back();
    }
    hull.push_back(i);
  }
  std::vector<double> values(k + 1, 0.0);
  for (size_t v = 0; v < hull.size(); ++v) {
    const Point& a = points[hull[v]];
    values[hull[v]] = a.y;
    if (v + 1 == hull.size()) break;
    const Point& b = points[hull[v + 1]];
    for (size_t i = hull[v] + 1; i < hull[v + 1]; ++i) {
      const double t = (points[i].x - a.x) / (b.x - a.x);
      values[i] = (1 - t) * a.y + t * b.y;
    }
  }
  values[k] = 0.0;
  return values;
}

absl::StatusOr<DiscreteDominatingPair> OptimisticPair(
    const HockeyStickCurve& curve, const DiscretizationGrid& grid,
    const OptimisticOptions& options) {
  absl::StatusOr<CandidateSet> candidates =
      ComputeCandidates(curve, grid, options);
  if (!candidates.ok()) return candidates.status();
  if (absl::Status status = CheckCandidateBounds(*candidates, curve, grid);
      !status.ok()) {
    return status;
  }
  const std::vector<double> values = LowerHullValues(*candidates, grid);
  return DiscretizeFromCurve(values, grid);
}

absl::StatusOr<FinitePld> PbOptimisticPld(const HockeyStickCurve& curve,
                                          const DiscretizationGrid& grid) {
  const size_t k = grid.size() - 1;
  std::vector<double> masses(k + 1, 0.0);
  double previous = 1.0;
  for (size_t i = 1; i <= k; ++i) {
    const double tail = UpperTailFrom(curve, grid.alpha(i));
    masses[i - 1] = std::max(0.0, previous - tail);
    previous = tail;
  }
  masses[k] = std::max(0.0, curve.ValueAtInfinity());
  return FinitePld::Create(grid, std::move(masses));
}

absl::StatusOr<FinitePld> PbOptimisticPld(std::span<const PldAtom> atoms,
                                          const DiscretizationGrid& grid) {
  std::vector<double> masses(grid.size(), 0.0);
  std::span<const double> epsilons = grid.epsilons();
  for (const PldAtom& atom : atoms) {
    if (std::isnan(atom.epsilon) || !(atom.mass >= 0)) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "invalid privacy loss atom (%g, %g).", atom.epsilon, atom.mass));
    }
    // Largest grid point at or below the atom.
    const size_t i =
        std::upper_bound(epsilons.begin(), epsilons.end(), atom.epsilon) -
        epsilons.begin() - 1;
    masses[i] += atom.mass;
  }
  return FinitePld::Create(grid, std::move(masses));
}

namespace {

// Output probabilities of randomized response with parameter epsilon / 2.
struct HalfResponse {
  double p;
  double r;
};

HalfResponse HalfResponseFor(double epsilon) {
  const double root = std::exp(epsilon / 2);
  return {.p = root / (root + 1), .r = 1 / (root + 1)};
}

}  // namespace

double MaxNonUniquenessGamma(double epsilon) {
  const auto [p, r] = HalfResponseFor(epsilon);
  return std::min(-std::expm1(-epsilon), (p - r) / (1 - r * r));
}

double DefaultNonUniquenessGamma(double epsilon) {
  return 0.1 * MaxNonUniquenessGamma(epsilon);
}

absl::StatusOr<NonUniquenessFixture> MakeNonUniquenessFixture(
    double epsilon, std::optional<double> gamma) {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "randomized response epsilon must be positive, got %g.", epsilon));
  }
  const double g = gamma.value_or(DefaultNonUniquenessGamma(epsilon));
  const double limit = MaxNonUniquenessGamma(epsilon);
  if (!(g > 0) || !(g < limit)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "gamma must lie in (0, %g) for epsilon = %g, got %g.", limit, epsilon,
        g));
  }
  const double e = std::exp(epsilon);
  const double alpha1 = 1 - g;
  const double alpha2 = 1 + g;
  absl::StatusOr<DiscretizationGrid> grid = DiscretizationGrid::FromAlphas(
      {0.0, 1 / e, alpha1, alpha2, e, kInfinity});
  if (!grid.ok()) return grid.status();

  // On [e^-epsilon, 1] the composed curve is p^2 - alpha r^2 + 2pr(1 - alpha)
  // and on [1, e^epsilon] it is p^2 - alpha r^2.
  const auto [p, r] = HalfResponseFor(epsilon);
  const double at_kink = p * p - r * r;
  const double left_slope = -(r * r + 2 * p * r);
  const double right_slope = -r * r;
  const double first[] = {1.0,
                          1 - 1 / e,
                          at_kink - left_slope * g,
                          at_kink + left_slope * g,
                          0.0,
                          0.0};
  const double second[] = {1.0,
                           1 - 1 / e,
                           at_kink - right_slope * g,
                           at_kink + right_slope * g,
                           0.0,
                           0.0};
  absl::StatusOr<DiscreteDominatingPair> p1 = DiscretizeFromCurve(first, *grid);
  if (!p1.ok()) return p1.status();
  absl::StatusOr<DiscreteDominatingPair> p2 =
      DiscretizeFromCurve(second, *grid);
  if (!p2.ok()) return p2.status();
  return NonUniquenessFixture{.alpha1 = alpha1,
                              .alpha2 = alpha2,
                              .first = *std::move(p1),
                              .second = *std::move(p2)};
}

}  // namespace dp_accounting
