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

// Hockey-stick curves h(alpha) = D_alpha(A || B) of the dominating pairs of
// the mechanisms supported by the accountant.
//
// Every mechanism has sensitivity 1. The base pairs are
//   Gaussian:            A = N(0, sigma^2),  B = N(1, sigma^2)
//   Laplace:             A = Lap(0, b),      B = Lap(1, b)
//   Randomized response: A = (e^eps, 1) / (e^eps + 1) on {0, 1}, B = A
//                        reversed.
// Poisson subsampling with probability q wraps one of these and uses
//   remove: ((1 - q) A + q B, A)
//   add:    (A, (1 - q) A + q B)
//   both:   the pointwise maximum of the two curves.

#ifndef DP_ACCOUNTING_MECHANISM_CURVES_H_
#define DP_ACCOUNTING_MECHANISM_CURVES_H_

#include <memory>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dp_accounting/common.h"

namespace dp_accounting {

enum class MechanismKind {
  kGaussian,
  kLaplace,
  kRandomizedResponse,
  kPoissonSubsampled,
};

enum class AdjacencyDirection {
  kAdd,
  kRemove,
  kBoth,
};

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kGaussian;
  // Standard deviation (Gaussian) or scale (Laplace).
  double noise_scale = 1.0;
  // Only used by randomized response.
  double rr_epsilon = 0.0;
  // The fields below are only used by kPoissonSubsampled.
  double sampling_prob = 1.0;
  std::shared_ptr<const MechanismSpec> inner;
  AdjacencyDirection adjacency_direction = AdjacencyDirection::kRemove;

  static MechanismSpec Gaussian(double noise_scale);
  static MechanismSpec Laplace(double noise_scale);
  static MechanismSpec RandomizedResponse(double epsilon);
  static MechanismSpec PoissonSubsampled(
      MechanismSpec inner, double sampling_prob,
      AdjacencyDirection direction = AdjacencyDirection::kRemove);

  absl::Status Validate() const;
  std::string DebugString() const;
};

std::string MechanismKindName(MechanismKind kind);
std::string AdjacencyDirectionName(AdjacencyDirection direction);

// A hockey-stick curve together with its one-sided derivatives. For a pair
// (A, B) with privacy loss L = log(A/B):
//   h(alpha)   = A(L > log alpha) - alpha * B(L > log alpha)
//   h'_+(alpha) = -B(L > log alpha),   h'_-(alpha) = -B(L >= log alpha).
// Implementations are immutable and safe to share across threads.
class HockeyStickCurve {
 public:
  virtual ~HockeyStickCurve() = default;

  // alpha in [0, +inf].
  virtual double Evaluate(double alpha) const = 0;
  // alpha in [0, +inf).
  virtual double RightDerivative(double alpha) const = 0;
  // alpha in (0, +inf).
  virtual double LeftDerivative(double alpha) const = 0;
  virtual double ValueAtInfinity() const = 0;

  double Derivative(double alpha, Side side) const {
    return side == Side::kRight ? RightDerivative(alpha)
                                : LeftDerivative(alpha);
  }
};

absl::StatusOr<std::unique_ptr<HockeyStickCurve>> CurveFor(
    const MechanismSpec& spec);

// h(alpha) = [1 - alpha]_+, the curve of any pair with A = B.
std::unique_ptr<HockeyStickCurve> IdenticalPairCurve();

// Checked one-sided derivative; alpha must lie in (0, +inf).
absl::StatusOr<double> DerivativeAt(const HockeyStickCurve& curve,
                                    double alpha, Side side);

// Standard normal CDF.
double StandardNormalCdf(double x);

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_MECHANISM_CURVES_H_
