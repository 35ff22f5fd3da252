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

#include "dp_accounting/mechanism_curves.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dp_accounting {
namespace {

// Grid points that land within this relative distance of a kink are treated
// as sitting on the kink, so that exp(log(x)) round-off does not flip which
// one-sided derivative is reported.
constexpr double kKinkTolerance = 1e-12;

bool NearKink(double alpha, double kink) {
  return std::abs(alpha - kink) <= kKinkTolerance * kink;
}

class IdenticalCurve final : public HockeyStickCurve {
 public:
  double Evaluate(double alpha) const override {
    return std::max(0.0, 1.0 - alpha);
  }
  double RightDerivative(double alpha) const override {
    return alpha < 1.0 ? -1.0 : 0.0;
  }
  double LeftDerivative(double alpha) const override {
    return alpha <= 1.0 ? -1.0 : 0.0;
  }
  double ValueAtInfinity() const override { return 0.0; }
};

// Piecewise linear with kinks at e^-eps and e^eps.
class RandomizedResponseCurve final : public HockeyStickCurve {
 public:
  explicit RandomizedResponseCurve(double epsilon)
      : lower_kink_(std::exp(-epsilon)),
        upper_kink_(std::exp(epsilon)),
        middle_slope_(-1.0 / (std::exp(epsilon) + 1.0)) {}

  double Evaluate(double alpha) const override {
    if (alpha <= lower_kink_) return 1.0 - alpha;
    if (alpha >= upper_kink_) return 0.0;
    // (e^eps - alpha) / (e^eps + 1)
    return -middle_slope_ * (upper_kink_ - alpha);
  }
  double RightDerivative(double alpha) const override {
    if (alpha < lower_kink_ && !NearKink(alpha, lower_kink_)) return -1.0;
    if (alpha < upper_kink_ && !NearKink(alpha, upper_kink_)) {
      return middle_slope_;
    }
    return 0.0;
  }
  double LeftDerivative(double alpha) const override {
    if (alpha <= lower_kink_ || NearKink(alpha, lower_kink_)) return -1.0;
    if (alpha <= upper_kink_ || NearKink(alpha, upper_kink_)) {
      return middle_slope_;
    }
    return 0.0;
  }
  double ValueAtInfinity() const override { return 0.0; }

 private:
  double lower_kink_;
  double upper_kink_;
  double middle_slope_;
};

// With sigma the standard deviation and c = 1 / (2 sigma):
//   h(alpha) = Phi(c - sigma log alpha) - alpha Phi(-c - sigma log alpha).
class GaussianCurve final : public HockeyStickCurve {
 public:
  explicit GaussianCurve(double sigma)
      : sigma_(sigma), half_inverse_(0.5 / sigma) {}

  double Evaluate(double alpha) const override {
    if (alpha == 0.0) return 1.0;
    if (std::isinf(alpha)) return 0.0;
    const double x = sigma_ * std::log(alpha);
    if (x >= 0) {
      return std::max(0.0, StandardNormalCdf(half_inverse_ - x) -
                               alpha * StandardNormalCdf(-half_inverse_ - x));
    }
    // Written as (1 - alpha) plus a non-negative excess so that small alphas
    // keep their precision.
    const double excess = alpha * StandardNormalCdf(x + half_inverse_) -
                          StandardNormalCdf(x - half_inverse_);
    return (1.0 - alpha) + std::max(0.0, excess);
  }
  double RightDerivative(double alpha) const override {
    if (alpha == 0.0) return -1.0;
    if (std::isinf(alpha)) return 0.0;
    return -StandardNormalCdf(-half_inverse_ - sigma_ * std::log(alpha));
  }
  double LeftDerivative(double alpha) const override {
    return RightDerivative(alpha);
  }
  double ValueAtInfinity() const override { return 0.0; }

 private:
  double sigma_;
  double half_inverse_;
};

// The privacy loss lies in [-1/b, 1/b] with atoms at both ends. In between,
// h = 1 - exp((log alpha - 1/b) / 2).
class LaplaceCurve final : public HockeyStickCurve {
 public:
  explicit LaplaceCurve(double scale)
      : max_loss_(1.0 / scale),
        lower_kink_(std::exp(-1.0 / scale)),
        upper_kink_(std::exp(1.0 / scale)) {}

  double Evaluate(double alpha) const override {
    if (alpha <= lower_kink_) return 1.0 - alpha;
    if (alpha >= upper_kink_) return 0.0;
    return -std::expm1(0.5 * (std::log(alpha) - max_loss_));
  }
  double RightDerivative(double alpha) const override {
    if (alpha < lower_kink_ && !NearKink(alpha, lower_kink_)) return -1.0;
    if (alpha >= upper_kink_ || NearKink(alpha, upper_kink_)) return 0.0;
    return Interior(std::max(alpha, lower_kink_));
  }
  double LeftDerivative(double alpha) const override {
    if (alpha <= lower_kink_ || NearKink(alpha, lower_kink_)) return -1.0;
    if (alpha > upper_kink_ && !NearKink(alpha, upper_kink_)) return 0.0;
    return Interior(std::min(alpha, upper_kink_));
  }
  double ValueAtInfinity() const override { return 0.0; }

 private:
  double Interior(double alpha) const {
    return -0.5 * std::exp(-0.5 * (std::log(alpha) + max_loss_));
  }

  double max_loss_;
  double lower_kink_;
  double upper_kink_;
};

// The inner curves (Gaussian, Laplace, randomized response) are symmetric,
// so D(B || A) = D(A || B) and one inner curve serves both directions.
class SubsampledRemoveCurve final : public HockeyStickCurve {
 public:
  SubsampledRemoveCurve(std::shared_ptr<const HockeyStickCurve> inner,
                        double sampling_prob)
      : inner_(std::move(inner)),
        q_(sampling_prob),
        threshold_(1.0 - sampling_prob) {}

  double Evaluate(double alpha) const override {
    if (alpha <= threshold_) return 1.0 - alpha;
    if (std::isinf(alpha)) return q_ * inner_->ValueAtInfinity();
    return q_ * inner_->Evaluate(InnerAlpha(alpha));
  }
  double RightDerivative(double alpha) const override {
    if (alpha < threshold_) return -1.0;
    return inner_->RightDerivative(InnerAlpha(alpha));
  }
  double LeftDerivative(double alpha) const override {
    if (alpha <= threshold_) return -1.0;
    return inner_->LeftDerivative(InnerAlpha(alpha));
  }
  double ValueAtInfinity() const override {
    return q_ * inner_->ValueAtInfinity();
  }

 private:
  double InnerAlpha(double alpha) const { return (alpha - threshold_) / q_; }

  std::shared_ptr<const HockeyStickCurve> inner_;
  double q_;
  double threshold_;
};

// h(alpha) = c h_inner(alpha q / c) with c = 1 - alpha (1 - q), and zero once
// c <= 0.
class SubsampledAddCurve final : public HockeyStickCurve {
 public:
  SubsampledAddCurve(std::shared_ptr<const HockeyStickCurve> inner,
                     double sampling_prob)
      : inner_(std::move(inner)),
        q_(sampling_prob),
        keep_prob_(1.0 - sampling_prob) {}

  double Evaluate(double alpha) const override {
    if (std::isinf(alpha)) {
      return keep_prob_ == 0.0 ? inner_->ValueAtInfinity() : 0.0;
    }
    const double c = 1.0 - alpha * keep_prob_;
    if (c <= 0.0) return 0.0;
    return c * inner_->Evaluate(alpha * q_ / c);
  }
  double RightDerivative(double alpha) const override {
    const double c = 1.0 - alpha * keep_prob_;
    if (c <= 0.0) return 0.0;
    const double beta = alpha * q_ / c;
    return -keep_prob_ * inner_->Evaluate(beta) +
           (q_ / c) * inner_->RightDerivative(beta);
  }
  double LeftDerivative(double alpha) const override {
    const double c = 1.0 - alpha * keep_prob_;
    if (c <= 0.0) {
      return alpha * keep_prob_ == 1.0
                 ? -keep_prob_ * inner_->ValueAtInfinity()
                 : 0.0;
    }
    const double beta = alpha * q_ / c;
    return -keep_prob_ * inner_->Evaluate(beta) +
           (q_ / c) * inner_->LeftDerivative(beta);
  }
  double ValueAtInfinity() const override {
    return keep_prob_ == 0.0 ? inner_->ValueAtInfinity() : 0.0;
  }

 private:
  std::shared_ptr<const HockeyStickCurve> inner_;
  double q_;
  double keep_prob_;
};

// Pointwise maximum of two convex curves; the one-sided derivatives at a tie
// are the max (right) and min (left) of the candidates.
class MaxCurve final : public HockeyStickCurve {
 public:
  MaxCurve(std::unique_ptr<HockeyStickCurve> first,
           std::unique_ptr<HockeyStickCurve> second)
      : first_(std::move(first)), second_(std::move(second)) {}

  double Evaluate(double alpha) const override {
    return std::max(first_->Evaluate(alpha), second_->Evaluate(alpha));
  }
  double RightDerivative(double alpha) const override {
    const double a = first_->Evaluate(alpha);
    const double b = second_->Evaluate(alpha);
    if (a > b) return first_->RightDerivative(alpha);
    if (b > a) return second_->RightDerivative(alpha);
    return std::max(first_->RightDerivative(alpha),
                    second_->RightDerivative(alpha));
  }
  double LeftDerivative(double alpha) const override {
    const double a = first_->Evaluate(alpha);
    const double b = second_->Evaluate(alpha);
    if (a > b) return first_->LeftDerivative(alpha);
    if (b > a) return second_->LeftDerivative(alpha);
    return std::min(first_->LeftDerivative(alpha),
                    second_->LeftDerivative(alpha));
  }
  double ValueAtInfinity() const override {
    return std::max(first_->ValueAtInfinity(), second_->ValueAtInfinity());
  }

 private:
  std::unique_ptr<HockeyStickCurve> first_;
  std::unique_ptr<HockeyStickCurve> second_;
};

bool IsPositiveFinite(double x) { return std::isfinite(x) && x > 0; }

}  // namespace

MechanismSpec MechanismSpec::Gaussian(double noise_scale) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kGaussian;
  spec.noise_scale = noise_scale;
  return spec;
}

MechanismSpec MechanismSpec::Laplace(double noise_scale) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kLaplace;
  spec.noise_scale = noise_scale;
  return spec;
}

MechanismSpec MechanismSpec::RandomizedResponse(double epsilon) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kRandomizedResponse;
  spec.rr_epsilon = epsilon;
  return spec;
}

MechanismSpec MechanismSpec::PoissonSubsampled(MechanismSpec inner,
                                               double sampling_prob,
                                               AdjacencyDirection direction) {
  MechanismSpec spec;
  spec.kind = MechanismKind::kPoissonSubsampled;
  spec.sampling_prob = sampling_prob;
  spec.adjacency_direction = direction;
  spec.inner = std::make_shared<const MechanismSpec>(std::move(inner));
  return spec;
}

absl::Status MechanismSpec::Validate() const {
  switch (kind) {
    case MechanismKind::kGaussian:
    case MechanismKind::kLaplace:
      if (!IsPositiveFinite(noise_scale)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "noise_scale should be positive and finite, got %g.",
            noise_scale));
      }
      return absl::OkStatus();
    case MechanismKind::kRandomizedResponse:
      if (!IsPositiveFinite(rr_epsilon)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "rr_epsilon should be positive and finite, got %g.", rr_epsilon));
      }
      return absl::OkStatus();
    case MechanismKind::kPoissonSubsampled:
      if (!(sampling_prob > 0 && sampling_prob <= 1)) {
        return absl::InvalidArgumentError(absl::StrFormat(
            "sampling_prob should be in (0, 1], got %g.", sampling_prob));
      }
      if (inner == nullptr) {
        return absl::InvalidArgumentError(
            "Poisson subsampling needs an inner mechanism.");
      }
      if (inner->kind == MechanismKind::kPoissonSubsampled) {
        return absl::InvalidArgumentError(
            "nested Poisson subsampling is not supported; the inner "
            "mechanism must be Gaussian, Laplace or randomized response.");
      }
      return inner->Validate();
  }
  return absl::InvalidArgumentError("unknown mechanism kind.");
}

std::string MechanismSpec::DebugString() const {
  switch (kind) {
    case MechanismKind::kGaussian:
      return absl::StrFormat("gaussian(noise_scale=%g)", noise_scale);
    case MechanismKind::kLaplace:
      return absl::StrFormat("laplace(noise_scale=%g)", noise_scale);
    case MechanismKind::kRandomizedResponse:
      return absl::StrFormat("randomized_response(epsilon=%g)", rr_epsilon);
    case MechanismKind::kPoissonSubsampled:
      return absl::StrFormat(
          "poisson_subsampled(%s, sampling_prob=%g, adjacency=%s)",
          inner == nullptr ? "null" : inner->DebugString(), sampling_prob,
          AdjacencyDirectionName(adjacency_direction));
  }
  return "unknown";
}

std::string MechanismKindName(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::kGaussian:
      return "gaussian";
    case MechanismKind::kLaplace:
      return "laplace";
    case MechanismKind::kRandomizedResponse:
      return "randomized_response";
    case MechanismKind::kPoissonSubsampled:
      return "poisson_subsampled";
  }
  return "unknown";
}

std::string AdjacencyDirectionName(AdjacencyDirection direction) {
  switch (direction) {
    case AdjacencyDirection::kAdd:
      return "add";
    case AdjacencyDirection::kRemove:
      return "remove";
    case AdjacencyDirection::kBoth:
      return "both";
  }
  return "unknown";
}

absl::StatusOr<std::unique_ptr<HockeyStickCurve>> CurveFor(
    const MechanismSpec& spec) {
  if (absl::Status status = spec.Validate(); !status.ok()) return status;
  switch (spec.kind) {
    case MechanismKind::kGaussian:
      return std::make_unique<GaussianCurve>(spec.noise_scale);
    case MechanismKind::kLaplace:
      return std::make_unique<LaplaceCurve>(spec.noise_scale);
    case MechanismKind::kRandomizedResponse:
      return std::make_unique<RandomizedResponseCurve>(spec.rr_epsilon);
    case MechanismKind::kPoissonSubsampled:
      break;
  }
  absl::StatusOr<std::unique_ptr<HockeyStickCurve>> inner =
      CurveFor(*spec.inner);
  if (!inner.ok()) return inner.status();
  std::shared_ptr<const HockeyStickCurve> shared_inner = std::move(*inner);
  const double q = spec.sampling_prob;
  switch (spec.adjacency_direction) {
    case AdjacencyDirection::kRemove:
      return std::make_unique<SubsampledRemoveCurve>(shared_inner, q);
    case AdjacencyDirection::kAdd:
      return std::make_unique<SubsampledAddCurve>(shared_inner, q);
    case AdjacencyDirection::kBoth:
      return std::make_unique<MaxCurve>(
          std::make_unique<SubsampledRemoveCurve>(shared_inner, q),
          std::make_unique<SubsampledAddCurve>(shared_inner, q));
  }
  return absl::InvalidArgumentError("unknown adjacency direction.");
}

std::unique_ptr<HockeyStickCurve> IdenticalPairCurve() {
  return std::make_unique<IdenticalCurve>();
}

absl::StatusOr<double> DerivativeAt(const HockeyStickCurve& curve,
                                    double alpha, Side side) {
  if (!(alpha > 0) || std::isinf(alpha)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "derivatives are only defined for alpha in (0, +inf), got ", alpha));
  }
  return curve.Derivative(alpha, side);
}

double StandardNormalCdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

}  // namespace dp_accounting
