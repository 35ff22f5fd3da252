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

#include "dp_accounting/composition.h"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "absl/status/status.h"
#include "dp_accounting/accountant.h"
#include "dp_accounting/discretization_grid.h"
#include "dp_accounting/finite_pld.h"
#include "dp_accounting/pessimistic_estimator.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace dp_accounting {
namespace {

using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

const double kLn2 = std::numbers::ln2;

CompositionPolicy Exact(ConvolutionMethod method = ConvolutionMethod::kDirect) {
  return CompositionPolicy{.method = method, .truncation_tail_mass = 0};
}

FinitePld OnLattice(double interval, int64_t lowest,
                    std::vector<double> finite, double infinity = 0) {
  absl::StatusOr<FinitePld> pld = FinitePld::CreateOnLattice(
      Lattice{interval, lowest}, std::move(finite), infinity);
  EXPECT_TRUE(pld.ok()) << pld.status();
  return *std::move(pld);
}

// The pessimistic distribution of randomized response with epsilon = ln 2 on
// the lattice {-ln 2, 0, ln 2}.
FinitePld RandomizedResponsePld() {
  return OnLattice(kLn2, -1, {1.0 / 3, 0, 2.0 / 3});
}

std::vector<double> RandomMasses(size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(0, 1);
  std::vector<double> masses(n);
  double total = 0;
  for (double& m : masses) total += (m = dist(rng));
  for (double& m : masses) m /= total;
  return masses;
}

double L1Distance(const std::vector<double>& a, const std::vector<double>& b) {
  EXPECT_EQ(a.size(), b.size());
  double total = 0;
  for (size_t i = 0; i < a.size() && i < b.size(); ++i) {
    total += std::abs(a[i] - b[i]);
  }
  return total;
}

std::vector<double> Masses(const FinitePld& pld) {
  return std::vector<double>(pld.masses().begin(), pld.masses().end());
}

TEST(ConvolveTest, RandomizedResponseTwoFold) {
  const FinitePld rr = RandomizedResponsePld();
  absl::StatusOr<CompositionResult> composed = Convolve(rr, rr, Exact());
  ASSERT_TRUE(composed.ok()) << composed.status();
  const FinitePld& pld = composed->pld;
  ASSERT_TRUE(pld.grid().lattice().has_value());
  EXPECT_EQ(pld.grid().lattice()->lowest_index, -2);
  EXPECT_THAT(std::vector<double>(pld.finite_masses().begin(),
                                  pld.finite_masses().end()),
              ElementsAre(DoubleNear(1.0 / 9, 1e-15), 0.0,
                          DoubleNear(4.0 / 9, 1e-15), 0.0,
                          DoubleNear(4.0 / 9, 1e-15)));
  EXPECT_EQ(pld.mass_at_infinity(), 0);
  EXPECT_NEAR(DeltaAt(pld, 0), 1.0 / 3, 1e-15);

  // The product pair of randomized response, enumerated outcome by outcome.
  const std::vector<double> a = {4.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9};
  const std::vector<double> b = {1.0 / 9, 2.0 / 9, 2.0 / 9, 4.0 / 9};
  for (double epsilon : {-2 * kLn2, -kLn2, 0.0, 0.5, kLn2, 1.0, 2 * kLn2}) {
    EXPECT_NEAR(DeltaAt(pld, epsilon),
                oracles::DiscreteHockeyStick(a, b, std::exp(epsilon)), 1e-15)
        << epsilon;
  }
}

TEST(ConvolveTest, PointMassAtZeroIsIdentity) {
  std::mt19937_64 rng(3);
  const FinitePld pld = OnLattice(0.1, -7, RandomMasses(20, rng));
  absl::StatusOr<CompositionResult> composed =
      Convolve(pld, FinitePld::PointMassAtZero(0.1), Exact());
  ASSERT_TRUE(composed.ok()) << composed.status();
  EXPECT_EQ(composed->pld.grid().lattice()->lowest_index, -7);
  EXPECT_EQ(Masses(composed->pld), Masses(pld));
}

TEST(ConvolveTest, MassAtInfinityCombines) {
  const FinitePld a = OnLattice(0.5, 0, {0.9}, 0.1);
  const FinitePld b = OnLattice(0.5, -1, {0.3, 0.5}, 0.2);
  absl::StatusOr<CompositionResult> composed = Convolve(a, b, Exact());
  ASSERT_TRUE(composed.ok()) << composed.status();
  EXPECT_NEAR(composed->pld.mass_at_infinity(), 0.28, 1e-15);
  EXPECT_NEAR(composed->pld.total_mass(), 1, 1e-15);
}

TEST(ConvolveTest, RejectsMismatchedIntervals) {
  absl::StatusOr<CompositionResult> composed =
      Convolve(OnLattice(0.1, 0, {1}), OnLattice(0.2, 0, {1}), Exact());
  EXPECT_EQ(composed.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(composed.status().message(), HasSubstr("interval"));
}

TEST(ConvolveTest, RejectsNonUniformGrid) {
  absl::StatusOr<DiscretizationGrid> grid =
      DiscretizationGrid::FromAlphas({0, 0.5, 1, 3, kInfinity});
  ASSERT_TRUE(grid.ok());
  absl::StatusOr<FinitePld> pld =
      FinitePld::Create(*grid, {0, 0.2, 0.3, 0.5, 0});
  ASSERT_TRUE(pld.ok());
  EXPECT_EQ(Convolve(*pld, *pld, Exact()).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ConvolveTest, MaxSupportIsEnforced) {
  std::mt19937_64 rng(5);
  const FinitePld pld = OnLattice(0.1, -5, RandomMasses(11, rng));
  CompositionPolicy policy = Exact();
  policy.max_support = 20;
  EXPECT_EQ(Convolve(pld, pld, policy).status().code(),
            absl::StatusCode::kResourceExhausted);
  policy.max_support = 21;
  EXPECT_TRUE(Convolve(pld, pld, policy).ok());
}

TEST(ConvolveTest, FftMatchesDirect) {
  std::mt19937_64 rng(7);
  for (size_t n : {1, 2, 3, 17, 100, 257, 1000, 4096}) {
    const std::vector<double> a = RandomMasses(n, rng);
    const std::vector<double> b = RandomMasses(n / 2 + 1, rng);
    EXPECT_LE(L1Distance(ConvolveFft(a, b), ConvolveDirect(a, b)), 1e-10)
        << n;
  }
}

TEST(ConvolveTest, FftOutputIsNonNegative) {
  std::mt19937_64 rng(11);
  std::vector<double> a = RandomMasses(4096, rng);
  for (size_t i = 0; i < a.size(); i += 2) a[i] = 0;
  for (double m : ConvolveFft(a, a)) EXPECT_GE(m, 0);
}

TEST(ConvolveTest, CommutativeAndAssociative) {
  std::mt19937_64 rng(13);
  const FinitePld a = OnLattice(0.01, -40, RandomMasses(300, rng), 0);
  const FinitePld b = OnLattice(0.01, -3, RandomMasses(90, rng), 0);
  const FinitePld c = OnLattice(0.01, -250, RandomMasses(500, rng), 0);
  for (ConvolutionMethod method :
       {ConvolutionMethod::kDirect, ConvolutionMethod::kFft}) {
    const CompositionPolicy policy = Exact(method);
    const FinitePld ab = Convolve(a, b, policy)->pld;
    const FinitePld ba = Convolve(b, a, policy)->pld;
    EXPECT_LE(L1Distance(Masses(ab), Masses(ba)), 1e-11);
    const FinitePld left = Convolve(ab, c, policy)->pld;
    const FinitePld right = Convolve(a, Convolve(b, c, policy)->pld, policy)->pld;
    EXPECT_EQ(left.grid().lattice()->lowest_index,
              right.grid().lattice()->lowest_index);
    EXPECT_LE(L1Distance(Masses(left), Masses(right)), 1e-11);
  }
}

TEST(SelfComposeTest, SmallCounts) {
  const FinitePld rr = RandomizedResponsePld();
  absl::StatusOr<CompositionResult> zero = SelfCompose(rr, 0, Exact());
  ASSERT_TRUE(zero.ok());
  EXPECT_THAT(Masses(zero->pld), ElementsAre(0.0, 1.0, 0.0));
  EXPECT_EQ(zero->pld.grid().epsilon(1), 0);

  absl::StatusOr<CompositionResult> one = SelfCompose(rr, 1, Exact());
  ASSERT_TRUE(one.ok());
  EXPECT_EQ(Masses(one->pld), Masses(rr));

  absl::StatusOr<CompositionResult> two = SelfCompose(rr, 2, Exact());
  ASSERT_TRUE(two.ok());
  EXPECT_EQ(Masses(two->pld), Masses(Convolve(rr, rr, Exact())->pld));

  EXPECT_EQ(SelfCompose(rr, -1, Exact()).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(SelfComposeTest, MatchesRepeatedConvolution) {
  std::mt19937_64 rng(17);
  std::vector<double> finite = RandomMasses(13, rng);
  for (double& m : finite) m *= 0.999;
  const FinitePld pld = OnLattice(0.2, -6, std::move(finite), 1e-3);
  for (int64_t n : {3, 5, 6, 11}) {
    FinitePld expected = pld;
    for (int64_t i = 1; i < n; ++i) {
      expected = Convolve(expected, pld, Exact())->pld;
    }
    absl::StatusOr<CompositionResult> composed = SelfCompose(pld, n, Exact());
    ASSERT_TRUE(composed.ok()) << composed.status();
    EXPECT_EQ(composed->pld.grid().lattice()->lowest_index, -6 * n);
    EXPECT_LE(L1Distance(Masses(composed->pld), Masses(expected)), 1e-13)
        << n;
  }
}

TEST(SelfComposeTest, RandomizedResponseBinomial) {
  // L is ln 2 times (2 X - n) for X ~ Binomial(n, 2/3).
  const int64_t n = 10;
  absl::StatusOr<CompositionResult> composed =
      SelfCompose(RandomizedResponsePld(), n, Exact());
  ASSERT_TRUE(composed.ok()) << composed.status();
  std::span<const double> finite = composed->pld.finite_masses();
  ASSERT_EQ(finite.size(), 2 * n + 1);
  double binomial = std::pow(1.0 / 3, n);
  for (int64_t x = 0; x <= n; ++x) {
    EXPECT_NEAR(finite[2 * x], binomial, 1e-15) << x;
    if (x < n) {
      EXPECT_EQ(finite[2 * x + 1], 0);
      binomial *= 2.0 * static_cast<double>(n - x) / static_cast<double>(x + 1);
    }
  }
}

class TruncationTest : public ::testing::TestWithParam<ConvolutionMethod> {
 protected:
  static FinitePld GaussianPld() {
    auto curve = CurveFor(MechanismSpec::Gaussian(2.0));
    auto grid = BuildGrid(**curve, {.discretization = 0.02,
                                    .epsilon_range = std::nullopt});
    return *PldOf(*PessimisticPair(**curve, *grid));
  }
};

TEST_P(TruncationTest, PessimisticNeverDecreasesDelta) {
  const FinitePld pld = GaussianPld();
  const CompositionPolicy exact = Exact(GetParam());
  CompositionPolicy truncated = exact;
  truncated.truncation_tail_mass = 1e-8;
  const FinitePld reference = SelfCompose(pld, 20, exact)->pld;
  absl::StatusOr<CompositionResult> result = SelfCompose(pld, 20, truncated);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_LT(result->pld.finite_masses().size(),
            reference.finite_masses().size());
  EXPECT_EQ(result->pld.mass_at_negative_infinity(), 0);
  EXPECT_NEAR(result->pld.total_mass(), 1, 1e-12);
  if (GetParam() == ConvolutionMethod::kDirect) {
    EXPECT_LE(result->truncation.lower_tail_mass, 1e-8);
    EXPECT_LE(result->truncation.upper_tail_mass, 1e-8);
  }
  for (double epsilon = -5; epsilon <= 15; epsilon += 0.25) {
    EXPECT_GE(DeltaAt(result->pld, epsilon),
              DeltaAt(reference, epsilon) - 1e-14)
        << epsilon;
  }
}

TEST_P(TruncationTest, OptimisticNeverIncreasesDelta) {
  const FinitePld pld = GaussianPld();
  const CompositionPolicy exact = Exact(GetParam());
  CompositionPolicy truncated = exact;
  truncated.truncation_tail_mass = 1e-8;
  truncated.direction = EstimateType::kOptimistic;
  const FinitePld reference = SelfCompose(pld, 20, exact)->pld;
  absl::StatusOr<CompositionResult> result = SelfCompose(pld, 20, truncated);
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_LE(result->pld.mass_at_infinity(),
            reference.mass_at_infinity() * (1 + 1e-12));
  EXPECT_NEAR(result->pld.total_mass(), 1, 1e-12);
  for (double epsilon = -5; epsilon <= 15; epsilon += 0.25) {
    EXPECT_LE(DeltaAt(result->pld, epsilon),
              DeltaAt(reference, epsilon) + 1e-14)
        << epsilon;
  }
}

INSTANTIATE_TEST_SUITE_P(Methods, TruncationTest,
                         ::testing::Values(ConvolutionMethod::kDirect,
                                           ConvolutionMethod::kFft),
                         [](const auto& info) {
                           return info.param == ConvolutionMethod::kDirect
                                      ? std::string("Direct")
                                      : std::string("Fft");
                         });

TEST(SelfComposeTest, LargeCountConservesMass) {
  auto curve = CurveFor(MechanismSpec::Gaussian(20.0));
  auto grid = BuildGrid(**curve, {.discretization = 0.005,
                                  .epsilon_range = std::nullopt});
  const FinitePld pld = *PldOf(*PessimisticPair(**curve, *grid));
  absl::StatusOr<CompositionResult> result =
      SelfCompose(pld, 1000, CompositionPolicy{});
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_NEAR(result->pld.total_mass(), 1, 1e-12);
  EXPECT_EQ(result->pld.mass_at_negative_infinity(), 0);
  for (double m : result->pld.masses()) EXPECT_GE(m, 0);
}

TEST(CompositionPolicyTest, Validate) {
  EXPECT_TRUE(CompositionPolicy{}.Validate().ok());
  EXPECT_TRUE(
      CompositionPolicy{.truncation_tail_mass = kMaxTruncationTailMass}
          .Validate()
          .ok());
  EXPECT_FALSE(CompositionPolicy{.truncation_tail_mass = 2e-6}.Validate().ok());
  EXPECT_FALSE(CompositionPolicy{.truncation_tail_mass = -1}.Validate().ok());
  EXPECT_FALSE(
      CompositionPolicy{.truncation_tail_mass = std::nan("")}.Validate().ok());
  EXPECT_FALSE(CompositionPolicy{.max_support = 0}.Validate().ok());
  const FinitePld rr = RandomizedResponsePld();
  EXPECT_EQ(SelfCompose(rr, 4, {.truncation_tail_mass = 1}).status().code(),
            absl::StatusCode::kInvalidArgument);
}

}  // namespace
}  // namespace dp_accounting
