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

// Runs the acceptance criteria and prints one PASS or FAIL line for each.
// The exit status is non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dp_accounting/accountant.h"
#include "dp_accounting/composition.h"
#include "dp_accounting/discretization_grid.h"
#include "dp_accounting/finite_pld.h"
#include "dp_accounting/mechanism_curves.h"
#include "dp_accounting/optimistic_estimator.h"
#include "dp_accounting/pessimistic_estimator.h"
#include "oracles.h"
#include "test_cases.h"

namespace dp_accounting {
namespace {

const double kLn2 = std::numbers::ln2;

// Collects the first few violations of a criterion.
class Findings {
 public:
  void Fail(std::string message) {
    ++count_;
    if (count_ <= 3) messages_.push_back(std::move(message));
  }
  void Check(bool ok, const std::function<std::string()>& message) {
    if (!ok) Fail(message());
  }
  void CheckStatus(const absl::Status& status, const std::string& context) {
    if (!status.ok()) Fail(absl::StrCat(context, ": ", status.ToString()));
  }
  bool ok() const { return count_ == 0; }
  std::string Summary() const {
    std::string out = absl::StrCat(count_, " violation(s)");
    for (const std::string& m : messages_) absl::StrAppend(&out, "; ", m);
    return out;
  }

 private:
  int count_ = 0;
  std::vector<std::string> messages_;
};

struct Outcome {
  bool passed;
  std::string detail;
};

Outcome Finish(const Findings& findings, std::string detail) {
  if (findings.ok()) return {true, std::move(detail)};
  return {false, absl::StrCat(findings.Summary(), " (", detail, ")")};
}

std::vector<double> Masses(const FinitePld& pld) {
  return std::vector<double>(pld.masses().begin(), pld.masses().end());
}

// 1. Both estimates are exact for randomized response when the grid contains
// its kinks.
Outcome RandomizedResponseExactness() {
  Findings findings;
  double worst = 0;
  for (const double epsilon : {kLn2, 0.1, 1.0, 3.0}) {
    auto curve = CurveFor(MechanismSpec::RandomizedResponse(epsilon));
    absl::StatusOr<DiscretizationGrid> grid =
        DiscretizationGrid::Uniform(epsilon, -1, 1);
    if (!curve.ok() || !grid.ok()) {
      findings.Fail("setup failed");
      continue;
    }
    const double e = std::exp(epsilon);
    const std::vector<double> exact = {0, 1 / (e + 1), 0, e / (e + 1), 0};
    const double exact_delta = (e - 1) / (e + 1);
    absl::StatusOr<DiscreteDominatingPair> pessimistic =
        PessimisticPair(**curve, *grid);
    absl::StatusOr<DiscreteDominatingPair> optimistic =
        OptimisticPair(**curve, *grid);
    findings.CheckStatus(pessimistic.status(), "pessimistic");
    findings.CheckStatus(optimistic.status(), "optimistic");
    if (!pessimistic.ok() || !optimistic.ok()) continue;
    for (const DiscreteDominatingPair* pair : {&*pessimistic, &*optimistic}) {
      absl::StatusOr<FinitePld> pld = PldOf(*pair);
      findings.CheckStatus(pld.status(), "pld");
      if (!pld.ok()) continue;
      const std::vector<double> masses = Masses(*pld);
      for (size_t i = 0; i < exact.size(); ++i) {
        worst = std::max(worst, std::abs(masses[i] - exact[i]));
      }
      const double delta = DeltaAt(*pld, 0);
      worst = std::max(worst, std::abs(delta - exact_delta));
      if (epsilon == kLn2) worst = std::max(worst, std::abs(delta - 1.0 / 3));
      findings.Check(pair->clamp_events == 0,
                     [] { return std::string("clamp events"); });
    }
  }
  findings.Check(worst <= 1e-12, [&] {
    return absl::StrFormat("largest error %.3g > 1e-12", worst);
  });
  return Finish(findings, absl::StrFormat("largest error %.3g", worst));
}

// Shared by criteria 2 and 9.
Outcome GaussianSandwich(double delta, bool check_width) {
  Findings findings;
  double widest = 0;
  int64_t widest_n = 0;
  double widest_exact = 0;
  for (int64_t n = 100; n <= 1000; n += 100) {
    AccountingRequest request;
    request.mechanism = MechanismSpec::Gaussian(80);
    request.compositions = n;
    request.delta_target = delta;
    request.grid.discretization = 0.005;
    absl::StatusOr<PrivacyBoundReport> report = ComputeBounds(request);
    findings.CheckStatus(report.status(), absl::StrCat("n=", n));
    if (!report.ok()) continue;
    const double exact = oracles::GaussianEpsilon(80, n, delta);
    const double low = report->optimistic->value;
    const double high = report->pessimistic->value;
    findings.Check(low <= exact && exact <= high, [&] {
      return absl::StrFormat("n=%d: %.9g <= %.9g <= %.9g fails", n, low,
                             exact, high);
    });
    findings.Check(report->pessimistic->clamp_events == 0 &&
                       report->optimistic->clamp_events == 0,
                   [&] { return absl::StrCat("n=", n, ": clamp events"); });
    const double width = (high - low) / exact;
    if (width > widest) {
      widest = width;
      widest_n = n;
      widest_exact = exact;
    }
    if (check_width) {
      findings.Check(width <= 0.05, [&] {
        return absl::StrFormat(
            "n=%d: relative width %.4f > 0.05 (eps in [%.6g, %.6g], exact "
            "%.6g)",
            n, width, low, high, exact);
      });
    }
    if (delta < 1e-6) {
      // The composed distributions themselves.
      auto curve = CurveFor(request.mechanism);
      auto grid = BuildGrid(**curve, request.grid);
      for (EstimateType type :
           {EstimateType::kPessimistic, EstimateType::kOptimistic}) {
        absl::StatusOr<DiscreteDominatingPair> pair =
            type == EstimateType::kPessimistic
                ? PessimisticPair(**curve, *grid)
                : OptimisticPair(**curve, *grid);
        if (!pair.ok()) {
          findings.CheckStatus(pair.status(), "pair");
          continue;
        }
        absl::StatusOr<CompositionResult> composed =
            SelfCompose(*PldOf(*pair), n, {.direction = type});
        if (!composed.ok()) {
          findings.CheckStatus(composed.status(), "composition");
          continue;
        }
        for (double m : composed->pld.masses()) {
          findings.Check(m >= 0, [&] {
            return absl::StrFormat("n=%d: negative mass %g", n, m);
          });
        }
        findings.Check(std::abs(composed->pld.total_mass() - 1) <= 1e-12,
                       [&] { return absl::StrCat("n=", n, ": mass drift"); });
      }
    }
  }
  return Finish(findings,
                absl::StrFormat("widest relative bracket %.4f at n=%d, exact "
                                "eps %.6g",
                                widest, widest_n, widest_exact));
}

// 3. Connect-the-dots never exceeds the Privacy Buckets pessimistic delta.
Outcome DominanceOverPrivacyBuckets() {
  Findings findings;
  double worst = -1;
  for (const test_cases::GridCase& c : test_cases::StandardGridCases()) {
    absl::StatusOr<test_cases::CurveAndGrid> cg = test_cases::Build(c);
    findings.CheckStatus(cg.status(), c.name());
    if (!cg.ok()) continue;
    absl::StatusOr<DiscreteDominatingPair> pair =
        PessimisticPair(*cg->curve, cg->grid);
    absl::StatusOr<FinitePld> pb = PbPessimisticPld(*cg->curve, cg->grid);
    findings.CheckStatus(pair.status(), c.name());
    findings.CheckStatus(pb.status(), c.name());
    if (!pair.ok() || !pb.ok()) continue;
    const FinitePld ctd = *PldOf(*pair);
    const double low = cg->grid.epsilon(1) - 0.5;
    const double high = cg->grid.epsilon(cg->grid.last_finite_index()) + 0.5;
    for (int j = 0; j < 200; ++j) {
      const double epsilon = low + (high - low) * j / 199.0;
      const double excess = DeltaAt(ctd, epsilon) - DeltaAt(*pb, epsilon);
      worst = std::max(worst, excess);
      findings.Check(excess <= 1e-12, [&] {
        return absl::StrFormat("%s at eps %g: excess %g", c.name(), epsilon,
                               excess);
      });
    }
  }
  return Finish(findings,
                absl::StrFormat("largest delta excess %.3g over 12 cases",
                                worst));
}

// 4. Candidate bounds, hull validity and domination by the true curve.
Outcome OptimisticValidity() {
  Findings findings;
  double worst = -1;
  std::mt19937_64 rng(4);
  for (const test_cases::GridCase& c : test_cases::StandardGridCases()) {
    absl::StatusOr<test_cases::CurveAndGrid> cg = test_cases::Build(c);
    findings.CheckStatus(cg.status(), c.name());
    if (!cg.ok()) continue;
    const HockeyStickCurve& curve = *cg->curve;
    const DiscretizationGrid& grid = cg->grid;
    absl::StatusOr<CandidateSet> candidates = ComputeCandidates(curve, grid);
    findings.CheckStatus(candidates.status(), c.name());
    if (!candidates.ok()) continue;
    const size_t k = grid.size() - 1;
    for (size_t i = 0; i < k; ++i) {
      const double alpha = grid.alpha(i);
      const double h = curve.Evaluate(alpha);
      if (i <= candidates->index_of_one) {
        const double f = candidates->forward[i];
        findings.Check(f >= 1 - alpha - 1e-12 && f <= h + 1e-12, [&] {
          return absl::StrFormat("%s: forward candidate %d = %.17g, h = %.17g",
                                 c.name(), i, f, h);
        });
      }
      if (i >= candidates->index_of_one) {
        const double b = candidates->backward[i - candidates->index_of_one];
        findings.Check(b >= -1e-12 && b <= h + 1e-12, [&] {
          return absl::StrFormat(
              "%s: backward candidate %d = %.17g, h = %.17g", c.name(), i, b,
              h);
        });
      }
    }
    absl::StatusOr<DiscreteDominatingPair> pair = OptimisticPair(curve, grid);
    findings.CheckStatus(pair.status(), c.name());
    if (!pair.ok()) continue;
    findings.CheckStatus(ValidatePair(*pair), c.name());
    findings.Check(pair->clamp_events == 0, [&] {
      return absl::StrCat(c.name(), ": ", pair->clamp_events,
                          " clamp events");
    });
    const auto estimate = CurveOf(*pair);
    findings.Check(std::abs(estimate->Evaluate(0) - 1) <= 1e-12,
                   [&] { return absl::StrCat(c.name(), ": h(0) != 1"); });
    for (double alpha : test_cases::RandomAlphas(grid, 1000, rng)) {
      const double excess = estimate->Evaluate(alpha) - curve.Evaluate(alpha);
      worst = std::max(worst, excess);
      findings.Check(excess <= 1e-12, [&] {
        return absl::StrFormat("%s at alpha %g: excess %g", c.name(), alpha,
                               excess);
      });
      findings.Check(estimate->Evaluate(alpha) >=
                         std::max(0.0, 1 - alpha) - 1e-12,
                     [&] { return absl::StrCat(c.name(), ": below hinge"); });
    }
  }
  return Finish(findings,
                absl::StrFormat("largest excess over the true curve %.3g",
                                worst));
}

// 5. Round trip of random grid curves through the pair construction.
Outcome RoundTrip() {
  Findings findings;
  std::mt19937_64 rng(5);
  double worst_h = 0;
  double worst_sum = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const oracles::RandomGridCurve input = oracles::MakeRandomGridCurve(rng);
    absl::StatusOr<DiscretizationGrid> grid =
        DiscretizationGrid::FromAlphas(input.alphas);
    findings.CheckStatus(grid.status(), "grid");
    if (!grid.ok()) continue;
    absl::StatusOr<DiscreteDominatingPair> pair =
        DiscretizeFromCurve(input.h, *grid);
    findings.CheckStatus(pair.status(), absl::StrCat("trial ", trial));
    if (!pair.ok()) continue;
    const size_t k = grid->size() - 1;
    double p_sum = 0;
    double q_sum = 0;
    for (size_t i = 0; i <= k; ++i) {
      if (i < k) {
        findings.Check(pair->p_masses[i] == grid->alpha(i) * pair->q_masses[i],
                       [&] { return absl::StrCat("trial ", trial, ": P1"); });
      }
      findings.Check(pair->p_masses[i] >= 0 && pair->q_masses[i] >= 0,
                     [&] { return absl::StrCat("trial ", trial, ": sign"); });
      p_sum += pair->p_masses[i];
      q_sum += pair->q_masses[i];
    }
    findings.Check(pair->q_masses[k] == 0,
                   [&] { return absl::StrCat("trial ", trial, ": P2"); });
    worst_sum = std::max({worst_sum, std::abs(p_sum - 1), std::abs(q_sum - 1)});
    const auto curve = CurveOf(*pair);
    for (size_t i = 0; i < k; ++i) {
      worst_h = std::max(worst_h,
                         std::abs(curve->Evaluate(grid->alpha(i)) - input.h[i]));
    }
    worst_h = std::max(worst_h,
                       std::abs(curve->ValueAtInfinity() - input.h[k]));
  }
  findings.Check(worst_h <= 1e-12, [&] {
    return absl::StrFormat("curve error %.3g > 1e-12", worst_h);
  });
  findings.Check(worst_sum <= 1e-12, [&] {
    return absl::StrFormat("mass error %.3g > 1e-12", worst_sum);
  });
  return Finish(findings,
                absl::StrFormat("1000 curves, curve error %.3g, mass error "
                                "%.3g",
                                worst_h, worst_sum));
}

// 6. FFT against direct convolution, and two-fold randomized response.
Outcome ConvolutionEquivalence() {
  Findings findings;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0, 1);
  std::uniform_int_distribution<size_t> size_dist(1, 4096);
  auto random_masses = [&](size_t n) {
    std::vector<double> masses(n);
    double total = 0;
    for (double& m : masses) total += (m = unit(rng) < 0.3 ? 0 : unit(rng));
    for (double& m : masses) m = total > 0 ? m / total : 1.0 / n;
    return masses;
  };
  double worst = 0;
  std::vector<size_t> sizes = {1, 4096};
  for (int i = 0; i < 40; ++i) sizes.push_back(size_dist(rng));
  for (size_t n : sizes) {
    const std::vector<double> a = random_masses(n);
    const std::vector<double> b = random_masses(size_dist(rng));
    const std::vector<double> fft = ConvolveFft(a, b);
    const std::vector<double> direct = ConvolveDirect(a, b);
    double l1 = 0;
    for (size_t i = 0; i < direct.size(); ++i) {
      l1 += std::abs(fft[i] - direct[i]);
    }
    worst = std::max(worst, l1);
  }
  findings.Check(worst <= 1e-10, [&] {
    return absl::StrFormat("L1 distance %.3g > 1e-10", worst);
  });

  absl::StatusOr<FinitePld> rr = FinitePld::CreateOnLattice(
      Lattice{kLn2, -1}, {1.0 / 3, 0, 2.0 / 3}, 0);
  double rr_error = 1;
  for (ConvolutionMethod method :
       {ConvolutionMethod::kDirect, ConvolutionMethod::kFft}) {
    absl::StatusOr<CompositionResult> two =
        Convolve(*rr, *rr, {.method = method, .truncation_tail_mass = 0});
    findings.CheckStatus(two.status(), "two-fold");
    if (!two.ok()) continue;
    // Product of randomized response with itself, outcome by outcome.
    const double enumerated = oracles::DiscreteHockeyStick(
        {4.0 / 9, 2.0 / 9, 2.0 / 9, 1.0 / 9},
        {1.0 / 9, 2.0 / 9, 2.0 / 9, 4.0 / 9}, 1);
    rr_error = std::max({std::abs(DeltaAt(two->pld, 0) - enumerated),
                         std::abs(enumerated - 1.0 / 3)});
    findings.Check(rr_error <= 1e-12, [&] {
      return absl::StrFormat("two-fold delta(0) error %.3g", rr_error);
    });
  }
  return Finish(findings,
                absl::StrFormat("largest L1 %.3g over %d pairs, two-fold "
                                "delta(0) error %.3g",
                                worst, sizes.size(), rr_error));
}

// 7. Two optimistic pairs below randomized response that do not dominate
// each other.
Outcome NonUniqueness() {
  Findings findings;
  absl::StatusOr<NonUniquenessFixture> fixture =
      MakeNonUniquenessFixture(kLn2, 0.1);
  if (!fixture.ok()) {
    findings.CheckStatus(fixture.status(), "fixture");
    return Finish(findings, "no fixture");
  }
  const auto first = CurveOf(fixture->first);
  const auto second = CurveOf(fixture->second);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> log_alpha(-3, 3);
  for (int i = 0; i < 500; ++i) {
    const double alpha = std::exp(log_alpha(rng));
    const double rr = oracles::RandomizedResponseHockeyStick(kLn2, alpha);
    findings.Check(first->Evaluate(alpha) <= rr + 1e-12 &&
                       second->Evaluate(alpha) <= rr + 1e-12,
                   [&] { return absl::StrFormat("not below at %g", alpha); });
  }
  const double a1 = fixture->alpha1;
  const double a2 = fixture->alpha2;
  const double first_1 = first->Evaluate(a1);
  const double second_1 = second->Evaluate(a1);
  const double first_2 = first->Evaluate(a2);
  const double second_2 = second->Evaluate(a2);
  findings.Check(first_1 > second_1, [&] {
    return absl::StrFormat("no witness at alpha_1 = %g", a1);
  });
  findings.Check(second_2 > first_2, [&] {
    return absl::StrFormat("no witness at alpha_2 = %g", a2);
  });
  return Finish(
      findings,
      absl::StrFormat("h1(%.3g) = %.6f > h2 = %.6f, h2(%.3g) = %.6f > h1 = "
                      "%.6f",
                      a1, first_1, second_1, a2, second_2, first_2));
}

// 8. The subsampled Gaussian sweep with the Privacy Buckets baseline.
Outcome SubsampledGaussianSweep() {
  Findings findings;
  absl::StatusOr<Preset> preset = FindPreset("subsampled-gaussian");
  if (!preset.ok()) {
    findings.CheckStatus(preset.status(), "preset");
    return Finish(findings, "no preset");
  }
  absl::StatusOr<std::vector<SweepRow>> rows =
      Sweep(preset->request, preset->compositions);
  if (!rows.ok()) {
    findings.CheckStatus(rows.status(), "sweep");
    return Finish(findings, "no rows");
  }
  for (size_t i = 0; i < rows->size(); ++i) {
    const PrivacyBoundReport& r = (*rows)[i].report;
    const int64_t n = r.request.compositions;
    findings.Check(r.pessimistic->value >= r.optimistic->value, [&] {
      return absl::StrCat("n=", n, ": pessimistic below optimistic");
    });
    findings.Check(r.pb_pessimistic->value >= r.pessimistic->value - 1e-12 &&
                       r.pb_optimistic->value <= r.optimistic->value + 1e-12,
                   [&] { return absl::StrCat("n=", n, ": baseline order"); });
    if (i > 0) {
      const PrivacyBoundReport& prev = (*rows)[i - 1].report;
      findings.Check(r.pessimistic->value >= prev.pessimistic->value &&
                         r.optimistic->value >= prev.optimistic->value,
                     [&] { return absl::StrCat("n=", n, ": not monotone"); });
    }
  }
  const PrivacyBoundReport& last = rows->back().report;
  return Finish(findings,
                absl::StrFormat("%d rows, n=%d: eps in [%.6g, %.6g], PB "
                                "[%.6g, %.6g]",
                                rows->size(), last.request.compositions,
                                last.optimistic->value,
                                last.pessimistic->value,
                                last.pb_optimistic->value,
                                last.pb_pessimistic->value));
}

struct Criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

int RunAll() {
  const std::vector<Criterion> criteria = {
      {1, "randomized response exactness", 1, RandomizedResponseExactness},
      {2, "Gaussian sandwich", 60, [] { return GaussianSandwich(1e-5, true); }},
      {3, "dominance over Privacy Buckets", 30, DominanceOverPrivacyBuckets},
      {4, "optimistic estimate validity", 30, OptimisticValidity},
      {5, "pair construction round trip", 60, RoundTrip},
      {6, "convolution equivalence", 60, ConvolutionEquivalence},
      {7, "non-uniqueness of optimistic estimates", 60, NonUniqueness},
      {8, "subsampled Gaussian sweep", 120, SubsampledGaussianSweep},
      {9, "numerical drift at delta = 1e-12", 60,
       [] { return GaussianSandwich(1e-12, false); }},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome = c.run();
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    if (seconds > c.budget_seconds) {
      outcome.passed = false;
      outcome.detail += absl::StrFormat("; over the %g s budget", c.budget_seconds);
    }
    if (!outcome.passed) ++failures;
    std::printf("%s criterion %d: %s [%.3f s] %s\n",
                outcome.passed ? "PASS" : "FAIL", c.number, c.name.c_str(),
                seconds, outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}

}  // namespace
}  // namespace dp_accounting

int main() { return dp_accounting::RunAll(); }
