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

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <utility>

#include "absl/strings/str_format.h"
#include "internal/compensated_sum.h"

namespace dp_accounting {
namespace internal {

// ConvolveFft without clamping negative round-off.
std::vector<double> ConvolveFftSigned(std::span<const double> a,
                                      std::span<const double> b);

}  // namespace internal

namespace {

constexpr double kDenormalFloor = 1e-300;
// Round-off of an FFT convolution of probability vectors stays within a small
// multiple of machine epsilon times the largest output entry.
constexpr double kFftNoiseFactor = 1e-15;
// kAuto convolves directly up to this many multiply-adds.
constexpr double kDirectConvolutionLimit = 1 << 24;
// exp() overflows beyond about 709.78.
constexpr double kLargestRepresentableEpsilon = 700;

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& PlannerMutex() {
  static std::mutex* mutex = new std::mutex;
  return *mutex;
}

// Smallest 2^a 3^b 5^c at or above n.
size_t FftSize(size_t n) {
  size_t best = std::bit_ceil(n);
  for (size_t p5 = 1; p5 < best; p5 *= 5) {
    for (size_t p35 = p5; p35 < best; p35 *= 3) {
      size_t p = p35;
      while (p < n) p *= 2;
      best = std::min(best, p);
    }
  }
  return best;
}

bool UsesFft(ConvolutionMethod method, size_t a_size, size_t b_size) {
  switch (method) {
    case ConvolutionMethod::kDirect:
      return false;
    case ConvolutionMethod::kFft:
      return true;
    case ConvolutionMethod::kAuto:
      return static_cast<double>(a_size) * static_cast<double>(b_size) >
             kDirectConvolutionLimit;
  }
  return true;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

// Masses on j * interval for j = lowest, lowest + 1, ...
struct LatticeMasses {
  double interval = 0;
  int64_t lowest = 0;
  std::vector<double> finite;
  double infinity = 0;
  double negative_infinity = 0;

  int64_t highest() const {
    return lowest + static_cast<int64_t>(finite.size()) - 1;
  }
};

absl::StatusOr<LatticeMasses> ToLattice(const FinitePld& pld) {
  const std::optional<Lattice>& lattice = pld.grid().lattice();
  if (!lattice.has_value()) {
    return absl::InvalidArgumentError(
        "composition needs distributions on a uniform lattice.");
  }
  std::span<const double> finite = pld.finite_masses();
  return LatticeMasses{lattice->interval, lattice->lowest_index,
                       std::vector<double>(finite.begin(), finite.end()),
                       pld.mass_at_infinity(), pld.mass_at_negative_infinity()};
}

absl::StatusOr<FinitePld> FromLattice(LatticeMasses masses) {
  return FinitePld::CreateOnLattice(
      Lattice{masses.interval, masses.lowest}, std::move(masses.finite),
      masses.infinity, masses.negative_infinity);
}

double Sum(std::span<const double> values) {
  internal::CompensatedSum sum;
  for (double v : values) sum.Add(v);
  return sum.Value();
}

// Moves tail mass off both ends of the finite support, never dropping the
// point epsilon = 0. A tail bin goes if the mass moved so far on its side
// stays within `budget`, if it is below `noise_floor` (where the computed
// value carries no information), or if exp() of its epsilon would overflow.
void Truncate(LatticeMasses& m, double budget, double noise_floor,
              EstimateType direction, TruncationStats& stats) {
  const int64_t zero = -m.lowest;
  const int64_t n = static_cast<int64_t>(m.finite.size());
  const double extreme = kLargestRepresentableEpsilon / m.interval;
  auto removable = [&](int64_t i, double moved) {
    const double mass = m.finite[i];
    return moved + mass <= budget || mass <= noise_floor ||
           std::abs(static_cast<double>(m.lowest + i)) > extreme;
  };
  int64_t first = 0;
  double lower = 0;
  while (first < zero && removable(first, lower)) lower += m.finite[first++];
  int64_t last = n - 1;
  double upper = 0;
  while (last > zero && removable(last, upper)) upper += m.finite[last--];
  if (first == 0 && last == n - 1) return;
  std::vector<double> kept(m.finite.begin() + first,
                           m.finite.begin() + last + 1);
  if (direction == EstimateType::kPessimistic) {
    kept.front() += lower;
    m.infinity += upper;
  } else {
    m.negative_infinity += lower;
    kept.back() += upper;
  }
  m.finite = std::move(kept);
  m.lowest += first;
  stats.lower_tail_mass += lower;
  stats.upper_tail_mass += upper;
}

void ClampNegative(LatticeMasses& m) {
  for (double& mass : m.finite) mass = std::max(0.0, mass);
}

absl::StatusOr<LatticeMasses> Product(const LatticeMasses& a,
                                      const LatticeMasses& b,
                                      const CompositionPolicy& policy,
                                      double budget, TruncationStats& stats) {
  LatticeMasses out;
  out.interval = a.interval;
  out.lowest = a.lowest + b.lowest;
  const bool fft = UsesFft(policy.method, a.finite.size(), b.finite.size());
  // FFT round-off is left signed so that it does not accumulate a bias over
  // repeated products; the caller clamps the final result.
  out.finite = fft ? internal::ConvolveFftSigned(a.finite, b.finite)
                   : ConvolveDirect(a.finite, b.finite);
  double largest = 0;
  for (double& mass : out.finite) {
    if (std::abs(mass) < kDenormalFloor) mass = 0;
    largest = std::max(largest, mass);
  }
  const double noise_floor = fft ? kFftNoiseFactor * largest : 0.0;
  const double a_finite = Sum(a.finite);
  const double b_finite = Sum(b.finite);
  out.negative_infinity = a.negative_infinity + b.negative_infinity -
                          a.negative_infinity * b.negative_infinity;
  out.infinity = a.infinity * b.infinity + a.infinity * b_finite +
                 a_finite * b.infinity;
  Truncate(out, budget, noise_floor, policy.direction, stats);
  if (out.finite.size() > policy.max_support) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "composed distribution needs %d lattice points, more than the "
        "allowed %d.",
        out.finite.size(), policy.max_support));
  }
  return out;
}

absl::Status CheckIntervals(const LatticeMasses& a, const LatticeMasses& b) {
  if (std::abs(a.interval - b.interval) > 1e-12 * a.interval) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "cannot compose distributions with intervals %.17g and %.17g.",
        a.interval, b.interval));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status CompositionPolicy::Validate() const {
  if (!(truncation_tail_mass >= 0) ||
      truncation_tail_mass > kMaxTruncationTailMass) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "truncation tail mass must lie in [0, %g], got %g.",
        kMaxTruncationTailMass, truncation_tail_mass));
  }
  if (max_support == 0) {
    return absl::InvalidArgumentError("max_support must be positive.");
  }
  return absl::OkStatus();
}

std::vector<double> ConvolveDirect(std::span<const double> a,
                                   std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> ConvolveFft(std::span<const double> a,
                                std::span<const double> b) {
  std::vector<double> out = internal::ConvolveFftSigned(a, b);
  for (double& mass : out) mass = std::max(0.0, mass);
  return out;
}

namespace internal {

std::vector<double> ConvolveFftSigned(std::span<const double> a,
                                      std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  const size_t out_size = a.size() + b.size() - 1;
  const size_t n = FftSize(out_size);
  const size_t spectrum = n / 2 + 1;
  std::unique_ptr<double, FftwDeleter> real_a(fftw_alloc_real(n));
  std::unique_ptr<double, FftwDeleter> real_b(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, FftwDeleter> freq_a(
      fftw_alloc_complex(spectrum));
  std::unique_ptr<fftw_complex, FftwDeleter> freq_b(
      fftw_alloc_complex(spectrum));
  fftw_plan forward;
  fftw_plan backward;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    forward = fftw_plan_dft_r2c_1d(static_cast<int>(n), real_a.get(),
                                   freq_a.get(), FFTW_ESTIMATE);
    backward = fftw_plan_dft_c2r_1d(static_cast<int>(n), freq_a.get(),
                                    real_a.get(), FFTW_ESTIMATE);
  }
  std::fill_n(real_a.get(), n, 0.0);
  std::fill_n(real_b.get(), n, 0.0);
  std::copy(a.begin(), a.end(), real_a.get());
  std::copy(b.begin(), b.end(), real_b.get());
  fftw_execute_dft_r2c(forward, real_a.get(), freq_a.get());
  fftw_execute_dft_r2c(forward, real_b.get(), freq_b.get());
  for (size_t i = 0; i < spectrum; ++i) {
    const std::complex<double> x(freq_a.get()[i][0], freq_a.get()[i][1]);
    const std::complex<double> y(freq_b.get()[i][0], freq_b.get()[i][1]);
    const std::complex<double> z = x * y;
    freq_a.get()[i][0] = z.real();
    freq_a.get()[i][1] = z.imag();
  }
  fftw_execute_dft_c2r(backward, freq_a.get(), real_a.get());
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  std::vector<double> out(out_size);
  const double scale = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < out_size; ++i) {
    out[i] = real_a.get()[i] * scale;
  }
  return out;
}

}  // namespace internal

absl::StatusOr<CompositionResult> Convolve(const FinitePld& a,
                                           const FinitePld& b,
                                           const CompositionPolicy& policy) {
  if (absl::Status status = policy.Validate(); !status.ok()) return status;
  absl::StatusOr<LatticeMasses> la = ToLattice(a);
  if (!la.ok()) return la.status();
  absl::StatusOr<LatticeMasses> lb = ToLattice(b);
  if (!lb.ok()) return lb.status();
  if (absl::Status status = CheckIntervals(*la, *lb); !status.ok()) {
    return status;
  }
  TruncationStats stats;
  absl::StatusOr<LatticeMasses> out =
      Product(*la, *lb, policy, policy.truncation_tail_mass, stats);
  if (!out.ok()) return out.status();
  ClampNegative(*out);
  absl::StatusOr<FinitePld> pld = FromLattice(*std::move(out));
  if (!pld.ok()) return pld.status();
  return CompositionResult{*std::move(pld), stats};
}

absl::StatusOr<CompositionResult> SelfCompose(const FinitePld& pld, int64_t n,
                                              const CompositionPolicy& policy) {
  if (absl::Status status = policy.Validate(); !status.ok()) return status;
  if (n < 0) {
    return absl::InvalidArgumentError(
        absl::StrFormat("number of compositions must be >= 0, got %d.", n));
  }
  absl::StatusOr<LatticeMasses> base = ToLattice(pld);
  if (!base.ok()) return base.status();
  if (n == 0) {
    return CompositionResult{FinitePld::PointMassAtZero(base->interval), {}};
  }
  if (n == 1) return CompositionResult{pld, {}};

  // A truncation of the 2^j-fold power reaches the result floor(n / 2^j)
  // times; one applied to the running product reaches it once.
  const uint64_t count = static_cast<uint64_t>(n);
  const int squarings = std::bit_width(count) - 1;
  const int products = std::popcount(count) - 1;
  const double per_event =
      policy.truncation_tail_mass / static_cast<double>(squarings + products);

  TruncationStats stats;
  std::optional<LatticeMasses> result;
  LatticeMasses power = *std::move(base);
  for (int j = 0;; ++j) {
    if ((count >> j) & 1) {
      if (!result.has_value()) {
        result = power;
      } else {
        absl::StatusOr<LatticeMasses> next =
            Product(*result, power, policy, per_event, stats);
        if (!next.ok()) return next.status();
        result = *std::move(next);
      }
    }
    if (j == squarings) break;
    const double multiplicity = static_cast<double>(count >> (j + 1));
    absl::StatusOr<LatticeMasses> squared =
        Product(power, power, policy, per_event / multiplicity, stats);
    if (!squared.ok()) return squared.status();
    power = *std::move(squared);
  }
  ClampNegative(*result);
  absl::StatusOr<FinitePld> out = FromLattice(*std::move(result));
  if (!out.ok()) return out.status();
  return CompositionResult{*std::move(out), stats};
}

}  // namespace dp_accounting
