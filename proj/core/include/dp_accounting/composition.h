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


// Composition of privacy loss distributions on a common epsilon lattice.

#ifndef DP_ACCOUNTING_COMPOSITION_H_
#define DP_ACCOUNTING_COMPOSITION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dp_accounting/common.h"
#include "dp_accounting/finite_pld.h"

namespace dp_accounting {

enum class ConvolutionMethod {
  kDirect,
  kFft,
  // Direct for small products, FFT otherwise.
  kAuto,
};

inline constexpr double kMaxTruncationTailMass = 1e-6;

struct CompositionPolicy {
  // Pessimistic truncation only moves mass towards larger privacy loss,
  // optimistic truncation only towards smaller.
  EstimateType direction = EstimateType::kPessimistic;
  ConvolutionMethod method = ConvolutionMethod::kAuto;
  // Mass that may be moved off each tail over a whole composition.
  double truncation_tail_mass = 1e-15;
  // Largest number of finite lattice points a result may have.
  size_t max_support = size_t{1} << 24;

  absl::Status Validate() const;
};

struct TruncationStats {
  double lower_tail_mass = 0;
  double upper_tail_mass = 0;
};

struct CompositionResult {
  FinitePld pld;
  TruncationStats truncation;
};

// Linear convolution of two mass vectors.
std::vector<double> ConvolveDirect(std::span<const double> a,
                                   std::span<const double> b);
// Same via a zero-padded real FFT. Negative round-off is clamped to zero.
std::vector<double> ConvolveFft(std::span<const double> a,
                                std::span<const double> b);

// The distribution of L_a + L_b. Both inputs must live on lattices with the
// same interval. Mass at +inf absorbs finite mass, mass at -inf absorbs
// everything.
absl::StatusOr<CompositionResult> Convolve(const FinitePld& a,
                                           const FinitePld& b,
                                           const CompositionPolicy& policy);

// The n-fold convolution of `pld` with itself by repeated squaring. The
// truncation budget is split over the products so that the total moved mass
// per side stays below policy.truncation_tail_mass. n = 0 gives the point
// mass at 0.
absl::StatusOr<CompositionResult> SelfCompose(const FinitePld& pld, int64_t n,
                                              const CompositionPolicy& policy);

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_COMPOSITION_H_
