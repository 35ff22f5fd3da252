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

#ifndef DP_ACCOUNTING_COMMON_H_
#define DP_ACCOUNTING_COMMON_H_

#include <limits>

namespace dp_accounting {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Slack allowed when checking that a curve is convex, non-increasing and
// above [1 - alpha]_+, and the largest negative mass that is silently
// clamped to zero.
inline constexpr double kValidityTolerance = 1e-12;

// Whether an estimate over- or under-approximates the hockey-stick curve.
enum class EstimateType {
  kPessimistic,
  kOptimistic,
};

// Selects a one-sided derivative at a kink of a convex curve.
enum class Side {
  kLeft,
  kRight,
};

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_COMMON_H_
