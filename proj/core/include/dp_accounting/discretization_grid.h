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

#ifndef DP_ACCOUNTING_DISCRETIZATION_GRID_H_
#define DP_ACCOUNTING_DISCRETIZATION_GRID_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace dp_accounting {

// Finite interior points of a uniform grid are epsilon_i = j * interval for
// consecutive integers j = lowest_index, lowest_index + 1, ...
struct Lattice {
  double interval = 0;
  int64_t lowest_index = 0;
};

// An ordered set of discretization points 0 = alpha_0 < alpha_1 < ... <
// alpha_k = +inf together with their logarithms -inf = epsilon_0 < ... <
// epsilon_k = +inf.
class DiscretizationGrid {
 public:
  // `alphas` must be strictly increasing, start at 0 and end at +inf.
  static absl::StatusOr<DiscretizationGrid> FromAlphas(
      std::vector<double> alphas);

  // `finite_epsilons` are the interior points; -inf and +inf are added.
  static absl::StatusOr<DiscretizationGrid> FromEpsilons(
      std::span<const double> finite_epsilons);

  // Interior points j * interval for j in [lowest_index, highest_index]. The
  // range must contain 0 so that alpha = 1 is a grid point.
  static absl::StatusOr<DiscretizationGrid> Uniform(double interval,
                                                    int64_t lowest_index,
                                                    int64_t highest_index);

  // Number of points, k + 1.
  size_t size() const { return alphas_.size(); }
  // Index of the last finite point, k - 1.
  size_t last_finite_index() const { return alphas_.size() - 2; }
  size_t num_finite_points() const { return alphas_.size() - 2; }

  double alpha(size_t i) const { return alphas_[i]; }
  double epsilon(size_t i) const { return epsilons_[i]; }
  std::span<const double> alphas() const { return alphas_; }
  std::span<const double> epsilons() const { return epsilons_; }

  // Index i* with alpha_{i*} = 1, if present.
  std::optional<size_t> index_of_one() const { return index_of_one_; }
  const std::optional<Lattice>& lattice() const { return lattice_; }

 private:
  DiscretizationGrid(std::vector<double> alphas, std::vector<double> epsilons,
                     std::optional<Lattice> lattice);

  std::vector<double> alphas_;
  std::vector<double> epsilons_;
  std::optional<size_t> index_of_one_;
  std::optional<Lattice> lattice_;
};

}  // namespace dp_accounting

#endif  // DP_ACCOUNTING_DISCRETIZATION_GRID_H_
