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

#include "dp_accounting/discretization_grid.h"

#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dp_accounting/common.h"

namespace dp_accounting {

DiscretizationGrid::DiscretizationGrid(std::vector<double> alphas,
                                       std::vector<double> epsilons,
                                       std::optional<Lattice> lattice)
    : alphas_(std::move(alphas)),
      epsilons_(std::move(epsilons)),
      lattice_(lattice) {
  for (size_t i = 1; i + 1 < alphas_.size(); ++i) {
    if (alphas_[i] == 1.0) index_of_one_ = i;
  }
}

absl::StatusOr<DiscretizationGrid> DiscretizationGrid::FromAlphas(
    std::vector<double> alphas) {
  if (alphas.size() < 2) {
    return absl::InvalidArgumentError(
        "a discretization grid needs at least the points 0 and +inf.");
  }
  if (alphas.front() != 0.0 || alphas.back() != kInfinity) {
    return absl::InvalidArgumentError(
        "a discretization grid must start at alpha = 0 and end at "
        "alpha = +inf.");
  }
  for (size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] > alphas[i - 1]) || std::isnan(alphas[i])) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "grid alphas must be strictly increasing; index %d has %g after "
          "%g.",
          i, alphas[i], alphas[i - 1]));
    }
  }
  std::vector<double> epsilons(alphas.size());
  for (size_t i = 0; i < alphas.size(); ++i) {
    epsilons[i] = std::log(alphas[i]);
  }
  return DiscretizationGrid(std::move(alphas), std::move(epsilons),
                            std::nullopt);
}

absl::StatusOr<DiscretizationGrid> DiscretizationGrid::FromEpsilons(
    std::span<const double> finite_epsilons) {
  std::vector<double> epsilons;
  epsilons.reserve(finite_epsilons.size() + 2);
  epsilons.push_back(-kInfinity);
  for (double epsilon : finite_epsilons) {
    if (!std::isfinite(epsilon)) {
      return absl::InvalidArgumentError(
          "interior grid epsilons must be finite.");
    }
    if (!(epsilon > epsilons.back())) {
      return absl::InvalidArgumentError(
          "grid epsilons must be strictly increasing.");
    }
    epsilons.push_back(epsilon);
  }
  epsilons.push_back(kInfinity);
  std::vector<double> alphas(epsilons.size());
  for (size_t i = 0; i < epsilons.size(); ++i) {
    alphas[i] = std::exp(epsilons[i]);
    if (i > 0 && !(alphas[i] > alphas[i - 1])) {
      return absl::InvalidArgumentError(
          "grid epsilons are too close together to be distinguished after "
          "exponentiation.");
    }
  }
  return DiscretizationGrid(std::move(alphas), std::move(epsilons),
                            std::nullopt);
}

absl::StatusOr<DiscretizationGrid> DiscretizationGrid::Uniform(
    double interval, int64_t lowest_index, int64_t highest_index) {
  if (!(interval > 0) || !std::isfinite(interval)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "discretization interval should be positive, got %g.", interval));
  }
  if (lowest_index > 0 || highest_index < 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "uniform grid index range [%d, %d] must contain 0.", lowest_index,
        highest_index));
  }
  const int64_t count = highest_index - lowest_index + 1;
  std::vector<double> epsilons;
  std::vector<double> alphas;
  epsilons.reserve(count + 2);
  alphas.reserve(count + 2);
  epsilons.push_back(-kInfinity);
  alphas.push_back(0.0);
  for (int64_t j = lowest_index; j <= highest_index; ++j) {
    const double epsilon = j == 0 ? 0.0 : static_cast<double>(j) * interval;
    epsilons.push_back(epsilon);
    alphas.push_back(std::exp(epsilon));
  }
  epsilons.push_back(kInfinity);
  alphas.push_back(kInfinity);
  for (size_t i = 1; i < alphas.size(); ++i) {
    if (!(alphas[i] > alphas[i - 1])) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "interval %g is too small or the range too wide: grid alphas "
          "collide at index %d.",
          interval, i));
    }
  }
  return DiscretizationGrid(std::move(alphas), std::move(epsilons),
                            Lattice{interval, lowest_index});
}

}  // namespace dp_accounting
