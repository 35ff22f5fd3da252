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


#include "report_format.h"

#include <cmath>
#include <optional>
#include <string>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "nlohmann/json.hpp"

namespace dp_accounting::cli {
namespace {

using Json = nlohmann::ordered_json;

Json Number(double value) {
  if (std::isnan(value)) return nullptr;
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return std::stod(absl::StrFormat("%.12g", value));
}

std::string Dump(const Json& json) { return json.dump(2) + "\n"; }

Json MechanismJson(const MechanismSpec& spec) {
  Json json;
  json["kind"] = MechanismKindName(spec.kind);
  switch (spec.kind) {
    case MechanismKind::kGaussian:
    case MechanismKind::kLaplace:
      json["noise_scale"] = Number(spec.noise_scale);
      break;
    case MechanismKind::kRandomizedResponse:
      json["rr_epsilon"] = Number(spec.rr_epsilon);
      break;
    case MechanismKind::kPoissonSubsampled:
      json["sampling_prob"] = Number(spec.sampling_prob);
      json["adjacency"] = AdjacencyDirectionName(spec.adjacency_direction);
      if (spec.inner != nullptr) json["inner"] = MechanismJson(*spec.inner);
      break;
  }
  return json;
}

std::string ValueKey(const AccountingRequest& request) {
  return request.delta_target.has_value() ? "epsilon" : "delta";
}

Json BoundJson(const BoundEstimate& bound, const std::string& value_key) {
  Json json;
  json["method"] = bound.method;
  json[value_key] = Number(bound.value);
  json["support_size"] = bound.support_size;
  json["truncated_mass_lower"] = Number(bound.truncation.lower_tail_mass);
  json["truncated_mass_upper"] = Number(bound.truncation.upper_tail_mass);
  json["clamp_events"] = bound.clamp_events;
  return json;
}

Json ReportJson(const PrivacyBoundReport& report, bool include_timing) {
  const AccountingRequest& request = report.request;
  const std::string value_key = ValueKey(request);
  Json json;
  json["mechanism"] = MechanismJson(request.mechanism);
  json["compositions"] = request.compositions;
  if (request.delta_target.has_value()) {
    json["query"] = {{"delta", Number(*request.delta_target)}};
  } else {
    json["query"] = {{"epsilon", Number(*request.epsilon_target)}};
  }
  json["estimate"] = EstimateSelectionName(request.estimate);
  json["grid"] = {{"discretization", Number(report.grid.discretization)},
                  {"lowest_index", report.grid.lowest_index},
                  {"highest_index", report.grid.highest_index},
                  {"num_points", report.grid.num_points}};
  Json bounds = Json::object();
  auto add = [&](const char* name, const std::optional<BoundEstimate>& b) {
    if (b.has_value()) bounds[name] = BoundJson(*b, value_key);
  };
  add("pessimistic", report.pessimistic);
  add("optimistic", report.optimistic);
  add("pb_pessimistic", report.pb_pessimistic);
  add("pb_optimistic", report.pb_optimistic);
  json["bounds"] = bounds;
  json[value_key + "_low"] = Number(report.low());
  json[value_key + "_high"] = Number(report.high());
  if (include_timing) json["runtime_ms"] = Number(report.duration_ms);
  return json;
}

Json RowJson(const SweepRow& row, bool include_timing) {
  Json json = ReportJson(row.report, include_timing);
  if (include_timing) {
    json["runtime_ms"] = Number(row.runtime_ms_median);
    json["runtime_ms_p25"] = Number(row.runtime_ms_p25);
    json["runtime_ms_p75"] = Number(row.runtime_ms_p75);
  }
  return json;
}

std::string Cell(const std::optional<BoundEstimate>& bound) {
  return bound.has_value() ? FormatNumber(bound->value) : "";
}

}  // namespace

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return absl::StrFormat("%.12g", value);
}

std::string ReportToJson(const PrivacyBoundReport& report,
                         bool include_timing) {
  return Dump(ReportJson(report, include_timing));
}

std::string SweepRowToJson(const SweepRow& row, bool include_timing) {
  return Dump(RowJson(row, include_timing));
}

std::string SweepToJson(const std::vector<SweepRow>& rows,
                        bool include_timing) {
  Json json = Json::array();
  for (const SweepRow& row : rows) json.push_back(RowJson(row, include_timing));
  return Dump(Json{{"rows", json}});
}

std::string SweepToCsv(const std::vector<SweepRow>& rows,
                       bool include_timing) {
  if (rows.empty()) return "";
  const std::string prefix =
      rows.front().report.request.delta_target.has_value() ? "eps_"
                                                           : "delta_";
  const bool baseline = rows.front().report.request.privacy_buckets_baseline;
  std::vector<std::string> header = {"n", prefix + "pessimistic",
                                     prefix + "optimistic"};
  if (baseline) {
    header.push_back(prefix + "pb_pessimistic");
    header.push_back(prefix + "pb_optimistic");
  }
  if (include_timing) {
    header.insert(header.end(),
                  {"runtime_ms", "runtime_ms_p25", "runtime_ms_p75"});
  }
  std::string out = absl::StrCat(absl::StrJoin(header, ","), "\n");
  for (const SweepRow& row : rows) {
    const PrivacyBoundReport& r = row.report;
    std::vector<std::string> cells = {absl::StrCat(r.request.compositions),
                                      Cell(r.pessimistic),
                                      Cell(r.optimistic)};
    if (baseline) {
      cells.push_back(Cell(r.pb_pessimistic));
      cells.push_back(Cell(r.pb_optimistic));
    }
    if (include_timing) {
      cells.push_back(FormatNumber(row.runtime_ms_median));
      cells.push_back(FormatNumber(row.runtime_ms_p25));
      cells.push_back(FormatNumber(row.runtime_ms_p75));
    }
    absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
  }
  return out;
}

std::string CurveToJson(const std::vector<CurveRow>& rows) {
  Json json = Json::array();
  for (const CurveRow& row : rows) {
    json.push_back({{"alpha", Number(row.alpha)},
                    {"h_true", Number(row.h_true)},
                    {"h_pessimistic", Number(row.h_pessimistic)},
                    {"h_optimistic", Number(row.h_optimistic)},
                    {"h_pb_pessimistic", Number(row.h_pb_pessimistic)}});
  }
  return Dump(Json{{"rows", json}});
}

std::string CurveToCsv(const std::vector<CurveRow>& rows) {
  std::string out =
      "alpha,h_true,h_pessimistic,h_optimistic,h_pb_pessimistic\n";
  for (const CurveRow& row : rows) {
    absl::StrAppend(
        &out,
        absl::StrJoin({FormatNumber(row.alpha), FormatNumber(row.h_true),
                       FormatNumber(row.h_pessimistic),
                       std::isnan(row.h_optimistic)
                           ? std::string()
                           : FormatNumber(row.h_optimistic),
                       FormatNumber(row.h_pb_pessimistic)},
                      ","),
        "\n");
  }
  return out;
}

}  // namespace dp_accounting::cli
