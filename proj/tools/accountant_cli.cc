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

#include "accountant_cli.h"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_replace.h"
#include "absl/strings/str_split.h"
#include "dp_accounting/accountant.h"
#include "nlohmann/json.hpp"
#include "report_format.h"

namespace dp_accounting::cli {
namespace {

struct OptionInfo {
  const char* name;
  const char* help;
};

// Every option is accepted on the command line (as --name) and in a JSON
// config file (as "name" or with underscores instead of dashes).
constexpr OptionInfo kOptions[] = {
    {"preset", "gaussian, subsampled-gaussian or subsampled-laplace"},
    {"mechanism",
     "gaussian, laplace, randomized-response, or one of these prefixed "
     "with subsampled-"},
    {"noise-scale", "Gaussian standard deviation or Laplace scale"},
    {"sampling-prob", "Poisson subsampling probability in (0, 1]"},
    {"rr-epsilon", "randomized response epsilon"},
    {"adjacency", "add, remove or both (subsampled mechanisms)"},
    {"compositions", "a count, a list a,b,c or a range start:stop:step"},
    {"delta", "report epsilon for this delta"},
    {"epsilon", "report delta for this epsilon"},
    {"discretization", "interval between grid epsilons"},
    {"epsilon-min", "lower end of the grid epsilon range"},
    {"epsilon-max", "upper end of the grid epsilon range"},
    {"estimate", "pessimistic, optimistic or both"},
    {"baseline", "pb to add the Privacy Buckets baseline, or none"},
    {"output", "json or csv"},
    {"out", "write results to this file instead of stdout"},
    {"repeats", "runs per composition count for runtime quantiles"},
    {"convolution", "auto, direct or fft"},
    {"truncation-tail-mass", "mass per tail that truncation may move"},
    {"threads", "worker threads"},
};

constexpr char kOmitTiming[] = "omit-timing";

using Values = std::map<std::string, std::string>;

absl::StatusOr<double> ParseDouble(const Values& values,
                                   const std::string& key) {
  double result;
  if (!absl::SimpleAtod(values.at(key), &result)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "--", key, " expects a number, got '", values.at(key), "'."));
  }
  return result;
}

absl::StatusOr<int64_t> ParseInt(const std::string& key,
                                 const std::string& text) {
  int64_t result;
  if (!absl::SimpleAtoi(text, &result)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "--", key, " expects an integer, got '", text, "'."));
  }
  return result;
}

absl::StatusOr<std::vector<int64_t>> ParseCompositions(
    const std::string& text) {
  std::vector<int64_t> counts;
  const std::vector<std::string> range = absl::StrSplit(text, ':');
  if (range.size() == 3) {
    absl::StatusOr<int64_t> start = ParseInt("compositions", range[0]);
    absl::StatusOr<int64_t> stop = ParseInt("compositions", range[1]);
    absl::StatusOr<int64_t> step = ParseInt("compositions", range[2]);
    if (!start.ok()) return start.status();
    if (!stop.ok()) return stop.status();
    if (!step.ok()) return step.status();
    if (*step <= 0 || *stop < *start) {
      return absl::InvalidArgumentError(absl::StrCat(
          "composition range '", text, "' needs start <= stop and step > 0."));
    }
    for (int64_t n = *start; n <= *stop; n += *step) counts.push_back(n);
    return counts;
  }
  if (range.size() != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "composition range '", text, "' must look like start:stop:step."));
  }
  for (absl::string_view part : absl::StrSplit(text, ',')) {
    absl::StatusOr<int64_t> n =
        ParseInt("compositions", std::string(absl::StripAsciiWhitespace(part)));
    if (!n.ok()) return n.status();
    counts.push_back(*n);
  }
  return counts;
}

// Mechanism settings before they are assembled into a MechanismSpec.
struct MechanismFields {
  std::string base = "gaussian";
  bool subsampled = false;
  double noise_scale = 1.0;
  std::optional<double> rr_epsilon;
  std::optional<double> sampling_prob;
  std::optional<AdjacencyDirection> adjacency;

  static MechanismFields From(const MechanismSpec& spec) {
    MechanismFields fields;
    const MechanismSpec* base = &spec;
    if (spec.kind == MechanismKind::kPoissonSubsampled && spec.inner) {
      fields.subsampled = true;
      fields.sampling_prob = spec.sampling_prob;
      fields.adjacency = spec.adjacency_direction;
      base = spec.inner.get();
    }
    switch (base->kind) {
      case MechanismKind::kLaplace:
        fields.base = "laplace";
        break;
      case MechanismKind::kRandomizedResponse:
        fields.base = "randomized-response";
        fields.rr_epsilon = base->rr_epsilon;
        break;
      default:
        fields.base = "gaussian";
    }
    fields.noise_scale = base->noise_scale;
    return fields;
  }

  absl::StatusOr<MechanismSpec> Build() const {
    MechanismSpec inner;
    if (base == "gaussian") {
      inner = MechanismSpec::Gaussian(noise_scale);
    } else if (base == "laplace") {
      inner = MechanismSpec::Laplace(noise_scale);
    } else {
      if (!rr_epsilon.has_value()) {
        return absl::InvalidArgumentError(
            "randomized response needs --rr-epsilon.");
      }
      inner = MechanismSpec::RandomizedResponse(*rr_epsilon);
    }
    if (!subsampled) {
      if (adjacency.has_value()) {
        return absl::InvalidArgumentError(
            "--adjacency only applies to subsampled mechanisms.");
      }
      return inner;
    }
    if (!sampling_prob.has_value()) {
      return absl::InvalidArgumentError(
          "subsampled mechanisms need --sampling-prob.");
    }
    return MechanismSpec::PoissonSubsampled(
        std::move(inner), *sampling_prob,
        adjacency.value_or(AdjacencyDirection::kRemove));
  }
};

absl::Status SetMechanismName(std::string name, MechanismFields& fields) {
  absl::StrReplaceAll({{"_", "-"}}, &name);
  fields.subsampled = false;
  constexpr absl::string_view kPrefix = "subsampled-";
  if (absl::StartsWith(name, kPrefix)) {
    fields.subsampled = true;
    name = name.substr(kPrefix.size());
  }
  if (name == "rr") name = "randomized-response";
  if (name != "gaussian" && name != "laplace" &&
      name != "randomized-response") {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown mechanism '", name, "'."));
  }
  fields.base = name;
  return absl::OkStatus();
}

struct Invocation {
  std::string verb;
  AccountingRequest request;
  std::vector<int64_t> compositions;
  std::string output;
  std::optional<std::string> out_path;
  int repeats = 1;
  int threads = 1;
  bool include_timing = true;
};

absl::Status MergeConfigFile(const std::string& path, Values& values,
                             bool& omit_timing, bool omit_timing_set) {
  std::ifstream file(path);
  if (!file) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot read config file '", path, "'."));
  }
  const nlohmann::json json =
      nlohmann::json::parse(file, nullptr, /*allow_exceptions=*/false);
  if (json.is_discarded() || !json.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("config file '", path, "' is not a JSON object."));
  }
  for (const auto& [raw_key, value] : json.items()) {
    const std::string key = absl::StrReplaceAll(raw_key, {{"_", "-"}});
    if (key == kOmitTiming) {
      if (!value.is_boolean()) {
        return absl::InvalidArgumentError("omit_timing must be a boolean.");
      }
      if (!omit_timing_set) omit_timing = value.get<bool>();
      continue;
    }
    if (!values.contains(key) || key == "config") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config field '", raw_key, "'."));
    }
    if (!values.at(key).empty()) continue;  // Flags win.
    if (value.is_string()) {
      values[key] = value.get<std::string>();
    } else if (value.is_number_integer()) {
      values[key] = absl::StrCat(value.get<int64_t>());
    } else if (value.is_number()) {
      values[key] = absl::StrFormat("%.17g", value.get<double>());
    } else if (value.is_array() && key == "compositions") {
      std::vector<std::string> parts;
      for (const nlohmann::json& element : value) {
        if (!element.is_number_integer()) {
          return absl::InvalidArgumentError(
              "compositions must be a list of integers.");
        }
        parts.push_back(absl::StrCat(element.get<int64_t>()));
      }
      values[key] = absl::StrJoin(parts, ",");
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("config field '", raw_key, "' has an invalid value."));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Invocation> BuildInvocation(const std::string& verb,
                                           const Values& values,
                                           bool omit_timing) {
  Invocation inv;
  inv.verb = verb;
  inv.output = verb == "compute" ? "json" : "csv";
  inv.include_timing = !omit_timing;
  AccountingRequest& request = inv.request;
  inv.compositions = {1};
  auto has = [&](const char* key) { return !values.at(key).empty(); };

  if (has("preset")) {
    absl::StatusOr<Preset> preset = FindPreset(values.at("preset"));
    if (!preset.ok()) return preset.status();
    request = preset->request;
    inv.compositions = verb == "sweep"
                           ? preset->compositions
                           : std::vector<int64_t>{preset->request.compositions};
  } else {
    request.delta_target = 1e-5;
  }

  MechanismFields mechanism = MechanismFields::From(request.mechanism);
  if (has("mechanism")) {
    if (absl::Status s = SetMechanismName(values.at("mechanism"), mechanism);
        !s.ok()) {
      return s;
    }
  }
  auto number = [&](const char* key, auto assign) -> absl::Status {
    if (!has(key)) return absl::OkStatus();
    absl::StatusOr<double> value = ParseDouble(values, key);
    if (!value.ok()) return value.status();
    assign(*value);
    return absl::OkStatus();
  };
  absl::Status status;
  status.Update(number("noise-scale",
                       [&](double v) { mechanism.noise_scale = v; }));
  status.Update(number("rr-epsilon",
                       [&](double v) { mechanism.rr_epsilon = v; }));
  status.Update(number("sampling-prob", [&](double v) {
    mechanism.sampling_prob = v;
    mechanism.subsampled = true;
  }));
  if (!status.ok()) return status;
  if (has("adjacency")) {
    const std::string& name = values.at("adjacency");
    if (name == "add") {
      mechanism.adjacency = AdjacencyDirection::kAdd;
    } else if (name == "remove") {
      mechanism.adjacency = AdjacencyDirection::kRemove;
    } else if (name == "both") {
      mechanism.adjacency = AdjacencyDirection::kBoth;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown adjacency '", name, "'."));
    }
  }
  absl::StatusOr<MechanismSpec> spec = mechanism.Build();
  if (!spec.ok()) return spec.status();
  request.mechanism = *std::move(spec);

  if (has("compositions")) {
    absl::StatusOr<std::vector<int64_t>> counts =
        ParseCompositions(values.at("compositions"));
    if (!counts.ok()) return counts.status();
    inv.compositions = *std::move(counts);
  }
  if (verb != "sweep" && inv.compositions.size() != 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        verb, " takes a single composition count; use sweep for lists."));
  }
  request.compositions = inv.compositions.back();

  if (has("delta") && has("epsilon")) {
    return absl::InvalidArgumentError(
        "pass either --delta or --epsilon, not both.");
  }
  status.Update(number("delta", [&](double v) {
    request.delta_target = v;
    request.epsilon_target.reset();
  }));
  status.Update(number("epsilon", [&](double v) {
    request.epsilon_target = v;
    request.delta_target.reset();
  }));
  status.Update(number("discretization",
                       [&](double v) { request.grid.discretization = v; }));
  status.Update(number("truncation-tail-mass",
                       [&](double v) { request.truncation_tail_mass = v; }));
  if (!status.ok()) return status;

  if (has("epsilon-min") != has("epsilon-max")) {
    return absl::InvalidArgumentError(
        "--epsilon-min and --epsilon-max must be given together.");
  }
  if (has("epsilon-min")) {
    absl::StatusOr<double> low = ParseDouble(values, "epsilon-min");
    absl::StatusOr<double> high = ParseDouble(values, "epsilon-max");
    if (!low.ok()) return low.status();
    if (!high.ok()) return high.status();
    request.grid.epsilon_range = std::make_pair(*low, *high);
  }
  if (has("estimate")) {
    const std::string& name = values.at("estimate");
    if (name == "pessimistic") {
      request.estimate = EstimateSelection::kPessimistic;
    } else if (name == "optimistic") {
      request.estimate = EstimateSelection::kOptimistic;
    } else if (name == "both") {
      request.estimate = EstimateSelection::kBoth;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown estimate '", name, "'."));
    }
  }
  if (has("baseline")) {
    const std::string& name = values.at("baseline");
    if (name != "pb" && name != "none") {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown baseline '", name, "'; the only baseline is pb."));
    }
    request.privacy_buckets_baseline = name == "pb";
  }
  if (has("convolution")) {
    const std::string& name = values.at("convolution");
    if (name == "auto") {
      request.convolution = ConvolutionMethod::kAuto;
    } else if (name == "direct") {
      request.convolution = ConvolutionMethod::kDirect;
    } else if (name == "fft") {
      request.convolution = ConvolutionMethod::kFft;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown convolution method '", name, "'."));
    }
  }
  if (has("output")) {
    inv.output = values.at("output");
    if (inv.output != "json" && inv.output != "csv") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown output format '", inv.output, "'."));
    }
  }
  if (has("out")) inv.out_path = values.at("out");
  for (auto [key, slot] : {std::pair{"repeats", &inv.repeats},
                           std::pair{"threads", &inv.threads}}) {
    if (!has(key)) continue;
    absl::StatusOr<int64_t> value = ParseInt(key, values.at(key));
    if (!value.ok()) return value.status();
    if (*value < 1 || *value > 1'000'000) {
      return absl::InvalidArgumentError(
          absl::StrCat("--", key, " must be a positive integer."));
    }
    *slot = static_cast<int>(*value);
  }
  request.num_threads = inv.threads;
  if (verb == "curve") return inv;
  if (absl::Status s = request.Validate(); !s.ok()) return s;
  return inv;
}

absl::StatusOr<std::string> Execute(const Invocation& inv) {
  if (inv.verb == "curve") {
    absl::StatusOr<std::vector<CurveRow>> rows = CurveTable(inv.request);
    if (!rows.ok()) return rows.status();
    return inv.output == "json" ? CurveToJson(*rows) : CurveToCsv(*rows);
  }
  absl::StatusOr<std::vector<SweepRow>> rows =
      Sweep(inv.request, inv.compositions,
            {.repeats = inv.repeats, .num_threads = 1});
  if (!rows.ok()) return rows.status();
  if (inv.output == "csv") return SweepToCsv(*rows, inv.include_timing);
  if (inv.verb == "compute") {
    return SweepRowToJson(rows->front(), inv.include_timing);
  }
  return SweepToJson(*rows, inv.include_timing);
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return kExitSuccess;
  return status.code() == absl::StatusCode::kInvalidArgument
             ? kExitInvalidRequest
             : kExitNumericalFailure;
}

int RunAccountantCli(int argc, const char* const* argv, std::ostream& out,
                     std::ostream& err) {
  CLI::App app{
      "Tight (epsilon, delta) bounds for composed mechanisms from "
      "pessimistic and optimistic privacy loss distributions."};
  app.require_subcommand(1);
  Values values;
  for (const OptionInfo& option : kOptions) values[option.name] = "";
  values["config"] = "";
  bool omit_timing = false;
  std::map<std::string, CLI::App*> verbs;
  std::map<std::string, CLI::Option*> omit_options;
  for (const auto& [verb, description] :
       {std::pair{"compute", "bounds for one composition count"},
        std::pair{"sweep", "bounds for a list of composition counts (CSV)"},
        std::pair{"curve", "single-step hockey-stick curves (CSV)"}}) {
    CLI::App* sub = app.add_subcommand(verb, description);
    for (const OptionInfo& option : kOptions) {
      sub->add_option(absl::StrCat("--", option.name), values[option.name],
                      option.help);
    }
    sub->add_option("--config", values["config"],
                    "flat JSON file with the same field names; flags win");
    omit_options[verb] = sub->add_flag(
        "--omit-timing", omit_timing,
        "drop wall-clock fields so that output is byte-identical");
    verbs[verb] = sub;
  }
  std::ostringstream help_out;
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitInvalidRequest;
  }
  std::string verb;
  for (const auto& [name, sub] : verbs) {
    if (sub->parsed()) verb = name;
  }

  if (!values["config"].empty()) {
    if (absl::Status s =
            MergeConfigFile(values["config"], values, omit_timing,
                            omit_options[verb]->count() > 0);
        !s.ok()) {
      err << "error: " << s.message() << "\n";
      return ExitCodeFor(s);
    }
  }
  absl::StatusOr<Invocation> inv = BuildInvocation(verb, values, omit_timing);
  if (!inv.ok()) {
    err << "error: " << inv.status().message() << "\n";
    return ExitCodeFor(inv.status());
  }
  absl::StatusOr<std::string> text = Execute(*inv);
  if (!text.ok()) {
    err << "error: " << text.status().message() << "\n";
    return ExitCodeFor(text.status());
  }
  if (inv->out_path.has_value()) {
    std::ofstream file(*inv->out_path);
    if (!file || !(file << *text)) {
      err << "error: cannot write '" << *inv->out_path << "'.\n";
      return kExitInvalidRequest;
    }
  } else {
    out << *text;
  }
  return kExitSuccess;
}

}  // namespace dp_accounting::cli
