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


// Text renderings of accountant results. Numbers carry 12 significant
// digits; infinities are written as "inf".

#ifndef DP_ACCOUNTING_TOOLS_REPORT_FORMAT_H_
#define DP_ACCOUNTING_TOOLS_REPORT_FORMAT_H_

#include <string>
#include <vector>

#include "dp_accounting/accountant.h"

namespace dp_accounting::cli {

std::string FormatNumber(double value);

// `include_timing` = false drops every wall-clock field, which makes the
// output a deterministic function of the request.
std::string ReportToJson(const PrivacyBoundReport& report,
                         bool include_timing);
// A report together with the runtime quantiles of its row.
std::string SweepRowToJson(const SweepRow& row, bool include_timing);
std::string SweepToJson(const std::vector<SweepRow>& rows,
                        bool include_timing);
std::string SweepToCsv(const std::vector<SweepRow>& rows,
                       bool include_timing);
std::string CurveToJson(const std::vector<CurveRow>& rows);
std::string CurveToCsv(const std::vector<CurveRow>& rows);

}  // namespace dp_accounting::cli

#endif  // DP_ACCOUNTING_TOOLS_REPORT_FORMAT_H_
