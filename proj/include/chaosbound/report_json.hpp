// SPDX-License-Identifier: MIT
//
// JSON documents for the harness reports. Non-finite numbers are written as
// the strings "inf", "-inf" and "nan"; everything else round-trips exactly.
#pragma once

#include "chaosbound/harness.hpp"

#include <json.hpp>

#include <string>

namespace chaosbound {

using Json = nlohmann::json;

[[nodiscard]] Json to_json(const NormValue& v);
[[nodiscard]] NormValue norm_value_from_json(const Json& j);

[[nodiscard]] Json to_json(const MomentEstimate& m);
[[nodiscard]] MomentEstimate moment_from_json(const Json& j);

[[nodiscard]] Json to_json(const TailEstimate& t);
[[nodiscard]] TailEstimate tail_estimate_from_json(const Json& j);

[[nodiscard]] Json to_json(const BoundReport& r);
[[nodiscard]] BoundReport bound_report_from_json(const Json& j);

[[nodiscard]] Json to_json(const TailReport& r);
[[nodiscard]] TailReport tail_report_from_json(const Json& j);

[[nodiscard]] Json to_json(const RemarkReport& r);

/// One line per p: p,total,status,moment,half_width,ratio,within.
[[nodiscard]] std::string ratio_table_csv(const BoundReport& r);

/// Two-space indented document with a trailing newline.
[[nodiscard]] std::string dump(const Json& j);

}  // namespace chaosbound
