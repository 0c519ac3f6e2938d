#pragma once

#include <iosfwd>

#include <json.hpp>
#include "vesseltop/metrics.hpp"

namespace vesseltop {

inline constexpr const char* kReportSchema = "vesseltop/1";

/// Report as an ordered JSON document; every real is rounded to 6
/// significant digits so output bytes are stable.
nlohmann::ordered_json report_to_json(const MetricReport& report);

/// Long-format CSV: `scope,id,metric,value` where scope is class, aggregate
/// or group.
void write_report_csv(std::ostream& out, const MetricReport& report);

}  // namespace vesseltop
