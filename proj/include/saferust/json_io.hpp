#pragma once

// nlohmann::json conversions for the types written to run directories and
// printed by the CLI.

#include <json.hpp>

#include "saferust/knowledge_base.hpp"
#include "saferust/metrics.hpp"
#include "saferust/report.hpp"
#include "saferust/run_types.hpp"
#include "saferust/segmenter.hpp"
#include "saferust/verifier.hpp"

namespace saferust {
void to_json(nlohmann::json& j, const SelfReportedCounts& c);
void from_json(const nlohmann::json& j, SelfReportedCounts& c);
}  // namespace saferust

namespace saferust::segmenter {
void to_json(nlohmann::json& j, const Segment& s);
}

namespace saferust::kb {
void to_json(nlohmann::json& j, const RetrievalResult& r);
}

namespace saferust::llm {
void to_json(nlohmann::json& j, const SelfReport& r);
void from_json(const nlohmann::json& j, SelfReport& r);
}  // namespace saferust::llm

namespace saferust::verifier {
void to_json(nlohmann::json& j, const SafetyCounts& c);
void from_json(const nlohmann::json& j, SafetyCounts& c);
void to_json(nlohmann::json& j, const Diagnostic& d);
}  // namespace saferust::verifier

namespace saferust::metrics {
void to_json(nlohmann::json& j, const ChangeValue& v);
void from_json(const nlohmann::json& j, ChangeValue& v);
void to_json(nlohmann::json& j, const ChangeMetric& m);
void from_json(const nlohmann::json& j, ChangeMetric& m);
void to_json(nlohmann::json& j, const HallucinationReport& r);
void from_json(const nlohmann::json& j, HallucinationReport& r);
}  // namespace saferust::metrics

namespace saferust::report {
void to_json(nlohmann::json& j, const HallucinationSummary& h);
void from_json(const nlohmann::json& j, HallucinationSummary& h);
void to_json(nlohmann::json& j, const ReportRow& r);
void from_json(const nlohmann::json& j, ReportRow& r);
void to_json(nlohmann::json& j, const BaselineEntry& b);
}  // namespace saferust::report
