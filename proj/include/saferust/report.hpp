#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "saferust/metrics.hpp"
#include "saferust/run_types.hpp"
#include "saferust/verifier.hpp"

namespace saferust::report {

inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kBaselineProvenance = "[paper-transcribed]";

struct HallucinationSummary {
  metrics::HallucinationReport rpd_original;
  metrics::HallucinationReport rpd_final;
  metrics::HallucinationReport utc_original;
  metrics::HallucinationReport utc_final;

  friend bool operator==(const HallucinationSummary&, const HallucinationSummary&) = default;
};

struct ReportRow {
  std::string model_id;
  std::string program_name;
  verifier::SafetyCounts original_counts;
  verifier::SafetyCounts final_counts;
  std::vector<metrics::ChangeMetric> changes;
  std::optional<std::pair<SelfReportedCounts, SelfReportedCounts>> self_reports;
  std::optional<HallucinationSummary> hallucination;

  // Derives `changes` (and `hallucination` when self reports are given) from
  // the counts.
  static ReportRow make(std::string model_id, std::string program_name,
                        const verifier::SafetyCounts& original,
                        const verifier::SafetyCounts& final_counts,
                        std::optional<std::pair<SelfReportedCounts, SelfReportedCounts>>
                            self_reports = std::nullopt);

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

enum class ReportFormat { Json, Csv, Markdown };

// Accepts json, csv, md and markdown; throws UnsupportedFormat.
ReportFormat parse_format(std::string_view name);

struct BaselineEntry {
  std::string program;
  metrics::MetricKind metric = metrics::MetricKind::RPD;
  std::string system;
  double percent = 0.0;

  friend bool operator==(const BaselineEntry&, const BaselineEntry&) = default;
};

// CSV with header `program,metric,system,percent`. Throws MalformedFixture.
std::vector<BaselineEntry> load_baseline(const std::filesystem::path& fixture);

// Throws PreconditionError on an empty row list. Baselines, when given, are
// appended as comparison tables (markdown) or a "baselines" array (json);
// csv carries rows only.
std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                        const std::vector<BaselineEntry>& baselines = {});

std::vector<ReportRow> parse_report_json(std::string_view text);

}  // namespace saferust::report
