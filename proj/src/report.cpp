#include "saferust/report.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "saferust/errors.hpp"
#include "saferust/json_io.hpp"

namespace saferust::report {

using metrics::MetricKind;
using nlohmann::json;

namespace {

constexpr MetricKind kColumnOrder[] = {MetricKind::RPD, MetricKind::UTC, MetricKind::UB,
                                       MetricKind::ULoC};
constexpr MetricKind kBaselineMetrics[] = {MetricKind::RPD, MetricKind::UTC, MetricKind::ULoC};

const metrics::ChangeMetric& change_for(const ReportRow& row, MetricKind kind) {
  for (const auto& c : row.changes) {
    if (c.kind == kind) return c;
  }
  throw PreconditionError("row " + row.program_name + " lacks a " +
                          std::string(metrics::to_string(kind)) + " change");
}

std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string md_cell(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string deviation_cell(const metrics::HallucinationReport& h) {
  if (!h.relative_deviation) return h.fabricated ? "fabricated" : "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu (%.1f%%)", h.absolute_deviation,
                *h.relative_deviation * 100.0);
  return buf;
}

std::string format_percent(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.0f%%", p);
  return buf;
}

std::string emit_markdown(const std::vector<ReportRow>& rows,
                          const std::vector<BaselineEntry>& baselines) {
  std::ostringstream out;
  out << "| Program | Model |";
  for (MetricKind k : kColumnOrder) {
    const auto name = metrics::to_string(k);
    out << ' ' << name << " (original) | " << name << " (final) | " << name << " change |";
  }
  out << "\n|---|---|";
  for (std::size_t i = 0; i < std::size(kColumnOrder); ++i) out << "---:|---:|---:|";
  out << '\n';
  for (const auto& row : rows) {
    out << "| " << md_cell(row.program_name) << " | " << md_cell(row.model_id) << " |";
    for (MetricKind k : kColumnOrder) {
      const auto& c = change_for(row, k);
      out << ' ' << c.original << " | " << c.final_count << " | " << c.value.display() << " |";
    }
    out << '\n';
  }

  bool any_self = false;
  for (const auto& row : rows) any_self = any_self || row.hallucination.has_value();
  if (any_self) {
    out << "\n| Program | Model | Version | RPD self-reported | RPD verified | RPD deviation |"
           " UTC self-reported | UTC verified | UTC deviation |\n"
           "|---|---|---|---:|---:|---:|---:|---:|---:|\n";
    for (const auto& row : rows) {
      if (!row.hallucination) continue;
      const auto& h = *row.hallucination;
      for (int version = 0; version < 2; ++version) {
        const auto& rpd = version == 0 ? h.rpd_original : h.rpd_final;
        const auto& utc = version == 0 ? h.utc_original : h.utc_final;
        out << "| " << md_cell(row.program_name) << " | " << md_cell(row.model_id) << " | "
            << (version == 0 ? "original" : "final") << " | " << rpd.self_reported << " | "
            << rpd.verified << " | " << deviation_cell(rpd) << " | " << utc.self_reported
            << " | " << utc.verified << " | " << deviation_cell(utc) << " |\n";
      }
    }
  }

  if (baselines.empty()) return out.str();

  std::vector<std::string> programs, models, systems;
  auto add_unique = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  for (const auto& row : rows) {
    add_unique(programs, row.program_name);
    add_unique(models, row.model_id);
  }
  for (const auto& b : baselines) {
    add_unique(programs, b.program);
    add_unique(systems, b.system);
  }
  for (MetricKind k : kBaselineMetrics) {
    out << "\n" << metrics::to_string(k) << " change by approach\n\n| Program |";
    for (const auto& m : models) out << ' ' << md_cell(m) << " |";
    for (const auto& s : systems) out << ' ' << md_cell(s) << ' ' << kBaselineProvenance << " |";
    out << "\n|---|";
    for (std::size_t i = 0; i < models.size() + systems.size(); ++i) out << "---:|";
    out << '\n';
    for (const auto& p : programs) {
      out << "| " << md_cell(p) << " |";
      for (const auto& m : models) {
        std::string cell;
        for (const auto& row : rows) {
          if (row.program_name == p && row.model_id == m) cell = change_for(row, k).value.display();
        }
        out << ' ' << cell << " |";
      }
      for (const auto& s : systems) {
        std::string cell;
        for (const auto& b : baselines) {
          if (b.program == p && b.system == s && b.metric == k) cell = format_percent(b.percent);
        }
        out << ' ' << cell << " |";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string emit_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream out;
  out << "program,model";
  for (MetricKind k : kColumnOrder) {
    std::string name(metrics::to_string(k));
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out << ',' << name << "_original," << name << "_final," << name << "_change";
  }
  out << "\r\n";
  for (const auto& row : rows) {
    out << csv_quote(row.program_name) << ',' << csv_quote(row.model_id);
    for (MetricKind k : kColumnOrder) {
      const auto& c = change_for(row, k);
      out << ',' << c.original << ',' << c.final_count << ',' << csv_quote(c.value.display());
    }
    out << "\r\n";
  }
  return out.str();
}

std::string emit_json(const std::vector<ReportRow>& rows,
                      const std::vector<BaselineEntry>& baselines) {
  json doc = {{"schema_version", kReportSchemaVersion}, {"rows", rows}};
  if (!baselines.empty()) doc["baselines"] = baselines;
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  for (auto& f : fields) {
    const auto b = f.find_first_not_of(" \t");
    const auto e = f.find_last_not_of(" \t\r");
    f = b == std::string::npos ? std::string() : f.substr(b, e - b + 1);
  }
  return fields;
}

}  // namespace

ReportRow ReportRow::make(std::string model_id, std::string program_name,
                          const verifier::SafetyCounts& original,
                          const verifier::SafetyCounts& final_counts,
                          std::optional<std::pair<SelfReportedCounts, SelfReportedCounts>>
                              self_reports) {
  ReportRow row;
  row.model_id = std::move(model_id);
  row.program_name = std::move(program_name);
  row.original_counts = original;
  row.final_counts = final_counts;
  row.changes = metrics::compare_runs(original, final_counts);
  if (self_reports) {
    const auto& [so, sf] = *self_reports;
    row.hallucination = HallucinationSummary{
        metrics::hallucination_deviation(so.rpd, original.rpd),
        metrics::hallucination_deviation(sf.rpd, final_counts.rpd),
        metrics::hallucination_deviation(so.utc, original.utc),
        metrics::hallucination_deviation(sf.utc, final_counts.utc),
    };
  }
  row.self_reports = std::move(self_reports);
  return row;
}

ReportFormat parse_format(std::string_view name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md" || name == "markdown") return ReportFormat::Markdown;
  throw UnsupportedFormat("unsupported report format '" + std::string(name) + "'");
}

std::string emit_report(const std::vector<ReportRow>& rows, ReportFormat format,
                        const std::vector<BaselineEntry>& baselines) {
  if (rows.empty()) throw PreconditionError("cannot emit a report without rows");
  switch (format) {
    case ReportFormat::Json: return emit_json(rows, baselines);
    case ReportFormat::Csv: return emit_csv(rows);
    case ReportFormat::Markdown: return emit_markdown(rows, baselines);
  }
  throw UnsupportedFormat("unsupported report format");
}

std::vector<ReportRow> parse_report_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    const int version = doc.at("schema_version").get<int>();
    if (version != kReportSchemaVersion) {
      throw UnsupportedFormat("report schema version " + std::to_string(version) +
                              " is not supported");
    }
    return doc.at("rows").get<std::vector<ReportRow>>();
  } catch (const json::exception& e) {
    throw UnsupportedFormat(std::string("malformed report json: ") + e.what());
  }
}

std::vector<BaselineEntry> load_baseline(const std::filesystem::path& fixture) {
  std::ifstream in(fixture, std::ios::binary);
  if (!in) throw MalformedFixture("cannot open baseline fixture " + fixture.string());
  std::string line;
  std::size_t lineno = 0;
  std::vector<BaselineEntry> entries;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    const std::string where = fixture.string() + ":" + std::to_string(lineno);
    if (!header_seen) {
      if (fields != std::vector<std::string>{"program", "metric", "system", "percent"}) {
        throw MalformedFixture(where + ": expected header program,metric,system,percent");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) throw MalformedFixture(where + ": expected 4 fields");
    BaselineEntry e;
    e.program = fields[0];
    e.system = fields[2];
    try {
      e.metric = metrics::metric_kind_from_string(fields[1]);
      std::size_t used = 0;
      e.percent = std::stod(fields[3], &used);
      if (used != fields[3].size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception& ex) {
      throw MalformedFixture(where + ": " + ex.what());
    }
    if (e.program.empty() || e.system.empty()) throw MalformedFixture(where + ": empty field");
    entries.push_back(std::move(e));
  }
  if (!header_seen) throw MalformedFixture(fixture.string() + ": empty fixture");
  return entries;
}

}  // namespace saferust::report
