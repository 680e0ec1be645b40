#include "saferust/json_io.hpp"

#include "saferust/errors.hpp"

using nlohmann::json;

namespace saferust {

void to_json(json& j, const SelfReportedCounts& c) {
  json segments = json::array();
  for (const auto& s : c.per_segment) {
    segments.push_back(s ? json(*s) : json(nullptr));
  }
  j = {{"rpd", c.rpd}, {"utc", c.utc}, {"per_segment", segments},
       {"unreported", c.has_unreported()}};
}

void from_json(const json& j, SelfReportedCounts& c) {
  c.rpd = j.at("rpd").get<std::size_t>();
  c.utc = j.at("utc").get<std::size_t>();
  c.per_segment.clear();
  for (const auto& s : j.at("per_segment")) {
    if (s.is_null()) {
      c.per_segment.emplace_back(std::nullopt);
    } else {
      c.per_segment.emplace_back(s.get<llm::SelfReport>());
    }
  }
}

}  // namespace saferust

namespace saferust::segmenter {
void to_json(json& j, const Segment& s) {
  j = {{"index", s.index}, {"start_offset", s.start_offset}, {"char_count", s.char_count},
       {"text", s.text}};
}
}  // namespace saferust::segmenter

namespace saferust::kb {
void to_json(json& j, const RetrievalResult& r) {
  j = {{"doc_id", r.chunk.doc_id},
       {"chunk_index", r.chunk.chunk_index},
       {"start_offset", r.chunk.start_offset},
       {"score", r.score},
       {"text", r.chunk.text}};
}
}  // namespace saferust::kb

namespace saferust::llm {
void to_json(json& j, const SelfReport& r) { j = {{"rpd", r.rpd}, {"utc", r.utc}}; }
void from_json(const json& j, SelfReport& r) {
  r.rpd = j.at("rpd").get<std::size_t>();
  r.utc = j.at("utc").get<std::size_t>();
}
}  // namespace saferust::llm

namespace saferust::verifier {
void to_json(json& j, const SafetyCounts& c) {
  j = {{"rpd", c.rpd},   {"utc", c.utc},
       {"ub", c.ub},     {"uloc", c.uloc},
       {"forbid_attr", c.forbid_attr}, {"deny_attr", c.deny_attr}};
}
void from_json(const json& j, SafetyCounts& c) {
  c.rpd = j.at("rpd").get<std::size_t>();
  c.utc = j.at("utc").get<std::size_t>();
  c.ub = j.at("ub").get<std::size_t>();
  c.uloc = j.at("uloc").get<std::size_t>();
  c.forbid_attr = j.value("forbid_attr", false);
  c.deny_attr = j.value("deny_attr", false);
}
void to_json(json& j, const Diagnostic& d) {
  j = {{"code", d.code}, {"level", d.level}, {"message", d.message},
       {"line", d.line}, {"span_file", d.span_file}};
}
}  // namespace saferust::verifier

namespace saferust::metrics {

namespace {
std::string_view notation_name(Notation n) {
  switch (n) {
    case Notation::Percent: return "percent";
    case Notation::Dash: return "dash";
    case Notation::BangDash: return "bang_dash";
  }
  return "?";
}
}  // namespace

void to_json(json& j, const ChangeValue& v) {
  j = {{"notation", notation_name(v.notation)}, {"display", v.display()}};
  j["percent"] = v.notation == Notation::Percent ? json(v.percent) : json(nullptr);
}

void from_json(const json& j, ChangeValue& v) {
  const auto n = j.at("notation").get<std::string>();
  if (n == "percent") {
    v = {Notation::Percent, j.at("percent").get<double>()};
  } else if (n == "dash") {
    v = {Notation::Dash, 0.0};
  } else if (n == "bang_dash") {
    v = {Notation::BangDash, 0.0};
  } else {
    throw json::other_error::create(501, "unknown notation " + n, &j);
  }
}

void to_json(json& j, const ChangeMetric& m) {
  j = {{"kind", to_string(m.kind)}, {"original", m.original}, {"final", m.final_count},
       {"value", m.value}};
}

void from_json(const json& j, ChangeMetric& m) {
  m.kind = metric_kind_from_string(j.at("kind").get<std::string>());
  m.original = j.at("original").get<std::size_t>();
  m.final_count = j.at("final").get<std::size_t>();
  m.value = j.at("value").get<ChangeValue>();
}

void to_json(json& j, const HallucinationReport& r) {
  j = {{"self_reported", r.self_reported},
       {"verified", r.verified},
       {"absolute_deviation", r.absolute_deviation},
       {"fabricated", r.fabricated}};
  j["relative_deviation"] = r.relative_deviation ? json(*r.relative_deviation) : json(nullptr);
}

void from_json(const json& j, HallucinationReport& r) {
  r.self_reported = j.at("self_reported").get<std::size_t>();
  r.verified = j.at("verified").get<std::size_t>();
  r.absolute_deviation = j.at("absolute_deviation").get<std::size_t>();
  r.fabricated = j.at("fabricated").get<bool>();
  const auto& rel = j.at("relative_deviation");
  r.relative_deviation = rel.is_null() ? std::nullopt : std::optional<double>(rel.get<double>());
}

}  // namespace saferust::metrics

namespace saferust::report {

void to_json(json& j, const HallucinationSummary& h) {
  j = {{"rpd_original", h.rpd_original},
       {"rpd_final", h.rpd_final},
       {"utc_original", h.utc_original},
       {"utc_final", h.utc_final}};
}

void from_json(const json& j, HallucinationSummary& h) {
  h.rpd_original = j.at("rpd_original").get<metrics::HallucinationReport>();
  h.rpd_final = j.at("rpd_final").get<metrics::HallucinationReport>();
  h.utc_original = j.at("utc_original").get<metrics::HallucinationReport>();
  h.utc_final = j.at("utc_final").get<metrics::HallucinationReport>();
}

void to_json(json& j, const ReportRow& r) {
  j = {{"model_id", r.model_id},
       {"program_name", r.program_name},
       {"original_counts", r.original_counts},
       {"final_counts", r.final_counts},
       {"changes", r.changes}};
  if (r.self_reports) {
    j["self_reports"] = {{"original", r.self_reports->first}, {"final", r.self_reports->second}};
  } else {
    j["self_reports"] = nullptr;
  }
  j["hallucination"] = r.hallucination ? json(*r.hallucination) : json(nullptr);
}

void from_json(const json& j, ReportRow& r) {
  r.model_id = j.at("model_id").get<std::string>();
  r.program_name = j.at("program_name").get<std::string>();
  r.original_counts = j.at("original_counts").get<verifier::SafetyCounts>();
  r.final_counts = j.at("final_counts").get<verifier::SafetyCounts>();
  r.changes = j.at("changes").get<std::vector<metrics::ChangeMetric>>();
  const auto& sr = j.at("self_reports");
  if (sr.is_null()) {
    r.self_reports.reset();
  } else {
    r.self_reports.emplace(sr.at("original").get<SelfReportedCounts>(),
                           sr.at("final").get<SelfReportedCounts>());
  }
  const auto& h = j.at("hallucination");
  r.hallucination = h.is_null() ? std::nullopt
                                : std::optional<HallucinationSummary>(h.get<HallucinationSummary>());
}

void to_json(json& j, const BaselineEntry& b) {
  j = {{"program", b.program},
       {"metric", metrics::to_string(b.metric)},
       {"system", b.system},
       {"percent", b.percent},
       {"provenance", kBaselineProvenance}};
}

}  // namespace saferust::report
