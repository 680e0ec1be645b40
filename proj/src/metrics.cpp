#include "saferust/metrics.hpp"

#include <cmath>

#include "saferust/errors.hpp"

namespace saferust::metrics {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::RPD: return "RPD";
    case MetricKind::UTC: return "UTC";
    case MetricKind::ULoC: return "ULoC";
    case MetricKind::UB: return "UB";
  }
  return "?";
}

MetricKind metric_kind_from_string(std::string_view name) {
  if (name == "RPD") return MetricKind::RPD;
  if (name == "UTC") return MetricKind::UTC;
  if (name == "ULoC") return MetricKind::ULoC;
  if (name == "UB") return MetricKind::UB;
  throw PreconditionError("unknown metric kind '" + std::string(name) + "'");
}

long round_half_away_from_zero(double value) {
  const long r = std::lround(value);
  return r == 0 ? 0 : r;
}

long ChangeValue::rounded() const { return round_half_away_from_zero(percent); }

std::string ChangeValue::display() const {
  switch (notation) {
    case Notation::Dash: return "--";
    case Notation::BangDash: return "!--";
    case Notation::Percent: break;
  }
  return std::to_string(rounded()) + "%";
}

ChangeValue percent_change(std::size_t original, std::size_t final_count) {
  if (original == 0) {
    return {final_count == 0 ? Notation::Dash : Notation::BangDash, 0.0};
  }
  const double o = static_cast<double>(original);
  const double f = static_cast<double>(final_count);
  return {Notation::Percent, (o - f) / o * 100.0};
}

std::vector<ChangeMetric> compare_runs(const verifier::SafetyCounts& original,
                                       const verifier::SafetyCounts& final_counts) {
  auto metric = [](MetricKind kind, std::size_t o, std::size_t f) {
    return ChangeMetric{kind, o, f, percent_change(o, f)};
  };
  return {
      metric(MetricKind::RPD, original.rpd, final_counts.rpd),
      metric(MetricKind::UTC, original.utc, final_counts.utc),
      metric(MetricKind::ULoC, original.uloc, final_counts.uloc),
      metric(MetricKind::UB, original.ub, final_counts.ub),
  };
}

HallucinationReport hallucination_deviation(std::size_t self_reported, std::size_t verified) {
  HallucinationReport r;
  r.self_reported = self_reported;
  r.verified = verified;
  r.absolute_deviation = self_reported > verified ? self_reported - verified
                                                  : verified - self_reported;
  if (verified > 0) {
    r.relative_deviation =
        static_cast<double>(r.absolute_deviation) / static_cast<double>(verified);
  } else {
    r.fabricated = self_reported > 0;
  }
  return r;
}

}  // namespace saferust::metrics
