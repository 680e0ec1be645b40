#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "saferust/verifier.hpp"

namespace saferust::metrics {

enum class MetricKind { RPD, UTC, ULoC, UB };

std::string_view to_string(MetricKind kind);
MetricKind metric_kind_from_string(std::string_view name);

enum class Notation {
  Percent,
  Dash,      // "--": zero before and after
  BangDash,  // "!--": zero before, unsafe constructs introduced after
};

struct ChangeValue {
  Notation notation = Notation::Dash;
  // (original - final) / original * 100 at full precision; meaningful only
  // for Notation::Percent.
  double percent = 0.0;

  // Rounded half away from zero; "-0" never appears.
  long rounded() const;
  // "97%", "-367%", "--" or "!--".
  std::string display() const;

  friend bool operator==(const ChangeValue&, const ChangeValue&) = default;
};

ChangeValue percent_change(std::size_t original, std::size_t final_count);

long round_half_away_from_zero(double value);

struct ChangeMetric {
  MetricKind kind = MetricKind::RPD;
  std::size_t original = 0;
  std::size_t final_count = 0;
  ChangeValue value;

  friend bool operator==(const ChangeMetric&, const ChangeMetric&) = default;
};

// RPD, UTC, ULoC, UB in that order.
std::vector<ChangeMetric> compare_runs(const verifier::SafetyCounts& original,
                                       const verifier::SafetyCounts& final_counts);

struct HallucinationReport {
  std::size_t self_reported = 0;
  std::size_t verified = 0;
  std::size_t absolute_deviation = 0;
  // |self - verified| / verified; absent when verified == 0.
  std::optional<double> relative_deviation;
  // verified == 0 while the model claims constructs exist.
  bool fabricated = false;

  friend bool operator==(const HallucinationReport&, const HallucinationReport&) = default;
};

HallucinationReport hallucination_deviation(std::size_t self_reported, std::size_t verified);

}  // namespace saferust::metrics
