#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "saferust/llm_client.hpp"

namespace saferust {

// Model self-assessment of one program version. Segments whose answer could
// not be parsed are nullopt and excluded from the totals.
struct SelfReportedCounts {
  std::size_t rpd = 0;
  std::size_t utc = 0;
  std::vector<std::optional<llm::SelfReport>> per_segment;

  static SelfReportedCounts from_segments(std::vector<std::optional<llm::SelfReport>> segments) {
    SelfReportedCounts c;
    for (const auto& s : segments) {
      if (!s) continue;
      c.rpd += s->rpd;
      c.utc += s->utc;
    }
    c.per_segment = std::move(segments);
    return c;
  }

  bool has_unreported() const {
    for (const auto& s : per_segment) {
      if (!s) return true;
    }
    return false;
  }

  friend bool operator==(const SelfReportedCounts&, const SelfReportedCounts&) = default;
};

}  // namespace saferust
