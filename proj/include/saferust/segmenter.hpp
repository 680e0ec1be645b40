#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace saferust::segmenter {

inline constexpr std::size_t kDefaultMinSegmentChars = 500;

// One brace-balanced slice of a C source file. Offsets and counts are in
// bytes of the original file.
struct Segment {
  std::size_t index = 0;
  std::string text;
  std::size_t start_offset = 0;
  int brace_depth_at_start = 0;
  std::size_t char_count = 0;

  friend bool operator==(const Segment&, const Segment&) = default;
};

enum class BraceMode {
  // Braces inside comments, string literals and character literals are ignored.
  Lexical,
  // Every '{' and '}' byte counts.
  Naive,
};

struct SegmentOptions {
  std::size_t min_segment_chars = kDefaultMinSegmentChars;
  BraceMode mode = BraceMode::Lexical;
};

// Splits `source` into segments. A boundary is placed right after a closing
// brace that returns the depth to zero once the buffer holds more than
// `min_segment_chars` bytes; trailing `;`, blanks and one line break on the
// same line are kept with the segment. Leftover text at end of input becomes
// a final, possibly short, segment.
//
// Throws UnbalancedSource if the depth goes negative or is nonzero at the end.
std::vector<Segment> segment_source(std::string_view source, const SegmentOptions& options = {});

// Concatenates segments. Throws GapDetected unless indices run 0..n-1 and each
// segment starts where the previous one ended.
std::string reassemble(const std::vector<Segment>& segments);

// Opening minus closing braces, honoring `mode`.
int brace_depth(std::string_view text, BraceMode mode = BraceMode::Lexical);

}  // namespace saferust::segmenter
