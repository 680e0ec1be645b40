#include "saferust/segmenter.hpp"

#include <string>

#include "saferust/errors.hpp"

namespace saferust::segmenter {

namespace {

struct BraceEvent {
  std::size_t pos;
  int delta;
};

// Minimal C lexer: enough to know which braces are code. Unterminated string
// and character literals end at an unescaped line break so a stray quote in a
// preprocessor line cannot swallow the rest of the file.
std::vector<BraceEvent> brace_events(std::string_view text, BraceMode mode) {
  std::vector<BraceEvent> events;
  const std::size_t n = text.size();

  if (mode == BraceMode::Naive) {
    for (std::size_t i = 0; i < n; ++i) {
      if (text[i] == '{') events.push_back({i, +1});
      if (text[i] == '}') events.push_back({i, -1});
    }
    return events;
  }

  enum class State { Code, LineComment, BlockComment, String, Char };
  State state = State::Code;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = text[i];
    const char next = i + 1 < n ? text[i + 1] : '\0';
    switch (state) {
      case State::Code:
        if (c == '/' && next == '/') {
          state = State::LineComment;
          ++i;
        } else if (c == '/' && next == '*') {
          state = State::BlockComment;
          ++i;
        } else if (c == '"') {
          state = State::String;
        } else if (c == '\'') {
          state = State::Char;
        } else if (c == '{') {
          events.push_back({i, +1});
        } else if (c == '}') {
          events.push_back({i, -1});
        }
        break;
      case State::LineComment:
        if (c == '\\' && next == '\n') {
          ++i;
        } else if (c == '\\' && next == '\r' && i + 2 < n && text[i + 2] == '\n') {
          i += 2;
        } else if (c == '\n') {
          state = State::Code;
        }
        break;
      case State::BlockComment:
        if (c == '*' && next == '/') {
          state = State::Code;
          ++i;
        }
        break;
      case State::String:
      case State::Char: {
        const char quote = state == State::String ? '"' : '\'';
        if (c == '\\') {
          ++i;
        } else if (c == quote || c == '\n') {
          state = State::Code;
        }
        break;
      }
    }
  }
  return events;
}

std::size_t line_of(std::string_view text, std::size_t pos) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < pos && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

Segment make_segment(std::string_view source, std::size_t index, std::size_t begin,
                     std::size_t end) {
  Segment s;
  s.index = index;
  s.start_offset = begin;
  s.text = std::string(source.substr(begin, end - begin));
  s.char_count = s.text.size();
  s.brace_depth_at_start = 0;
  return s;
}

}  // namespace

std::vector<Segment> segment_source(std::string_view source, const SegmentOptions& options) {
  if (options.min_segment_chars < 1) {
    throw PreconditionError("min_segment_chars must be at least 1");
  }
  std::vector<Segment> segments;
  const std::size_t n = source.size();
  int depth = 0;
  std::size_t seg_begin = 0;

  for (const BraceEvent& ev : brace_events(source, options.mode)) {
    depth += ev.delta;
    if (depth < 0) {
      throw UnbalancedSource("unmatched '}' at line " + std::to_string(line_of(source, ev.pos)));
    }
    if (ev.delta > 0 || depth != 0) continue;

    std::size_t end = ev.pos + 1;
    if (end - seg_begin <= options.min_segment_chars) continue;

    while (end < n && (source[end] == ' ' || source[end] == '\t' || source[end] == ';')) ++end;
    if (end + 1 < n && source[end] == '\r' && source[end + 1] == '\n') {
      end += 2;
    } else if (end < n && source[end] == '\n') {
      ++end;
    }
    segments.push_back(make_segment(source, segments.size(), seg_begin, end));
    seg_begin = end;
  }

  if (depth != 0) {
    throw UnbalancedSource("end of input reached with " + std::to_string(depth) +
                           " unclosed '{'");
  }
  if (seg_begin < n) {
    segments.push_back(make_segment(source, segments.size(), seg_begin, n));
  }
  return segments;
}

std::string reassemble(const std::vector<Segment>& segments) {
  std::string out;
  std::size_t expected_offset = 0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    if (s.index != i) {
      throw GapDetected("segment at position " + std::to_string(i) + " has index " +
                        std::to_string(s.index));
    }
    if (s.start_offset != expected_offset || s.char_count != s.text.size()) {
      throw GapDetected("segment " + std::to_string(i) + " starts at " +
                        std::to_string(s.start_offset) + ", expected " +
                        std::to_string(expected_offset));
    }
    out += s.text;
    expected_offset += s.char_count;
  }
  return out;
}

int brace_depth(std::string_view text, BraceMode mode) {
  int depth = 0;
  for (const BraceEvent& ev : brace_events(text, mode)) depth += ev.delta;
  return depth;
}

}  // namespace saferust::segmenter
