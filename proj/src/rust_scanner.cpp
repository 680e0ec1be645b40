#include <cctype>
#include <set>
#include <string>
#include <vector>

#include "saferust/errors.hpp"
#include "saferust/verifier.hpp"

namespace saferust::verifier {

namespace {

enum class TokenKind { Ident, Punct, Literal, Lifetime };

struct Token {
  TokenKind kind;
  std::string_view text;
  std::size_t line;
};

bool is_ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }
bool is_ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c >= 0x80; }

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (pos_ < src_.size()) {
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else if (starts_with("//")) {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (starts_with("/*")) {
        block_comment();
      } else if (c == '"') {
        const std::size_t line = line_, begin = pos_;
        quoted('"');
        tokens.push_back({TokenKind::Literal, src_.substr(begin, pos_ - begin), line});
      } else if (c == '\'') {
        tokens.push_back(quote_or_lifetime());
      } else if (std::isdigit(c)) {
        tokens.push_back(number());
      } else if (is_ident_start(c)) {
        tokens.push_back(ident_or_prefixed_literal());
      } else {
        tokens.push_back({TokenKind::Punct, src_.substr(pos_, 1), line_});
        ++pos_;
      }
    }
    return tokens;
  }

 private:
  bool starts_with(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }
  char at(std::size_t p) const { return p < src_.size() ? src_[p] : '\0'; }

  void advance_counting_lines(std::size_t n) {
    for (std::size_t k = 0; k < n && pos_ < src_.size(); ++k, ++pos_) {
      if (src_[pos_] == '\n') ++line_;
    }
  }

  void block_comment() {
    int depth = 0;
    while (pos_ < src_.size()) {
      if (starts_with("/*")) {
        ++depth;
        pos_ += 2;
      } else if (starts_with("*/")) {
        pos_ += 2;
        if (--depth == 0) return;
      } else {
        advance_counting_lines(1);
      }
    }
  }

  // Consumes from the opening quote through the matching closing quote.
  void quoted(char quote) {
    ++pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\\') {
        advance_counting_lines(2);
      } else if (c == quote) {
        ++pos_;
        return;
      } else {
        advance_counting_lines(1);
      }
    }
  }

  // pos_ is at the first '#' or '"' after the r/br/cr prefix.
  void raw_string() {
    std::size_t hashes = 0;
    while (at(pos_) == '#') {
      ++hashes;
      ++pos_;
    }
    ++pos_;  // opening quote
    while (pos_ < src_.size()) {
      if (src_[pos_] == '"') {
        std::size_t k = 0;
        while (k < hashes && at(pos_ + 1 + k) == '#') ++k;
        if (k == hashes) {
          pos_ += 1 + hashes;
          return;
        }
      }
      advance_counting_lines(1);
    }
  }

  Token quote_or_lifetime() {
    const std::size_t begin = pos_, line = line_;
    const unsigned char next = static_cast<unsigned char>(at(pos_ + 1));
    if (next == '\\' || (next != '\0' && at(pos_ + 1 + utf8_length(next)) == '\'')) {
      quoted('\'');
      return {TokenKind::Literal, src_.substr(begin, pos_ - begin), line};
    }
    ++pos_;
    while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    return {TokenKind::Lifetime, src_.substr(begin, pos_ - begin), line};
  }

  Token number() {
    const std::size_t begin = pos_;
    while (pos_ < src_.size()) {
      const unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (std::isalnum(c) || c == '_') {
        ++pos_;
      } else if (c == '.' && std::isdigit(static_cast<unsigned char>(at(pos_ + 1)))) {
        ++pos_;
      } else {
        break;
      }
    }
    return {TokenKind::Literal, src_.substr(begin, pos_ - begin), line_};
  }

  Token ident_or_prefixed_literal() {
    const std::size_t begin = pos_, line = line_;
    while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view word = src_.substr(begin, pos_ - begin);
    const char next = at(pos_);

    if (word == "r" || word == "br" || word == "cr") {
      std::size_t p = pos_;
      while (at(p) == '#') ++p;
      if (at(p) == '"') {
        raw_string();
        return {TokenKind::Literal, src_.substr(begin, pos_ - begin), line};
      }
      if (word == "r" && next == '#' && is_ident_start(static_cast<unsigned char>(at(pos_ + 1)))) {
        // Raw identifier: the r# prefix stays in the text so `r#unsafe`
        // never compares equal to the keyword.
        ++pos_;
        while (pos_ < src_.size() && is_ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        return {TokenKind::Ident, src_.substr(begin, pos_ - begin), line};
      }
    }
    if ((word == "b" || word == "c") && next == '"') {
      quoted('"');
      return {TokenKind::Literal, src_.substr(begin, pos_ - begin), line};
    }
    if (word == "b" && next == '\'') {
      quoted('\'');
      return {TokenKind::Literal, src_.substr(begin, pos_ - begin), line};
    }
    return {TokenKind::Ident, word, line};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

bool is_punct(const Token& t, char c) { return t.kind == TokenKind::Punct && t.text[0] == c; }
bool is_ident(const Token& t, std::string_view word) {
  return t.kind == TokenKind::Ident && t.text == word;
}

// Index of the '{' starting the body of the fn whose `fn` keyword is at
// `fn_pos`, or npos for a declaration ending in ';'.
std::size_t find_fn_body(const std::vector<Token>& tokens, std::size_t fn_pos) {
  int parens = 0, brackets = 0;
  for (std::size_t k = fn_pos + 1; k < tokens.size(); ++k) {
    const Token& t = tokens[k];
    if (t.kind != TokenKind::Punct) continue;
    switch (t.text[0]) {
      case '(': ++parens; break;
      case ')': --parens; break;
      case '[': ++brackets; break;
      case ']': --brackets; break;
      case '{':
        if (parens <= 0 && brackets <= 0) return k;
        break;
      case ';':
        if (parens <= 0 && brackets <= 0) return std::string_view::npos;
        break;
      default: break;
    }
  }
  return std::string_view::npos;
}

}  // namespace

UnsafeScan scan_unsafe(std::string_view rust_source) {
  const std::vector<Token> tokens = Lexer(rust_source).run();

  std::vector<std::size_t> match(tokens.size(), std::string_view::npos);
  std::vector<int> depth_at(tokens.size(), 0);
  {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      depth_at[i] = static_cast<int>(open.size());
      if (is_punct(tokens[i], '{')) {
        open.push_back(i);
      } else if (is_punct(tokens[i], '}')) {
        if (open.empty()) {
          throw UnbalancedBraces("unmatched '}' at line " + std::to_string(tokens[i].line));
        }
        match[open.back()] = i;
        open.pop_back();
      }
    }
    if (!open.empty()) {
      throw UnbalancedBraces("unclosed '{' opened at line " +
                             std::to_string(tokens[open.back()].line));
    }
  }

  UnsafeScan scan;
  std::set<std::size_t> unsafe_lines;
  auto add_region = [&](std::size_t keyword, std::size_t open_brace) {
    ++scan.ub;
    const std::size_t last = tokens[match[open_brace]].line;
    for (std::size_t l = tokens[keyword].line; l <= last; ++l) unsafe_lines.insert(l);
  };

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token& t = tokens[i];

    if (is_punct(t, '#') && depth_at[i] == 0 && i + 4 < tokens.size() &&
        is_punct(tokens[i + 1], '!') && is_punct(tokens[i + 2], '[') &&
        (is_ident(tokens[i + 3], "forbid") || is_ident(tokens[i + 3], "deny")) &&
        is_punct(tokens[i + 4], '(')) {
      for (std::size_t k = i + 5; k < tokens.size() && !is_punct(tokens[k], ')'); ++k) {
        if (is_ident(tokens[k], "unsafe_code")) {
          (tokens[i + 3].text == "forbid" ? scan.forbid_attr : scan.deny_attr) = true;
        }
      }
      continue;
    }

    if (!is_ident(t, "unsafe") || i + 1 >= tokens.size()) continue;
    std::size_t j = i + 1;
    if (is_punct(tokens[j], '{')) {
      add_region(i, j);
      continue;
    }
    if (is_ident(tokens[j], "extern")) {
      ++j;
      if (j < tokens.size() && tokens[j].kind == TokenKind::Literal) ++j;
    }
    if (j < tokens.size() && is_ident(tokens[j], "fn")) {
      const std::size_t body = find_fn_body(tokens, j);
      if (body != std::string_view::npos) add_region(i, body);
    }
  }
  scan.uloc = unsafe_lines.size();
  return scan;
}

}  // namespace saferust::verifier
