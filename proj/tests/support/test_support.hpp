#pragma once

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace saferust::testing {

inline constexpr std::uint64_t kSeed = 0x5afe'2057;

inline std::filesystem::path source_dir() { return SAFERUST_SOURCE_DIR; }

class TempDir {
 public:
  explicit TempDir(std::string_view prefix = "saferust-test") {
    std::string pattern =
        (std::filesystem::temp_directory_path() / (std::string(prefix) + "-XXXXXX")).string();
    if (!::mkdtemp(pattern.data())) throw std::runtime_error("mkdtemp failed");
    path_ = pattern;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(std::string_view name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// Relative path -> content for every file under `root`. Manifest timestamps
// are blanked so two runs can be compared byte for byte.
inline std::map<std::string, std::string> snapshot_run(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = std::filesystem::relative(entry.path(), root).generic_string();
    std::string content = read_file(entry.path());
    if (rel == "manifest.json") {
      auto doc = nlohmann::json::parse(content);
      for (auto& stage : doc["stages"]) {
        stage["started_at"] = nullptr;
        stage["finished_at"] = nullptr;
      }
      content = doc.dump(2);
    }
    files[rel] = std::move(content);
  }
  return files;
}

// Brace-balanced C-like text. Braces also appear inside comments, string
// literals and character literals, where a lexical brace counter must
// ignore them.
class CProgramGenerator {
 public:
  explicit CProgramGenerator(std::uint64_t seed) : rng_(seed) {}

  std::string program(std::size_t approx_len) {
    std::string out;
    while (out.size() < approx_len) {
      out += top_level_item();
    }
    return out;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  std::string ident() {
    static constexpr std::string_view names[] = {"buf", "len", "count", "ptr", "idx", "fd",
                                                 "line", "total", "width", "flags"};
    return std::string(names[pick(std::size(names))]) + std::to_string(pick(100));
  }

  std::string noise() {
    switch (pick(8)) {
      case 0: return "  /* closing } brace { in comment */\n";
      case 1: return "  // stray } here\n";
      case 2: return "  puts(\"{ not a block }\");\n";
      case 3: return "  char c = '}';\n";
      case 4: return "  char o = '{';\n";
      case 5: return "  const char *e = \"esc \\\" } \";\n";
      default: return "  " + ident() + " += " + std::to_string(pick(1000)) + ";\n";
    }
  }

  std::string block(int depth) {
    std::string out = "{\n";
    const std::size_t lines = 1 + pick(6);
    for (std::size_t i = 0; i < lines; ++i) {
      if (depth < 3 && pick(4) == 0) {
        out += "  if (" + ident() + ") " + block(depth + 1);
      } else {
        out += noise();
      }
    }
    out += "}\n";
    return out;
  }

  std::string top_level_item() {
    switch (pick(5)) {
      case 0: return "#include <stdio.h>\n";
      case 1: return "static int " + ident() + " = " + std::to_string(pick(50)) + ";\n";
      case 2: return "struct s" + std::to_string(pick(1000)) + " { int a; char *b; };\n";
      default: return "int f_" + ident() + "(int a, char **argv)\n" + block(0);
    }
  }

  std::mt19937_64 rng_;
};

}  // namespace saferust::testing
