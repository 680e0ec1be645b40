#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace saferust::verifier {

struct Diagnostic {
  std::string code;  // "E0133"; empty for diagnostics without a code
  std::string level;
  std::string message;
  std::size_t line = 0;
  std::string span_file;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct SafetyCounts {
  std::size_t rpd = 0;
  std::size_t utc = 0;
  std::size_t ub = 0;    // unsafe blocks + unsafe functions
  std::size_t uloc = 0;  // physical lines inside any unsafe region
  bool forbid_attr = false;
  bool deny_attr = false;

  friend bool operator==(const SafetyCounts&, const SafetyCounts&) = default;
};

inline constexpr std::string_view kRpdCodes[] = {"E0133", "E0392", "E0793"};
inline constexpr std::string_view kUtcCodes[] = {"E0604", "E0605", "E0606", "E0607"};

struct ErrorCodeCounts {
  std::size_t rpd = 0;
  std::size_t utc = 0;

  friend bool operator==(const ErrorCodeCounts&, const ErrorCodeCounts&) = default;
};

// Counts occurrences of the RPD and UTC code sets; other codes are ignored.
ErrorCodeCounts count_error_codes(const std::vector<Diagnostic>& diagnostics);

struct UnsafeScan {
  std::size_t ub = 0;
  std::size_t uloc = 0;
  bool forbid_attr = false;
  bool deny_attr = false;

  friend bool operator==(const UnsafeScan&, const UnsafeScan&) = default;
};

// Lexical scan of Rust source. An unsafe region runs from the `unsafe`
// keyword to the brace closing its block or function body; `unsafe impl`,
// `unsafe trait`, unsafe extern blocks and body-less `unsafe fn`
// declarations are not regions. Every physical line touched by a region is
// counted once, blank and comment lines included. The attribute flags are
// set by `#![forbid(unsafe_code)]` / `#![deny(unsafe_code)]` outside any
// braces. Throws UnbalancedBraces.
UnsafeScan scan_unsafe(std::string_view rust_source);

enum class DiagnosticMode {
  // rustc --error-format=json
  Json,
  // Human-readable output matched against `error[Ennnn]`, as a shell
  // script grepping compiler output would.
  Grep,
};

struct CompilerOptions {
  std::string rustc = "rustc";
  std::string edition = "2021";
  std::string crate_type = "bin";
  DiagnosticMode mode = DiagnosticMode::Json;
};

// Parses a rustc JSON diagnostic stream (one object per line). Lines that are
// not JSON objects are skipped; returns the number of parsed objects through
// `parsed` when non-null.
std::vector<Diagnostic> parse_json_diagnostics(std::string_view stream,
                                               std::size_t* parsed = nullptr);
std::vector<Diagnostic> parse_grep_diagnostics(std::string_view output);

// Compiles `rust_file` from inside `workdir` (created if missing) with
// --emit=metadata. A failing compile is not an error: its diagnostics are the
// result. Throws ToolchainMissing or CompilerCrash.
std::vector<Diagnostic> compile_and_diagnose(const std::filesystem::path& rust_file,
                                             const std::filesystem::path& workdir,
                                             const CompilerOptions& options = {});

enum class VerifyMode {
  Compiler,
  // scan_unsafe only; rpd and utc stay zero.
  ScanOnly,
};

struct VerifyOptions {
  VerifyMode mode = VerifyMode::Compiler;
  CompilerOptions compiler;
};

struct Verification {
  SafetyCounts counts;
  std::vector<Diagnostic> diagnostics;
  bool compiler_checked = false;
};

// Writes `rust_source` to workdir/<file_name>, compiles it and scans it.
Verification verify_detailed(std::string_view rust_source, const std::filesystem::path& workdir,
                             const VerifyOptions& options = {},
                             std::string_view file_name = "main.rs");

inline SafetyCounts verify(std::string_view rust_source, const std::filesystem::path& workdir,
                           const VerifyOptions& options = {}) {
  return verify_detailed(rust_source, workdir, options).counts;
}

// True when `rustc --version` runs.
bool toolchain_available(const CompilerOptions& options = {});

}  // namespace saferust::verifier
