#include "saferust/verifier.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>
#include <system_error>

#include "saferust/errors.hpp"
#include "saferust/process.hpp"

namespace saferust::verifier {

namespace fs = std::filesystem;
using nlohmann::json;

ErrorCodeCounts count_error_codes(const std::vector<Diagnostic>& diagnostics) {
  ErrorCodeCounts counts;
  for (const Diagnostic& d : diagnostics) {
    if (std::ranges::find(kRpdCodes, d.code) != std::end(kRpdCodes)) ++counts.rpd;
    if (std::ranges::find(kUtcCodes, d.code) != std::end(kUtcCodes)) ++counts.utc;
  }
  return counts;
}

std::vector<Diagnostic> parse_json_diagnostics(std::string_view stream, std::size_t* parsed) {
  std::vector<Diagnostic> out;
  std::size_t objects = 0;
  std::istringstream lines{std::string(stream)};
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line.front() != '{') continue;
    json d = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (!d.is_object()) continue;
    ++objects;
    if (d.contains("$message_type") && d["$message_type"] != "diagnostic") continue;

    Diagnostic diag;
    diag.level = d.value("level", "");
    diag.message = d.value("message", "");
    if (d.contains("code") && d["code"].is_object()) {
      diag.code = d["code"].value("code", "");
    }
    for (const auto& span : d.value("spans", json::array())) {
      if (span.value("is_primary", false)) {
        diag.line = span.value("line_start", std::size_t{0});
        diag.span_file = span.value("file_name", "");
        break;
      }
    }
    out.push_back(std::move(diag));
  }
  if (parsed) *parsed = objects;
  return out;
}

std::vector<Diagnostic> parse_grep_diagnostics(std::string_view output) {
  static const std::regex header(R"(^(error|warning)\[(E\d{4})\]: (.*)$)");
  static const std::regex location(R"(^\s*--> (.+):(\d+):\d+\s*$)");
  std::vector<Diagnostic> out;
  std::istringstream lines{std::string(output)};
  std::string line;
  std::smatch m;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (std::regex_match(line, m, header)) {
      out.push_back({m[2].str(), m[1].str(), m[3].str(), 0, ""});
    } else if (!out.empty() && out.back().line == 0 && std::regex_match(line, m, location)) {
      out.back().span_file = m[1].str();
      out.back().line = std::stoul(m[2].str());
    }
  }
  return out;
}

std::vector<Diagnostic> compile_and_diagnose(const fs::path& rust_file, const fs::path& workdir,
                                             const CompilerOptions& options) {
  fs::create_directories(workdir);
  const fs::path source = fs::proximate(fs::absolute(rust_file), fs::absolute(workdir));
  std::vector<std::string> argv = {options.rustc,  "--edition",        options.edition,
                                   "--crate-type", options.crate_type, "--crate-name",
                                   "verified",     "--emit=metadata",  "-o",
                                   "verified.rmeta"};
  if (options.mode == DiagnosticMode::Json) {
    argv.push_back("--error-format=json");
  } else {
    argv.push_back("--color=never");
  }
  argv.push_back(source.string());

  ProcessResult result;
  try {
    result = run_process(argv, workdir);
  } catch (const std::system_error& e) {
    if (e.code().value() == ENOENT) {
      throw ToolchainMissing("Rust compiler not found: " + options.rustc);
    }
    throw ToolchainMissing("cannot run " + options.rustc + ": " + e.what());
  }
  std::error_code ignored;
  fs::remove(workdir / "verified.rmeta", ignored);

  if (options.mode == DiagnosticMode::Grep) {
    auto diags = parse_grep_diagnostics(result.output);
    if (result.exit_code != 0 && result.output.find("error") == std::string::npos) {
      throw CompilerCrash("rustc exited with " + std::to_string(result.exit_code) +
                          " without diagnostics");
    }
    return diags;
  }
  std::size_t parsed = 0;
  auto diags = parse_json_diagnostics(result.output, &parsed);
  if (result.exit_code != 0 && parsed == 0) {
    throw CompilerCrash("rustc exited with " + std::to_string(result.exit_code) +
                        " and unparseable output: " + result.output.substr(0, 200));
  }
  return diags;
}

Verification verify_detailed(std::string_view rust_source, const fs::path& workdir,
                             const VerifyOptions& options, std::string_view file_name) {
  Verification v;
  const UnsafeScan scan = scan_unsafe(rust_source);
  v.counts.ub = scan.ub;
  v.counts.uloc = scan.uloc;
  v.counts.forbid_attr = scan.forbid_attr;
  v.counts.deny_attr = scan.deny_attr;

  if (options.mode == VerifyMode::Compiler) {
    fs::create_directories(workdir);
    const fs::path file = workdir / fs::path(file_name);
    {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      out << rust_source;
    }
    v.diagnostics = compile_and_diagnose(file, workdir, options.compiler);
    const ErrorCodeCounts codes = count_error_codes(v.diagnostics);
    v.counts.rpd = codes.rpd;
    v.counts.utc = codes.utc;
    v.compiler_checked = true;
  }
  return v;
}

bool toolchain_available(const CompilerOptions& options) {
  try {
    const auto result = run_process({options.rustc, "--version"}, fs::temp_directory_path());
    return result.exit_code == 0;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace saferust::verifier
