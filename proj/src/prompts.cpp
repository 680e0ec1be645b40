#include <cstdio>
#include <fstream>
#include <sstream>

#include "saferust/errors.hpp"
#include "saferust/llm_client.hpp"
#include "saferust/prompt_defaults.hpp"

namespace saferust::llm {

namespace {

std::string read_template(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("missing prompt template " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void append_summary(std::string& out, std::string_view summary) {
  if (summary.empty()) return;
  out += "### Program summary\n";
  out += summary;
  out += "\n\n";
}

void append_context(std::string& out, const std::vector<kb::RetrievalResult>& context) {
  if (context.empty()) return;
  out += "### Reference material\n";
  out += kContextBegin;
  out += '\n';
  for (std::size_t i = 0; i < context.size(); ++i) {
    const auto& hit = context[i];
    char header[64];
    std::snprintf(header, sizeof header, " (score %.4f)\n", hit.score);
    out += '[' + std::to_string(i + 1) + "] " + hit.chunk.doc_id + '#' +
           std::to_string(hit.chunk.chunk_index) + header;
    out += hit.chunk.text;
    out += '\n';
  }
  out += kContextEnd;
  out += "\n\n";
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
  return {defaults::kPromptVersion, defaults::k_summarize, defaults::k_transpile,
          defaults::k_refine, defaults::k_self_report};
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t;
  t.version = dir.filename().string();
  if (t.version.empty()) t.version = dir.parent_path().filename().string();
  t.summarize = read_template(dir / "summarize.txt");
  t.transpile = read_template(dir / "transpile.txt");
  t.refine = read_template(dir / "refine.txt");
  t.self_report = read_template(dir / "self_report.txt");
  return t;
}

PromptBundle build_summary_prompt(const PromptTemplates& templates, std::string_view c_source) {
  if (c_source.empty()) throw PreconditionError("cannot summarize an empty program");
  std::string user = "### C program\n";
  user += c_source;
  return {templates.summarize, std::move(user), Stage::Summarize};
}

PromptBundle build_transpile_prompt(const PromptTemplates& templates,
                                    const segmenter::Segment& segment, std::string_view summary,
                                    const std::vector<kb::RetrievalResult>& context) {
  if (segment.text.empty()) throw PreconditionError("cannot transpile an empty segment");
  std::string user;
  append_summary(user, summary);
  append_context(user, context);
  user += "### C segment\n";
  user += segment.text;
  return {templates.transpile, std::move(user), Stage::Transpile};
}

PromptBundle build_refine_prompt(const PromptTemplates& templates, std::string_view rust_segment,
                                 const std::vector<kb::RetrievalResult>& context,
                                 std::string_view summary) {
  if (rust_segment.empty()) throw PreconditionError("cannot refine an empty Rust segment");
  std::string user;
  append_summary(user, summary);
  append_context(user, context);
  user += "### Rust segment\n";
  user += rust_segment;
  return {templates.refine, std::move(user), Stage::Refine};
}

PromptBundle build_self_report_prompt(const PromptTemplates& templates,
                                      std::string_view rust_segment) {
  if (rust_segment.empty()) throw PreconditionError("cannot audit an empty Rust segment");
  std::string user = "### Rust segment\n";
  user += rust_segment;
  return {templates.self_report, std::move(user), Stage::SelfReport};
}

}  // namespace saferust::llm
