#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "saferust/config.hpp"
#include "saferust/knowledge_base.hpp"
#include "saferust/llm_client.hpp"
#include "saferust/metrics.hpp"
#include "saferust/report.hpp"
#include "saferust/run_types.hpp"
#include "saferust/segmenter.hpp"
#include "saferust/verifier.hpp"

namespace saferust::pipeline {

struct TranspilationUnit {
  std::string program_name;
  std::string c_source;
  std::vector<segmenter::Segment> segments;
  std::string summary;
  std::vector<std::string> stage1_segments;
  std::vector<std::string> stage2_segments;
  std::string original_rust;
  std::string final_rust;
};

// Segments are joined with a single newline.
std::string reassemble_rust(const std::vector<std::string>& segments);

// One file per completed provider call. Writes go through a temporary file
// and a rename so an interrupted run never leaves a truncated entry. A
// default-constructed store keeps nothing.
class CheckpointStore {
 public:
  CheckpointStore() = default;
  explicit CheckpointStore(std::filesystem::path dir);

  bool enabled() const noexcept { return !dir_.empty(); }
  const std::filesystem::path& dir() const noexcept { return dir_; }

  std::optional<std::string> load(std::string_view key) const;
  void store(std::string_view key, std::string_view value) const;
  std::size_t size() const;

  // "<stage>-<segment>[.<piece>]-<bundle hash>"
  static std::string key(llm::Stage stage, std::size_t segment, std::optional<std::size_t> piece,
                         const llm::PromptBundle& bundle);

 private:
  std::filesystem::path dir_;
};

struct PipelineOptions {
  segmenter::SegmentOptions segment;
  std::size_t k = 4;
  std::size_t parallel = 1;
  kb::RechunkConfig rechunk;
  bool refine_includes_summary = true;
};

// Everything a run needs besides its input. `index` and `embedder` may be
// null, in which case prompts carry no retrieved context.
struct Services {
  std::shared_ptr<llm::LlmClient> client;
  llm::PromptTemplates templates;
  llm::GenerationConfig generation;
  std::shared_ptr<const kb::Embedder> embedder;
  std::shared_ptr<const kb::KnowledgeIndex> index;
};

class Pipeline {
 public:
  Pipeline(Services services, PipelineOptions options, CheckpointStore checkpoints = {});

  std::vector<segmenter::Segment> segment(std::string_view c_source) const;
  std::string summarize(std::string_view c_source) const;

  // Stage 1: one unsafe-permitted Rust segment per C segment, in order.
  // `segments` and `summary` are computed when not supplied.
  TranspilationUnit transpile_program(std::string program_name, std::string_view c_source) const;
  TranspilationUnit transpile_program(std::string program_name, std::string_view c_source,
                                      std::vector<segmenter::Segment> segments,
                                      std::string summary) const;

  // Stage 2. Stage-1 segments over the re-chunk limit are refined piecewise
  // and the pieces joined with a newline.
  void refine_program(TranspilationUnit& unit) const;

  // Unparseable answers become unreported segments.
  std::pair<SelfReportedCounts, SelfReportedCounts> self_report(
      const TranspilationUnit& unit) const;

  std::vector<kb::RetrievalResult> retrieve(std::string_view query) const;

  const PipelineOptions& options() const noexcept { return options_; }
  const Services& services() const noexcept { return services_; }

 private:
  std::string call(llm::Stage stage, std::size_t segment, std::optional<std::size_t> piece,
                   const llm::PromptBundle& bundle) const;

  Services services_;
  PipelineOptions options_;
  CheckpointStore checkpoints_;
};

// Runs body(i) for i in [0, n) on up to `parallel` threads. When several
// indices throw, the exception of the lowest index is rethrown after all
// workers stop.
void parallel_for(std::size_t n, std::size_t parallel,
                  const std::function<void(std::size_t)>& body);

inline constexpr int kRunLayoutVersion = 1;
inline constexpr const char* kStageNames[] = {"segment",     "summarize", "transpile",
                                              "refine",      "self_report", "verify"};

struct RunRequest {
  std::string program_name;
  std::string c_source;
  std::filesystem::path run_dir;
  // Reuse checkpoints in an existing run directory. Its manifest must name
  // the same input and configuration hash.
  bool resume = false;
};

struct RunArtifacts {
  std::filesystem::path run_dir;
  TranspilationUnit unit;
  SelfReportedCounts self_original;
  SelfReportedCounts self_final;
  verifier::Verification verified_original;
  verifier::Verification verified_final;
  report::ReportRow row;
};

// Builds client, templates, embedder and index from a configuration. The
// API key is read from the environment variable named by the config.
Services make_services(const AppConfig& config);
PipelineOptions make_options(const AppConfig& config);

// Writes the run directory:
//   manifest.json  input.c  segments.json  summary.txt  original.rs  final.rs
//   self_report.json  verification.json  metrics.json  report.md  report.json
//   checkpoints/  verify/original/  verify/final/
// A stage failure is recorded in the manifest and rethrown.
RunArtifacts run_full(const RunRequest& request, const AppConfig& config, Services services);

// The stage plan `run --dry-run` prints; makes no provider calls.
std::string describe_plan(const RunRequest& request, const AppConfig& config);

}  // namespace saferust::pipeline
