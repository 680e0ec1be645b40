#include "saferust/pipeline.hpp"

#include <atomic>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "saferust/errors.hpp"
#include "saferust/hash.hpp"
#include "saferust/json_io.hpp"
#include "saferust/providers.hpp"

namespace saferust::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

std::string reassemble_rust(const std::vector<std::string>& segments) {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out += '\n';
    out += segments[i];
  }
  return out;
}

void parallel_for(std::size_t n, std::size_t parallel,
                  const std::function<void(std::size_t)>& body) {
  if (n == 0) return;
  parallel = std::clamp<std::size_t>(parallel, 1, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  // Indices are claimed in increasing order, so every index skipped after a
  // failure is higher than the failing one.
  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next++;
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        failed = true;
      }
    }
  };
  if (parallel == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    threads.reserve(parallel);
    for (std::size_t t = 0; t < parallel; ++t) threads.emplace_back(worker);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

Pipeline::Pipeline(Services services, PipelineOptions options, CheckpointStore checkpoints)
    : services_(std::move(services)), options_(options), checkpoints_(std::move(checkpoints)) {
  if (!services_.client) throw PreconditionError("pipeline needs an LLM client");
  if (options_.parallel == 0) throw PreconditionError("parallelism bound must be positive");
}

std::string Pipeline::call(llm::Stage stage, std::size_t segment, std::optional<std::size_t> piece,
                           const llm::PromptBundle& bundle) const {
  const std::string key = CheckpointStore::key(stage, segment, piece, bundle);
  if (auto cached = checkpoints_.load(key)) return *std::move(cached);
  std::string text = services_.client->complete(bundle, services_.generation);
  checkpoints_.store(key, text);
  return text;
}

std::vector<kb::RetrievalResult> Pipeline::retrieve(std::string_view query) const {
  if (!services_.index || !services_.embedder || services_.index->empty()) return {};
  return services_.index->retrieve(*services_.embedder, query, options_.k);
}

std::vector<segmenter::Segment> Pipeline::segment(std::string_view c_source) const {
  if (c_source.empty()) throw PreconditionError("cannot transpile an empty program");
  return segmenter::segment_source(c_source, options_.segment);
}

std::string Pipeline::summarize(std::string_view c_source) const {
  std::string summary =
      call(llm::Stage::Summarize, 0, std::nullopt,
           llm::build_summary_prompt(services_.templates, c_source));
  if (summary.size() > llm::kMaxSummaryChars) summary.resize(llm::kMaxSummaryChars);
  return summary;
}

TranspilationUnit Pipeline::transpile_program(std::string program_name,
                                              std::string_view c_source) const {
  auto segments = segment(c_source);
  auto summary = summarize(c_source);
  return transpile_program(std::move(program_name), c_source, std::move(segments),
                           std::move(summary));
}

TranspilationUnit Pipeline::transpile_program(std::string program_name, std::string_view c_source,
                                              std::vector<segmenter::Segment> segments,
                                              std::string summary) const {
  if (segments.empty()) throw PreconditionError("cannot transpile an empty program");
  TranspilationUnit unit;
  unit.program_name = std::move(program_name);
  unit.c_source = std::string(c_source);
  unit.segments = std::move(segments);
  unit.summary = std::move(summary);
  unit.stage1_segments.assign(unit.segments.size(), {});

  parallel_for(unit.segments.size(), options_.parallel, [&](std::size_t i) {
    const auto& seg = unit.segments[i];
    const auto bundle = llm::build_transpile_prompt(services_.templates, seg, unit.summary,
                                                    retrieve(seg.text));
    unit.stage1_segments[i] = call(llm::Stage::Transpile, i, std::nullopt, bundle);
  });
  unit.original_rust = reassemble_rust(unit.stage1_segments);
  return unit;
}

void Pipeline::refine_program(TranspilationUnit& unit) const {
  if (unit.stage1_segments.empty() || unit.stage1_segments.size() != unit.segments.size()) {
    throw PreconditionError("refinement needs a completed first stage");
  }
  const std::string_view summary =
      options_.refine_includes_summary ? std::string_view(unit.summary) : std::string_view();
  std::vector<std::string> refined(unit.stage1_segments.size());

  parallel_for(refined.size(), options_.parallel, [&](std::size_t i) {
    const auto pieces = kb::rechunk_generated(unit.stage1_segments[i], options_.rechunk);
    std::vector<std::string> outputs;
    outputs.reserve(pieces.size());
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      const auto bundle = llm::build_refine_prompt(services_.templates, pieces[p].text,
                                                   retrieve(pieces[p].text), summary);
      outputs.push_back(call(llm::Stage::Refine, i,
                             pieces.size() > 1 ? std::optional<std::size_t>(p) : std::nullopt,
                             bundle));
    }
    refined[i] = reassemble_rust(outputs);
  });
  unit.stage2_segments = std::move(refined);
  unit.final_rust = reassemble_rust(unit.stage2_segments);
}

std::pair<SelfReportedCounts, SelfReportedCounts> Pipeline::self_report(
    const TranspilationUnit& unit) const {
  const std::size_t n = unit.stage1_segments.size();
  if (n == 0 || unit.stage2_segments.size() != n) {
    throw PreconditionError("self-report needs both stages completed");
  }
  std::vector<std::optional<llm::SelfReport>> answers(2 * n);
  parallel_for(2 * n, options_.parallel, [&](std::size_t i) {
    const bool original = i < n;
    const std::string& rust = original ? unit.stage1_segments[i] : unit.stage2_segments[i - n];
    const auto bundle = llm::build_self_report_prompt(services_.templates, rust);
    try {
      answers[i] = llm::parse_self_report(call(llm::Stage::SelfReport, i, std::nullopt, bundle));
    } catch (const SelfReportParseError&) {
      answers[i] = std::nullopt;
    } catch (const EmptyResponse&) {
      answers[i] = std::nullopt;
    }
  });
  std::vector<std::optional<llm::SelfReport>> first(answers.begin(), answers.begin() + n);
  std::vector<std::optional<llm::SelfReport>> second(answers.begin() + n, answers.end());
  return {SelfReportedCounts::from_segments(std::move(first)),
          SelfReportedCounts::from_segments(std::move(second))};
}

// ---------------------------------------------------------------------------

namespace {

llm::Stage stage_from_string(std::string_view name) {
  for (auto s : {llm::Stage::Summarize, llm::Stage::Transpile, llm::Stage::Refine,
                 llm::Stage::SelfReport}) {
    if (llm::to_string(s) == name) return s;
  }
  throw ConfigError("unknown stage " + std::string(name));
}

llm::HttpEndpoint endpoint_for(const AppConfig& config) {
  const char* key = std::getenv(config.provider.api_key_env.c_str());
  if (!key || !*key) {
    throw ConfigError("environment variable " + config.provider.api_key_env +
                      " does not hold an API key");
  }
  return {config.provider.api_base, key,
          std::chrono::milliseconds(static_cast<long long>(config.provider.timeout_s * 1000))};
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_file(const fs::path& path, std::string_view content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  }
  fs::rename(tmp, path);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string dump(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

json verification_json(const verifier::Verification& v) {
  return {{"counts", v.counts}, {"compiler_checked", v.compiler_checked},
          {"diagnostics", v.diagnostics}};
}

const char* kLayout[] = {"manifest.json",     "input.c",           "segments.json",
                         "summary.txt",       "original.rs",       "final.rs",
                         "self_report.json",  "verification.json", "metrics.json",
                         "report.md",         "report.json",       "checkpoints/",
                         "verify/original/",  "verify/final/"};

class Manifest {
 public:
  Manifest(fs::path path, json header) : path_(std::move(path)), doc_(std::move(header)) {
    doc_["layout_version"] = kRunLayoutVersion;
    doc_["files"] = json::array();
    for (const char* f : kLayout) doc_["files"].push_back(f);
    doc_["stages"] = json::array();
    for (const char* s : kStageNames) {
      doc_["stages"].push_back(
          {{"name", s}, {"status", "pending"}, {"started_at", nullptr}, {"finished_at", nullptr}});
    }
    doc_["status"] = "running";
    save();
  }

  template <typename F>
  void stage(std::size_t index, F&& body) {
    auto& entry = doc_["stages"][index];
    entry["status"] = "running";
    entry["started_at"] = utc_now();
    entry.erase("error");
    save();
    try {
      body();
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["finished_at"] = utc_now();
      entry["error"] = e.what();
      doc_["status"] = "failed";
      doc_["failed_stage"] = kStageNames[index];
      save();
      throw;
    }
    entry["status"] = "completed";
    entry["finished_at"] = utc_now();
    save();
  }

  void finish() {
    doc_["status"] = "completed";
    doc_.erase("failed_stage");
    save();
  }

 private:
  void save() const { write_file(path_, dump(doc_)); }

  fs::path path_;
  json doc_;
};

}  // namespace

PipelineOptions make_options(const AppConfig& config) {
  PipelineOptions o;
  o.segment.min_segment_chars = config.segmenter.min_chars;
  o.segment.mode =
      config.segmenter.naive_braces ? segmenter::BraceMode::Naive : segmenter::BraceMode::Lexical;
  o.k = config.kb.k;
  o.parallel = config.pipeline.parallel;
  o.rechunk = config.pipeline.rechunk;
  o.refine_includes_summary = config.pipeline.refine_includes_summary;
  return o;
}

Services make_services(const AppConfig& config) {
  config.validate();
  Services s;

  std::shared_ptr<llm::Provider> provider;
  if (config.provider.name == "mock") {
    provider = std::make_shared<llm::MockProvider>();
  } else {
    provider = std::make_shared<llm::OpenAiCompatibleProvider>(endpoint_for(config));
  }
  if (!config.provider.fault_stage.empty() && config.provider.fault_call > 0) {
    provider = std::make_shared<llm::FaultInjectingProvider>(
        provider, stage_from_string(config.provider.fault_stage), config.provider.fault_call);
  }
  llm::ClientOptions client_options;
  client_options.max_in_flight = config.provider.max_in_flight;
  client_options.min_interval = std::chrono::milliseconds(config.provider.min_interval_ms);
  s.client = std::make_shared<llm::LlmClient>(provider, client_options);

  s.templates = config.prompt_dir.empty() ? llm::PromptTemplates::defaults()
                                          : llm::PromptTemplates::load(config.prompt_dir);
  s.generation.model_id = config.provider.model_id;
  s.generation.max_retries = config.provider.max_retries;
  s.generation.timeout =
      std::chrono::milliseconds(static_cast<long long>(config.provider.timeout_s * 1000));

  if (config.kb.embedder == "remote") {
    s.embedder = std::make_shared<llm::RemoteEmbedder>(endpoint_for(config),
                                                       config.kb.embedding_model,
                                                       config.kb.dimension);
  } else {
    s.embedder = std::make_shared<kb::HashedTermFrequencyEmbedder>(config.kb.dimension);
  }

  if (!config.kb.index_path.empty() && fs::exists(config.kb.index_path)) {
    s.index = std::make_shared<kb::KnowledgeIndex>(
        kb::KnowledgeIndex::load(config.kb.index_path, *s.embedder));
  } else if (!config.kb.dir.empty()) {
    kb::KnowledgeIndexBuilder builder(*s.embedder);
    builder.add_directory(config.kb.dir, config.kb.chunk);
    s.index = std::make_shared<kb::KnowledgeIndex>(std::move(builder).build());
  }
  return s;
}

RunArtifacts run_full(const RunRequest& request, const AppConfig& config, Services services) {
  if (request.run_dir.empty()) throw PreconditionError("run directory not set");
  if (request.c_source.empty()) throw PreconditionError("cannot transpile an empty program");

  const fs::path dir = request.run_dir;
  const fs::path manifest_path = dir / "manifest.json";
  const std::string input_hash = to_hex(fnv1a64(request.c_source));
  const std::string config_hash = config.hash();

  if (request.resume) {
    if (!fs::exists(manifest_path)) {
      throw PreconditionError("nothing to resume: " + manifest_path.string() + " is missing");
    }
    json previous;
    try {
      previous = json::parse(read_file(manifest_path));
    } catch (const json::exception& e) {
      throw PreconditionError("unreadable manifest " + manifest_path.string() + ": " + e.what());
    }
    if (previous.value("input_hash", "") != input_hash) {
      throw PreconditionError("resume input differs from the one recorded in " +
                              manifest_path.string());
    }
    if (previous.value("config_hash", "") != config_hash) {
      throw ConfigError("resume configuration differs from the one recorded in " +
                        manifest_path.string());
    }
  } else if (fs::exists(manifest_path)) {
    throw PreconditionError(dir.string() + " already holds a run; use --resume to continue it");
  }
  fs::create_directories(dir);

  const std::string embedder_name = services.embedder ? services.embedder->name() : "";
  const std::size_t kb_chunks = services.index ? services.index->size() : 0;
  json header = {
      {"program_name", request.program_name},
      {"input_hash", input_hash},
      {"config_hash", config_hash},
      {"provider", services.client->provider().name()},
      {"model_id", services.generation.model_id},
      {"temperature", services.generation.temperature},
      {"choice_index", services.generation.choice_index},
      {"prompt_version", services.templates.version},
      {"embedder", embedder_name},
      {"knowledge_chunks", kb_chunks},
      {"k", config.kb.k},
      {"retrieval", "per stage: C segment for transpile, Rust segment for refine"},
      {"refine_includes_summary", config.pipeline.refine_includes_summary},
      {"reassembly_separator", "\n"},
      {"verifier_mode", config.verifier.mode},
  };
  Manifest manifest(manifest_path, std::move(header));

  Pipeline pipeline(std::move(services), make_options(config),
                    CheckpointStore(dir / "checkpoints"));
  RunArtifacts art;
  art.run_dir = dir;
  std::vector<segmenter::Segment> segments;
  std::string summary;

  manifest.stage(0, [&] {
    write_file(dir / "input.c", request.c_source);
    segments = pipeline.segment(request.c_source);
    write_file(dir / "segments.json", dump(json(segments)));
  });
  manifest.stage(1, [&] {
    summary = pipeline.summarize(request.c_source);
    write_file(dir / "summary.txt", summary);
  });
  manifest.stage(2, [&] {
    art.unit = pipeline.transpile_program(request.program_name, request.c_source,
                                          std::move(segments), std::move(summary));
    write_file(dir / "original.rs", art.unit.original_rust);
  });
  manifest.stage(3, [&] {
    pipeline.refine_program(art.unit);
    write_file(dir / "final.rs", art.unit.final_rust);
  });
  manifest.stage(4, [&] {
    std::tie(art.self_original, art.self_final) = pipeline.self_report(art.unit);
    write_file(dir / "self_report.json",
               dump({{"original", art.self_original}, {"final", art.self_final}}));
  });
  manifest.stage(5, [&] {
    const auto opts = config.verifier.verify_options();
    art.verified_original = verifier::verify_detailed(art.unit.original_rust,
                                                      dir / "verify" / "original", opts);
    art.verified_final =
        verifier::verify_detailed(art.unit.final_rust, dir / "verify" / "final", opts);
    fs::create_directories(dir / "verify" / "original");
    fs::create_directories(dir / "verify" / "final");
    write_file(dir / "verification.json",
               dump({{"mode", config.verifier.mode},
                     {"original", verification_json(art.verified_original)},
                     {"final", verification_json(art.verified_final)}}));

    art.row = report::ReportRow::make(config.provider.model_id, art.unit.program_name,
                                      art.verified_original.counts, art.verified_final.counts,
                                      std::pair{art.self_original, art.self_final});
    json metrics_doc = {{"program_name", art.row.program_name},
                        {"model_id", art.row.model_id},
                        {"changes", art.row.changes}};
    metrics_doc["hallucination"] =
        art.row.hallucination ? json(*art.row.hallucination) : json(nullptr);
    write_file(dir / "metrics.json", dump(metrics_doc));
    write_file(dir / "report.md", report::emit_report({art.row}, report::ReportFormat::Markdown));
    write_file(dir / "report.json", report::emit_report({art.row}, report::ReportFormat::Json));
  });
  manifest.finish();
  return art;
}

std::string describe_plan(const RunRequest& request, const AppConfig& config) {
  std::ostringstream out;
  std::size_t n = 0;
  std::string segment_note;
  try {
    n = segmenter::segment_source(request.c_source, make_options(config).segment).size();
    segment_note = std::to_string(n) + " segment(s)";
  } catch (const std::exception& e) {
    segment_note = std::string("segmentation fails: ") + e.what();
  }
  const std::string retrieval =
      !config.kb.index_path.empty() ? "index " + config.kb.index_path.string()
      : !config.kb.dir.empty()      ? "documents under " + config.kb.dir.string()
                                    : std::string("none");
  out << "program:   " << request.program_name << " (" << request.c_source.size()
      << " bytes)\n"
      << "run dir:   " << request.run_dir.string() << (request.resume ? " (resume)" : "") << "\n"
      << "provider:  " << config.provider.name << " / " << config.provider.model_id
      << ", temperature 0, choice 0\n"
      << "retrieval: " << retrieval << ", k=" << config.kb.k << "\n"
      << "config:    " << config.hash() << "\n"
      << "stages:\n"
      << "  1. segment      " << segment_note << ", min " << config.segmenter.min_chars
      << " chars\n"
      << "  2. summarize    1 provider call\n"
      << "  3. transpile    " << n << " provider call(s), parallel " << config.pipeline.parallel
      << "\n"
      << "  4. refine       >= " << n << " provider call(s), re-chunk above "
      << config.pipeline.rechunk.limit << " chars\n"
      << "  5. self_report  " << 2 * n << " provider call(s)\n"
      << "  6. verify       " << config.verifier.mode << "\n";
  return out.str();
}

}  // namespace saferust::pipeline
