#include "saferust/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <unistd.h>

#include "saferust/errors.hpp"
#include "saferust/json_io.hpp"
#include "saferust/knowledge_base.hpp"
#include "saferust/metrics.hpp"
#include "saferust/pipeline.hpp"
#include "saferust/report.hpp"
#include "saferust/segmenter.hpp"
#include "saferust/verifier.hpp"

namespace saferust::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw PreconditionError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string dump(const json& j) {
  return j.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

// Flags shared by the subcommands that read a configuration.
struct ConfigFlags {
  std::string config_path;
  std::size_t min_chars = 0, chunk_size = 0, overlap = 0, k = 0, parallel = 0;
  bool naive_braces = false;
  std::string verifier_mode;
  std::string output_dir;
  CLI::Option* o_min_chars = nullptr;
  CLI::Option* o_naive = nullptr;
  CLI::Option* o_chunk_size = nullptr;
  CLI::Option* o_overlap = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_parallel = nullptr;
  CLI::Option* o_verifier_mode = nullptr;
  CLI::Option* o_output_dir = nullptr;

  void add_config(CLI::App* app) {
    app->add_option("--config", config_path, "Configuration file")->check(CLI::ExistingFile);
  }
  void add_segmenter(CLI::App* app) {
    o_min_chars = app->add_option("--min-chars", min_chars, "Minimum segment size in bytes");
    o_naive = app->add_flag("--naive-braces", naive_braces,
                            "Count every brace, including those in comments and literals");
  }
  void add_chunking(CLI::App* app) {
    o_chunk_size = app->add_option("--chunk-size", chunk_size, "Document chunk size");
    o_overlap = app->add_option("--overlap", overlap, "Overlap between document chunks");
  }
  void add_k(CLI::App* app) {
    o_k = app->add_option("-k,--top-k", k, "Number of chunks to retrieve");
  }
  void add_run(CLI::App* app) {
    o_parallel = app->add_option("--parallel", parallel, "Segments processed concurrently");
    o_verifier_mode = app->add_option("--verifier-mode", verifier_mode, "compiler, grep or scan-only")
                          ->check(CLI::IsMember({"compiler", "grep", "scan-only"}));
    o_output_dir = app->add_option("--output-dir", output_dir, "Parent of new run directories");
  }

  AppConfig resolve() const {
    ConfigOverrides o;
    auto given = [](CLI::Option* opt) { return opt && opt->count() > 0; };
    if (given(o_min_chars)) o.min_chars = min_chars;
    if (given(o_naive)) o.naive_braces = naive_braces;
    if (given(o_chunk_size)) o.chunk_size = chunk_size;
    if (given(o_overlap)) o.overlap = overlap;
    if (given(o_k)) o.k = k;
    if (given(o_parallel)) o.parallel = parallel;
    if (given(o_verifier_mode)) o.verifier_mode = verifier_mode;
    if (given(o_output_dir)) o.output_dir = fs::path(output_dir);
    return resolve_config(config_path.empty() ? std::nullopt
                                              : std::optional<fs::path>(config_path),
                          o);
  }
};

segmenter::SegmentOptions segment_options(const AppConfig& c) {
  return pipeline::make_options(c).segment;
}

verifier::SafetyCounts counts_argument(const std::string& value) {
  static const std::regex inline_counts(R"(^\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*,\s*(\d+)\s*$)");
  std::smatch m;
  if (!fs::exists(value) && std::regex_match(value, m, inline_counts)) {
    verifier::SafetyCounts c;
    c.rpd = std::stoul(m[1]);
    c.utc = std::stoul(m[2]);
    c.ub = std::stoul(m[3]);
    c.uloc = std::stoul(m[4]);
    return c;
  }
  try {
    const json j = json::parse(read_text(value));
    return (j.contains("counts") ? j.at("counts") : j).get<verifier::SafetyCounts>();
  } catch (const json::exception& e) {
    throw PreconditionError(value + ": not a counts document: " + e.what());
  }
}

fs::path scratch_dir() {
  static int n = 0;
  return fs::temp_directory_path() /
         ("saferust-verify-" + std::to_string(::getpid()) + "-" + std::to_string(n++));
}

}  // namespace

AppConfig resolve_config(const std::optional<fs::path>& file, const ConfigOverrides& overrides) {
  AppConfig config = file ? load_config(*file) : AppConfig{};
  apply_overrides(config, overrides);
  return config;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"C to Rust transpilation with retrieval grounding and safety verification",
               "saferust"};
  app.require_subcommand(1);
  app.footer("Exit status: 0 success, 1 runtime failure, 2 usage error.");

  // segment
  ConfigFlags seg_flags;
  std::string seg_input;
  bool seg_table = false;
  auto* segment = app.add_subcommand("segment", "Split a C file into brace-balanced segments");
  segment->add_option("file", seg_input, "C source file")->required()->check(CLI::ExistingFile);
  segment->add_flag("--table", seg_table, "Print a tab-separated summary instead of JSON");
  seg_flags.add_config(segment);
  seg_flags.add_segmenter(segment);

  // kb build / kb query
  auto* kbcmd = app.add_subcommand("kb", "Build or query a knowledge-base index");
  kbcmd->require_subcommand(1);
  ConfigFlags build_flags;
  std::string build_dir, build_out;
  auto* kb_build = kbcmd->add_subcommand("build", "Chunk and embed *.md/*.txt documents");
  kb_build->add_option("dir", build_dir, "Document directory")->required()->check(CLI::ExistingDirectory);
  kb_build->add_option("-o,--output", build_out, "Index file to write")->required();
  build_flags.add_config(kb_build);
  build_flags.add_chunking(kb_build);

  ConfigFlags query_flags;
  std::string query_index, query_text;
  auto* kb_query = kbcmd->add_subcommand("query", "Retrieve the chunks most similar to a query");
  kb_query->add_option("index", query_index, "Index file")->required()->check(CLI::ExistingFile);
  kb_query->add_option("query", query_text, "Query text")->required();
  query_flags.add_config(kb_query);
  query_flags.add_k(kb_query);

  // run
  ConfigFlags run_flags;
  std::string run_input, run_resume, run_out;
  bool run_dry = false;
  auto* run = app.add_subcommand("run", "Transpile, refine, self-report and verify one C file");
  run->add_option("file", run_input, "C source file")->required()->check(CLI::ExistingFile);
  run_flags.add_config(run);
  run->add_option("--resume", run_resume, "Continue the run stored in this directory")
      ->check(CLI::ExistingDirectory);
  run->add_option("--out", run_out, "Run directory to create");
  run->add_flag("--dry-run", run_dry, "Print the planned stages without calling the provider");
  run_flags.add_segmenter(run);
  run_flags.add_chunking(run);
  run_flags.add_k(run);
  run_flags.add_run(run);
  run->callback([&] {
    if (!run_resume.empty() && !run_out.empty()) {
      throw CLI::ValidationError("--resume and --out are mutually exclusive");
    }
  });

  // verify
  std::string verify_input, verify_rustc = "rustc", verify_edition = "2021", verify_workdir;
  bool verify_grep = false, verify_scan = false;
  auto* verify = app.add_subcommand("verify", "Count unsafe constructs in a Rust file");
  verify->add_option("file", verify_input, "Rust source file")->required()->check(CLI::ExistingFile);
  verify->add_flag("--grep-mode", verify_grep, "Match error codes in human-readable output");
  verify->add_flag("--scan-only", verify_scan, "Skip the compiler; RPD and UTC are not counted");
  verify->add_option("--rustc", verify_rustc, "Compiler executable");
  verify->add_option("--edition", verify_edition, "Rust edition");
  verify->add_option("--workdir", verify_workdir, "Directory to compile in (kept)");

  // metrics
  std::string metrics_original, metrics_final, metrics_format = "json";
  auto* metrics_cmd = app.add_subcommand("metrics", "Percent change between two count sets");
  metrics_cmd
      ->add_option("--original", metrics_original,
                   "Counts JSON file, verification output, or rpd,utc,ub,uloc")
      ->required();
  metrics_cmd->add_option("--final", metrics_final, "Same forms as --original")->required();
  metrics_cmd->add_option("--format", metrics_format, "json or md")
      ->check(CLI::IsMember({"json", "md"}));

  // report
  std::vector<std::string> report_dirs;
  std::string report_format = "md", report_output, report_baseline;
  auto* report_cmd = app.add_subcommand("report", "Tabulate one or more run directories");
  report_cmd->add_option("runs", report_dirs, "Run directories")->required()->check(CLI::ExistingDirectory);
  report_cmd->add_option("--format", report_format, "md, csv or json")
      ->check(CLI::IsMember({"md", "markdown", "csv", "json"}));
  report_cmd->add_option("-o,--output", report_output, "Write here instead of standard output");
  report_cmd->add_option("--baseline", report_baseline, "Baseline comparison fixture (CSV)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsageError;
  }

  try {
    if (*segment) {
      const AppConfig config = seg_flags.resolve();
      const auto segments =
          segmenter::segment_source(read_text(seg_input), segment_options(config));
      if (seg_table) {
        out << "index\tstart_offset\tchar_count\tdepth_at_start\n";
        for (const auto& s : segments) {
          out << s.index << '\t' << s.start_offset << '\t' << s.char_count << '\t'
              << s.brace_depth_at_start << '\n';
        }
      } else {
        out << dump(json(segments));
      }
    } else if (*kb_build) {
      const AppConfig config = build_flags.resolve();
      const kb::HashedTermFrequencyEmbedder hashed(config.kb.dimension);
      auto services_embedder = config.kb.embedder == "remote"
                                   ? pipeline::make_services(config).embedder
                                   : nullptr;
      const kb::Embedder& embedder = services_embedder ? *services_embedder : hashed;
      kb::KnowledgeIndexBuilder builder(embedder);
      builder.add_directory(build_dir, config.kb.chunk);
      const auto index = std::move(builder).build();
      index.save(build_out);
      err << "indexed " << index.size() << " chunks with " << embedder.name() << "\n";
    } else if (*kb_query) {
      const AppConfig config = query_flags.resolve();
      const kb::HashedTermFrequencyEmbedder hashed(config.kb.dimension);
      auto services_embedder = config.kb.embedder == "remote"
                                   ? pipeline::make_services(config).embedder
                                   : nullptr;
      const kb::Embedder& embedder = services_embedder ? *services_embedder : hashed;
      const auto index = kb::KnowledgeIndex::load(query_index, embedder);
      out << dump(json(index.retrieve(embedder, query_text, config.kb.k)));
    } else if (*run) {
      const AppConfig config = run_flags.resolve();
      pipeline::RunRequest request;
      request.program_name = fs::path(run_input).stem().string();
      request.c_source = read_text(run_input);
      request.resume = !run_resume.empty();
      request.run_dir = request.resume     ? fs::path(run_resume)
                        : !run_out.empty() ? fs::path(run_out)
                                           : config.output_dir / request.program_name;
      if (run_dry) {
        out << pipeline::describe_plan(request, config);
        return kExitOk;
      }
      const auto art = pipeline::run_full(request, config, pipeline::make_services(config));
      err << "run complete: " << art.run_dir.string() << "\n";
      out << art.run_dir.string() << "\n";
    } else if (*verify) {
      verifier::VerifyOptions opts;
      opts.mode = verify_scan ? verifier::VerifyMode::ScanOnly : verifier::VerifyMode::Compiler;
      opts.compiler.rustc = verify_rustc;
      opts.compiler.edition = verify_edition;
      opts.compiler.mode =
          verify_grep ? verifier::DiagnosticMode::Grep : verifier::DiagnosticMode::Json;
      const fs::path workdir = verify_workdir.empty() ? scratch_dir() : fs::path(verify_workdir);
      const auto result = verifier::verify_detailed(read_text(verify_input), workdir, opts,
                                                    fs::path(verify_input).filename().string());
      if (verify_workdir.empty()) fs::remove_all(workdir);
      out << dump({{"file", verify_input},
                   {"counts", result.counts},
                   {"compiler_checked", result.compiler_checked},
                   {"diagnostics", result.diagnostics}});
    } else if (*metrics_cmd) {
      const auto changes = metrics::compare_runs(counts_argument(metrics_original),
                                                 counts_argument(metrics_final));
      if (metrics_format == "json") {
        out << dump(json(changes));
      } else {
        out << "|";
        for (const auto& c : changes) out << ' ' << metrics::to_string(c.kind) << " |";
        out << "\n|";
        for (std::size_t i = 0; i < changes.size(); ++i) out << "---:|";
        out << "\n|";
        for (const auto& c : changes) out << ' ' << c.value.display() << " |";
        out << "\n";
      }
    } else if (*report_cmd) {
      std::vector<report::ReportRow> rows;
      for (const auto& d : report_dirs) {
        auto more = report::parse_report_json(read_text(fs::path(d) / "report.json"));
        rows.insert(rows.end(), more.begin(), more.end());
      }
      std::vector<report::BaselineEntry> baselines;
      if (!report_baseline.empty()) baselines = report::load_baseline(report_baseline);
      const std::string text =
          report::emit_report(rows, report::parse_format(report_format), baselines);
      if (report_output.empty()) {
        out << text;
      } else {
        write_text(report_output, text);
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomainError;
  }
  return kExitOk;
}

int dispatch(int argc, const char* const* argv) { return dispatch(argc, argv, std::cout, std::cerr); }

}  // namespace saferust::cli
