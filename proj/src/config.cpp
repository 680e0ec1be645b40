#include "saferust/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fstream>
#include <map>
#include <sstream>

#include "saferust/errors.hpp"
#include "saferust/hash.hpp"

namespace saferust {

namespace pt = boost::property_tree;
namespace fs = std::filesystem;

namespace {

std::string trimmed(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::size_t to_size(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(value, &used);
    if (used != value.size() || v < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "yes" || value == "1") return true;
  if (value == "false" || value == "no" || value == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

fs::path to_path(const std::string& value, const fs::path& base) {
  if (value.empty()) return {};
  fs::path p(value);
  return p.is_absolute() || base.empty() ? p : (base / p).lexically_normal();
}

}  // namespace

verifier::VerifyOptions VerifierSettings::verify_options() const {
  verifier::VerifyOptions o;
  o.mode = mode == "scan-only" ? verifier::VerifyMode::ScanOnly : verifier::VerifyMode::Compiler;
  o.compiler.rustc = rustc;
  o.compiler.edition = edition;
  o.compiler.crate_type = crate_type;
  o.compiler.mode = mode == "grep" ? verifier::DiagnosticMode::Grep : verifier::DiagnosticMode::Json;
  return o;
}

void AppConfig::validate() const {
  auto positive = [](std::size_t v, const char* key) {
    if (v == 0) throw ConfigError(std::string(key) + " must be positive");
  };
  if (provider.name != "mock" && provider.name != "openai-compatible") {
    throw ConfigError("provider.name must be mock or openai-compatible, got '" + provider.name +
                      "'");
  }
  if (provider.model_id.empty()) throw ConfigError("provider.model_id must not be empty");
  if (!(provider.timeout_s > 0)) throw ConfigError("provider.timeout_s must be positive");
  positive(provider.max_in_flight, "provider.max_in_flight");
  if (!provider.fault_stage.empty() && provider.fault_stage != "summarize" &&
      provider.fault_stage != "transpile" && provider.fault_stage != "refine" &&
      provider.fault_stage != "self_report") {
    throw ConfigError("provider.fault_stage is not a stage name: " + provider.fault_stage);
  }
  positive(kb.chunk.chunk_size, "kb.chunk_size");
  if (kb.chunk.overlap >= kb.chunk.chunk_size) {
    throw ConfigError("kb.overlap must be smaller than kb.chunk_size");
  }
  positive(kb.k, "kb.k");
  positive(kb.dimension, "kb.dimension");
  if (kb.embedder != "hashed" && kb.embedder != "remote") {
    throw ConfigError("kb.embedder must be hashed or remote");
  }
  positive(segmenter.min_chars, "segmenter.min_chars");
  positive(pipeline.parallel, "pipeline.parallel");
  positive(pipeline.rechunk.chunk_size, "pipeline.rechunk_size");
  positive(pipeline.rechunk.limit, "pipeline.rechunk_limit");
  if (pipeline.rechunk.overlap >= pipeline.rechunk.chunk_size) {
    throw ConfigError("pipeline.rechunk_overlap must be smaller than pipeline.rechunk_size");
  }
  if (pipeline.rechunk.limit < pipeline.rechunk.chunk_size) {
    throw ConfigError("pipeline.rechunk_limit must be at least pipeline.rechunk_size");
  }
  if (verifier.mode != "compiler" && verifier.mode != "grep" && verifier.mode != "scan-only") {
    throw ConfigError("verifier.mode must be compiler, grep or scan-only");
  }
}

std::string AppConfig::canonical() const {
  std::map<std::string, std::string> kv = {
      {"provider.name", provider.name},
      {"provider.model_id", provider.model_id},
      {"provider.api_base", provider.api_base},
      {"provider.temperature", "0"},
      {"provider.choice_index", "0"},
      {"provider.max_retries", std::to_string(provider.max_retries)},
      {"kb.dir", kb.dir.generic_string()},
      {"kb.index_path", kb.index_path.generic_string()},
      {"kb.chunk_size", std::to_string(kb.chunk.chunk_size)},
      {"kb.overlap", std::to_string(kb.chunk.overlap)},
      {"kb.k", std::to_string(kb.k)},
      {"kb.embedder", kb.embedder},
      {"kb.embedding_model", kb.embedder == "remote" ? kb.embedding_model : ""},
      {"kb.dimension", std::to_string(kb.dimension)},
      {"segmenter.min_chars", std::to_string(segmenter.min_chars)},
      {"segmenter.naive_braces", segmenter.naive_braces ? "true" : "false"},
      {"pipeline.rechunk_limit", std::to_string(pipeline.rechunk.limit)},
      {"pipeline.rechunk_size", std::to_string(pipeline.rechunk.chunk_size)},
      {"pipeline.rechunk_overlap", std::to_string(pipeline.rechunk.overlap)},
      {"pipeline.refine_includes_summary", pipeline.refine_includes_summary ? "true" : "false"},
      {"verifier.mode", verifier.mode},
      {"verifier.edition", verifier.edition},
      {"verifier.crate_type", verifier.crate_type},
      {"prompts.dir", prompt_dir.generic_string()},
  };
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string AppConfig::hash() const { return to_hex(fnv1a64(canonical())); }

AppConfig parse_config(std::string_view text, const fs::path& base_dir) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  AppConfig c;
  for (const auto& [section, entries] : tree) {
    if (!entries.data().empty()) throw ConfigError("config key outside a section: " + section);
    for (const auto& [raw_key, node] : entries) {
      const std::string key = section + "." + raw_key;
      const std::string v = trimmed(node.data());
      if (key == "provider.name") c.provider.name = v;
      else if (key == "provider.model_id") c.provider.model_id = v;
      else if (key == "provider.api_base") c.provider.api_base = v;
      else if (key == "provider.api_key_env") c.provider.api_key_env = v;
      else if (key == "provider.max_retries") c.provider.max_retries = to_size(key, v);
      else if (key == "provider.timeout_s") c.provider.timeout_s = to_double(key, v);
      else if (key == "provider.max_in_flight") c.provider.max_in_flight = to_size(key, v);
      else if (key == "provider.min_interval_ms") c.provider.min_interval_ms = to_size(key, v);
      else if (key == "provider.fault_stage") c.provider.fault_stage = v;
      else if (key == "provider.fault_call") c.provider.fault_call = to_size(key, v);
      else if (key == "provider.temperature") {
        if (to_double(key, v) != 0.0) throw ConfigError("provider.temperature is locked to 0");
      } else if (key == "provider.choice_index") {
        if (to_size(key, v) != 0) throw ConfigError("provider.choice_index is locked to 0");
      }
      else if (key == "prompts.dir") c.prompt_dir = to_path(v, base_dir);
      else if (key == "kb.dir") c.kb.dir = to_path(v, base_dir);
      else if (key == "kb.index_path") c.kb.index_path = to_path(v, base_dir);
      else if (key == "kb.chunk_size") c.kb.chunk.chunk_size = to_size(key, v);
      else if (key == "kb.overlap") c.kb.chunk.overlap = to_size(key, v);
      else if (key == "kb.k") c.kb.k = to_size(key, v);
      else if (key == "kb.embedder") c.kb.embedder = v;
      else if (key == "kb.embedding_model") c.kb.embedding_model = v;
      else if (key == "kb.dimension") c.kb.dimension = to_size(key, v);
      else if (key == "segmenter.min_chars") c.segmenter.min_chars = to_size(key, v);
      else if (key == "segmenter.naive_braces") c.segmenter.naive_braces = to_bool(key, v);
      else if (key == "pipeline.parallel") c.pipeline.parallel = to_size(key, v);
      else if (key == "pipeline.rechunk_limit") c.pipeline.rechunk.limit = to_size(key, v);
      else if (key == "pipeline.rechunk_size") c.pipeline.rechunk.chunk_size = to_size(key, v);
      else if (key == "pipeline.rechunk_overlap") c.pipeline.rechunk.overlap = to_size(key, v);
      else if (key == "pipeline.refine_includes_summary") {
        c.pipeline.refine_includes_summary = to_bool(key, v);
      }
      else if (key == "verifier.mode") c.verifier.mode = v;
      else if (key == "verifier.rustc") c.verifier.rustc = v;
      else if (key == "verifier.edition") c.verifier.edition = v;
      else if (key == "verifier.crate_type") c.verifier.crate_type = v;
      else if (key == "run.output_dir") c.output_dir = to_path(v, base_dir);
      else throw ConfigError("unknown config key " + key);
    }
  }
  c.validate();
  return c;
}

AppConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.parent_path());
}

void apply_overrides(AppConfig& config, const ConfigOverrides& o) {
  if (o.min_chars) config.segmenter.min_chars = *o.min_chars;
  if (o.naive_braces) config.segmenter.naive_braces = *o.naive_braces;
  if (o.chunk_size) config.kb.chunk.chunk_size = *o.chunk_size;
  if (o.overlap) config.kb.chunk.overlap = *o.overlap;
  if (o.k) config.kb.k = *o.k;
  if (o.parallel) config.pipeline.parallel = *o.parallel;
  if (o.verifier_mode) config.verifier.mode = *o.verifier_mode;
  if (o.output_dir) config.output_dir = *o.output_dir;
  config.validate();
}

}  // namespace saferust
