#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "saferust/knowledge_base.hpp"
#include "saferust/segmenter.hpp"
#include "saferust/verifier.hpp"

namespace saferust {

struct ProviderSettings {
  std::string name = "mock";  // mock | openai-compatible
  std::string model_id = "mock-model";
  std::string api_base = "https://api.openai.com/v1";
  std::string api_key_env = "OPENAI_API_KEY";
  std::size_t max_retries = 3;
  double timeout_s = 60.0;
  std::size_t max_in_flight = 4;
  std::size_t min_interval_ms = 0;
  // Test hook for the mock provider: fail the fault_call-th call of
  // fault_stage. Not part of the config hash.
  std::string fault_stage;
  std::size_t fault_call = 0;
};

struct KbSettings {
  std::filesystem::path dir;
  std::filesystem::path index_path;
  kb::ChunkConfig chunk;
  std::size_t k = 4;
  std::string embedder = "hashed";  // hashed | remote
  std::string embedding_model = "text-embedding-3-small";
  std::size_t dimension = kb::HashedTermFrequencyEmbedder::kDefaultDimension;
};

struct SegmenterSettings {
  std::size_t min_chars = segmenter::kDefaultMinSegmentChars;
  bool naive_braces = false;
};

struct PipelineSettings {
  std::size_t parallel = 1;
  kb::RechunkConfig rechunk;
  bool refine_includes_summary = true;
};

struct VerifierSettings {
  std::string mode = "compiler";  // compiler | grep | scan-only
  std::string rustc = "rustc";
  std::string edition = "2021";
  std::string crate_type = "bin";

  verifier::VerifyOptions verify_options() const;
};

struct AppConfig {
  ProviderSettings provider;
  KbSettings kb;
  SegmenterSettings segmenter;
  PipelineSettings pipeline;
  VerifierSettings verifier;
  std::filesystem::path prompt_dir;
  std::filesystem::path output_dir = "runs";

  // Throws ConfigError when a numeric parameter is not positive, overlap is
  // not below chunk size, or an enumerated setting is unknown.
  void validate() const;

  // Sorted key=value lines of every setting that influences outputs.
  std::string canonical() const;
  std::string hash() const;
};

// INI-style file: `[section]` headers, `key = value` lines, whole-line `#` or
// `;` comments. Relative paths resolve against the file's directory. Unknown
// sections or keys, and a temperature other than 0, throw ConfigError.
AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});

// Command-line values that take precedence over the file.
struct ConfigOverrides {
  std::optional<std::size_t> min_chars;
  std::optional<bool> naive_braces;
  std::optional<std::size_t> chunk_size;
  std::optional<std::size_t> overlap;
  std::optional<std::size_t> k;
  std::optional<std::size_t> parallel;
  std::optional<std::string> verifier_mode;
  std::optional<std::filesystem::path> output_dir;
};

void apply_overrides(AppConfig& config, const ConfigOverrides& overrides);

}  // namespace saferust
