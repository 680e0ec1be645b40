#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "saferust/knowledge_base.hpp"
#include "saferust/segmenter.hpp"

namespace saferust::llm {

enum class Stage { Summarize, Transpile, Refine, SelfReport };

std::string_view to_string(Stage stage);

// Temperature and choice index are fixed; validate() enforces it before every
// call so no code path can drift from the reproducible configuration.
struct GenerationConfig {
  std::string model_id = "mock-model";
  double temperature = 0.0;
  std::size_t choice_index = 0;
  std::size_t max_retries = 3;
  std::chrono::milliseconds timeout{60'000};

  void validate() const;
};

struct PromptBundle {
  std::string system_prompt;
  std::string user_content;
  Stage stage = Stage::Transpile;

  std::uint64_t hash() const noexcept;
};

struct PromptTemplates {
  std::string version;
  std::string summarize;
  std::string transpile;
  std::string refine;
  std::string self_report;

  // The templates compiled into the library from prompts/<version>/.
  static PromptTemplates defaults();
  // Reads summarize.txt, transpile.txt, refine.txt and self_report.txt from
  // `dir`; the directory name becomes the version.
  static PromptTemplates load(const std::filesystem::path& dir);
};

inline constexpr std::string_view kContextBegin = "<<<RETRIEVED CONTEXT>>>";
inline constexpr std::string_view kContextEnd = "<<<END RETRIEVED CONTEXT>>>";
inline constexpr std::size_t kMaxSummaryChars = 1000;

PromptBundle build_summary_prompt(const PromptTemplates& templates, std::string_view c_source);

// User content order: program summary, retrieved context (omitted when
// empty), C segment.
PromptBundle build_transpile_prompt(const PromptTemplates& templates,
                                    const segmenter::Segment& segment, std::string_view summary,
                                    const std::vector<kb::RetrievalResult>& context);

// Same layout with the Rust segment in place of the C segment. An empty
// summary omits the summary block.
PromptBundle build_refine_prompt(const PromptTemplates& templates, std::string_view rust_segment,
                                 const std::vector<kb::RetrievalResult>& context,
                                 std::string_view summary = {});

PromptBundle build_self_report_prompt(const PromptTemplates& templates,
                                      std::string_view rust_segment);

// Returns the body of the first fenced code block, or the trimmed text when
// there is no fence.
std::string strip_code_fences(std::string_view text);

struct SelfReport {
  std::size_t rpd = 0;
  std::size_t utc = 0;

  friend bool operator==(const SelfReport&, const SelfReport&) = default;
};

// "RPD=<n>" and "UTC=<n>" labels first, then the first two integers in the
// text; anything else throws SelfReportParseError.
SelfReport parse_self_report(std::string_view text);

class Provider {
 public:
  virtual ~Provider() = default;
  // Every returned choice, in provider order. May throw ProviderError or
  // RateLimited.
  virtual std::vector<std::string> send(const PromptBundle& bundle,
                                        const GenerationConfig& config) = 0;
  virtual std::string name() const = 0;
};

// Pure function of the bundle hash.
class MockProvider final : public Provider {
 public:
  std::vector<std::string> send(const PromptBundle& bundle,
                                const GenerationConfig& config) override;
  std::string name() const override { return "mock"; }

  static std::string response_for(const PromptBundle& bundle);
};

// Test hook: forwards to `inner` and throws ProviderError on the
// `fail_on_call`-th (1-based) call for `stage`.
class FaultInjectingProvider final : public Provider {
 public:
  FaultInjectingProvider(std::shared_ptr<Provider> inner, Stage stage, std::size_t fail_on_call)
      : inner_(std::move(inner)), stage_(stage), fail_on_call_(fail_on_call) {}

  std::vector<std::string> send(const PromptBundle& bundle,
                                const GenerationConfig& config) override;
  std::string name() const override { return inner_->name(); }

 private:
  std::shared_ptr<Provider> inner_;
  Stage stage_;
  std::size_t fail_on_call_;
  std::atomic<std::size_t> calls_{0};
};

struct ClientOptions {
  std::size_t max_in_flight = 4;
  std::chrono::milliseconds min_interval{0};
  std::chrono::milliseconds backoff_base{500};
  // Replaced in tests to keep retry loops instant.
  std::function<void(std::chrono::milliseconds)> sleep;
};

class LlmClient {
 public:
  explicit LlmClient(std::shared_ptr<Provider> provider, ClientOptions options = {});

  // Sends `bundle`, retrying RateLimited with exponential backoff up to
  // config.max_retries, and returns choice 0 with code fences stripped.
  // Throws EmptyResponse when the provider returns no choices.
  std::string complete(const PromptBundle& bundle, const GenerationConfig& config);

  const Provider& provider() const noexcept { return *provider_; }

 private:
  void pace();

  std::shared_ptr<Provider> provider_;
  ClientOptions options_;
  std::counting_semaphore<1024> in_flight_;
  std::mutex pace_mutex_;
  std::chrono::steady_clock::time_point last_start_{};
};

// Asks the model for a short description of the whole program, capped at
// kMaxSummaryChars. Throws PreconditionError on empty input.
std::string summarize_program(LlmClient& client, const PromptTemplates& templates,
                              const GenerationConfig& config, std::string_view c_source);

}  // namespace saferust::llm
