#include "saferust/llm_client.hpp"

#include <algorithm>
#include <optional>
#include <regex>
#include <thread>

#include "saferust/errors.hpp"
#include "saferust/hash.hpp"

namespace saferust::llm {

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Summarize: return "summarize";
    case Stage::Transpile: return "transpile";
    case Stage::Refine: return "refine";
    case Stage::SelfReport: return "self_report";
  }
  return "unknown";
}

void GenerationConfig::validate() const {
  if (temperature != 0.0) throw ConfigError("temperature is locked to 0");
  if (choice_index != 0) throw ConfigError("choice index is locked to 0");
  if (model_id.empty()) throw ConfigError("model_id must not be empty");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

std::uint64_t PromptBundle::hash() const noexcept {
  return Fnv1a64{}.field(to_string(stage)).field(system_prompt).field(user_content).digest();
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::optional<std::size_t> to_count(const std::string& digits) {
  try {
    return static_cast<std::size_t>(std::stoull(digits));
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

std::string strip_code_fences(std::string_view text) {
  const auto open = text.find("```");
  if (open == std::string_view::npos) return std::string(trim(text));
  const auto body_start = text.find('\n', open);
  if (body_start == std::string_view::npos) return {};
  const std::string_view rest = text.substr(body_start + 1);
  auto close = rest.find("```");
  std::string_view body = close == std::string_view::npos ? rest : rest.substr(0, close);
  if (!body.empty() && body.back() == '\n') body.remove_suffix(1);
  if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
  return std::string(body);
}

SelfReport parse_self_report(std::string_view text) {
  const std::string s(text);
  static const std::regex rpd_label(R"(\bRPDs?\s*=\s*(\d+))", std::regex::icase);
  static const std::regex utc_label(R"(\bUTCs?\s*=\s*(\d+))", std::regex::icase);
  std::smatch rpd, utc;
  if (std::regex_search(s, rpd, rpd_label) && std::regex_search(s, utc, utc_label)) {
    auto r = to_count(rpd[1].str());
    auto u = to_count(utc[1].str());
    if (r && u) return {*r, *u};
  }

  static const std::regex integer(R"(-?\d+)");
  std::vector<std::string> found;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), integer);
       it != std::sregex_iterator() && found.size() < 2; ++it) {
    found.push_back(it->str());
  }
  if (found.size() == 2 && found[0][0] != '-' && found[1][0] != '-') {
    auto r = to_count(found[0]);
    auto u = to_count(found[1]);
    if (r && u) return {*r, *u};
  }
  throw SelfReportParseError("unparseable self-report: '" + std::string(trim(text)).substr(0, 80) +
                             "'");
}

std::string MockProvider::response_for(const PromptBundle& bundle) {
  const std::string tag = to_hex(bundle.hash());
  switch (bundle.stage) {
    case Stage::Summarize:
      return "PROGRAM-SUMMARY:" + tag;
    case Stage::SelfReport:
      return "RPD=0 UTC=0";
    case Stage::Transpile:
    case Stage::Refine:
      break;
  }
  std::string out = "```rust\n// ";
  out += to_string(bundle.stage);
  out += " output " + tag + "\n";
  out += "pub fn segment_" + tag + "(values: &[i32]) -> i32 {\n";
  if (bundle.stage == Stage::Transpile) {
    // Stage-1 style: raw pointer access inside an unsafe block.
    out += "    let p = values.as_ptr();\n";
    out += "    unsafe {\n";
    out += "        *p + *p.add(1)\n";
    out += "    }\n";
  } else {
    out += "    values.iter().take(2).sum()\n";
  }
  out += "}\n```\n";
  return out;
}

std::vector<std::string> MockProvider::send(const PromptBundle& bundle,
                                            const GenerationConfig& config) {
  config.validate();
  return {response_for(bundle)};
}

std::vector<std::string> FaultInjectingProvider::send(const PromptBundle& bundle,
                                                      const GenerationConfig& config) {
  if (bundle.stage == stage_ && ++calls_ == fail_on_call_) {
    throw ProviderError("injected failure on " + std::string(to_string(stage_)) + " call " +
                        std::to_string(fail_on_call_));
  }
  return inner_->send(bundle, config);
}

LlmClient::LlmClient(std::shared_ptr<Provider> provider, ClientOptions options)
    : provider_(std::move(provider)),
      options_(std::move(options)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(options_.max_in_flight, 1, 1024))) {
  if (!provider_) throw ConfigError("LlmClient requires a provider");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

void LlmClient::pace() {
  if (options_.min_interval.count() <= 0) return;
  std::unique_lock lock(pace_mutex_);
  const auto now = std::chrono::steady_clock::now();
  const auto ready = last_start_ + options_.min_interval;
  if (now < ready) {
    options_.sleep(std::chrono::duration_cast<std::chrono::milliseconds>(ready - now));
  }
  last_start_ = std::chrono::steady_clock::now();
}

std::string LlmClient::complete(const PromptBundle& bundle, const GenerationConfig& config) {
  config.validate();
  if (bundle.user_content.empty()) throw PreconditionError("prompt has empty user content");

  std::vector<std::string> choices;
  for (std::size_t attempt = 0;; ++attempt) {
    in_flight_.acquire();
    try {
      pace();
      choices = provider_->send(bundle, config);
      in_flight_.release();
      break;
    } catch (const RateLimited&) {
      in_flight_.release();
      if (attempt >= config.max_retries) throw;
      options_.sleep(options_.backoff_base * (1LL << std::min<std::size_t>(attempt, 20)));
    } catch (...) {
      in_flight_.release();
      throw;
    }
  }
  if (choices.size() <= config.choice_index) {
    throw EmptyResponse("provider returned no choices for " + std::string(to_string(bundle.stage)));
  }
  std::string text = strip_code_fences(choices[config.choice_index]);
  if (text.empty()) {
    throw EmptyResponse("provider returned an empty choice for " +
                        std::string(to_string(bundle.stage)));
  }
  return text;
}

std::string summarize_program(LlmClient& client, const PromptTemplates& templates,
                              const GenerationConfig& config, std::string_view c_source) {
  std::string summary = client.complete(build_summary_prompt(templates, c_source), config);
  if (summary.size() > kMaxSummaryChars) summary.resize(kMaxSummaryChars);
  return summary;
}

}  // namespace saferust::llm
