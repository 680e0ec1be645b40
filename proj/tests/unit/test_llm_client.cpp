#include <doctest.h>

#include <cstdlib>
#include <mutex>
#include <thread>

#include "saferust/errors.hpp"
#include "saferust/llm_client.hpp"
#include "support/test_support.hpp"

using namespace saferust;
using namespace saferust::llm;
using namespace std::chrono_literals;

namespace {

// Replays scripted outcomes: a string is a single choice, nullopt raises
// RateLimited, "!" raises a plain ProviderError.
class ScriptedProvider final : public Provider {
 public:
  explicit ScriptedProvider(std::vector<std::optional<std::string>> script)
      : script_(std::move(script)) {}

  std::vector<std::string> send(const PromptBundle&, const GenerationConfig&) override {
    std::lock_guard lock(mu_);
    REQUIRE(calls < script_.size());
    const auto& step = script_[calls++];
    if (!step) throw RateLimited("slow down");
    if (*step == "!") throw ProviderError("boom");
    if (*step == "<none>") return {};
    return {*step, "ignored second choice"};
  }
  std::string name() const override { return "scripted"; }

  std::size_t calls = 0;

 private:
  std::vector<std::optional<std::string>> script_;
  std::mutex mu_;
};

class ConcurrencyProbe final : public Provider {
 public:
  std::vector<std::string> send(const PromptBundle&, const GenerationConfig&) override {
    const int now = ++active_;
    int seen = peak.load();
    while (now > seen && !peak.compare_exchange_weak(seen, now)) {
    }
    std::this_thread::sleep_for(5ms);
    --active_;
    return {"ok"};
  }
  std::string name() const override { return "probe"; }

  std::atomic<int> peak{0};

 private:
  std::atomic<int> active_{0};
};

PromptBundle sample_bundle() { return {"system", "user", Stage::Transpile}; }

ClientOptions recording(std::vector<std::chrono::milliseconds>& sleeps) {
  ClientOptions o;
  o.sleep = [&sleeps](std::chrono::milliseconds d) { sleeps.push_back(d); };
  return o;
}

segmenter::Segment c_segment(std::string text) {
  segmenter::Segment s;
  s.text = std::move(text);
  s.char_count = s.text.size();
  return s;
}

std::vector<kb::RetrievalResult> sample_context() {
  return {{{"rust/raw-pointers.md", 2, "Dereferencing a raw pointer requires an unsafe block.", 900},
           0.8125},
          {{"errors/E0606.md", 0, "E0606: an incompatible cast was attempted.", 0}, 0.5}};
}

void check_golden(const std::string& name, const PromptBundle& bundle) {
  const auto path = testing::source_dir() / "tests" / "golden" / (name + ".txt");
  const std::string actual = "=== system\n" + bundle.system_prompt + "=== user\n" +
                             bundle.user_content + "\n=== end\n";
  if (std::getenv("UPDATE_GOLDEN")) {
    testing::write_file(path, actual);
    return;
  }
  REQUIRE_MESSAGE(std::filesystem::exists(path), "missing golden file " << path.string());
  CHECK(testing::read_file(path) == actual);
}

}  // namespace

TEST_CASE("generation settings are locked") {
  GenerationConfig c;
  CHECK_NOTHROW(c.validate());
  c.temperature = 0.7;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.temperature = 0.0;
  c.choice_index = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.choice_index = 0;
  c.model_id.clear();
  CHECK_THROWS_AS(c.validate(), ConfigError);

  LlmClient client(std::make_shared<MockProvider>());
  GenerationConfig hot;
  hot.temperature = 1.0;
  CHECK_THROWS_AS(client.complete(sample_bundle(), hot), ConfigError);
}

TEST_CASE("rate limits are retried with exponential backoff") {
  std::vector<std::chrono::milliseconds> sleeps;
  auto provider = std::make_shared<ScriptedProvider>(
      std::vector<std::optional<std::string>>{std::nullopt, std::nullopt, std::nullopt, "done"});
  LlmClient client(provider, recording(sleeps));
  CHECK(client.complete(sample_bundle(), {}) == "done");
  CHECK(provider->calls == 4);
  CHECK(sleeps == std::vector<std::chrono::milliseconds>{500ms, 1000ms, 2000ms});
}

TEST_CASE("retries stop at max_retries") {
  std::vector<std::chrono::milliseconds> sleeps;
  auto provider = std::make_shared<ScriptedProvider>(std::vector<std::optional<std::string>>(
      5, std::nullopt));
  LlmClient client(provider, recording(sleeps));
  GenerationConfig cfg;
  cfg.max_retries = 2;
  CHECK_THROWS_AS(client.complete(sample_bundle(), cfg), RateLimited);
  CHECK(provider->calls == 3);
  CHECK(sleeps.size() == 2);
}

TEST_CASE("other provider errors are not retried") {
  std::vector<std::chrono::milliseconds> sleeps;
  auto provider = std::make_shared<ScriptedProvider>(
      std::vector<std::optional<std::string>>{"!", "never"});
  LlmClient client(provider, recording(sleeps));
  CHECK_THROWS_AS(client.complete(sample_bundle(), {}), ProviderError);
  CHECK(provider->calls == 1);
  CHECK(sleeps.empty());
}

TEST_CASE("empty responses are errors") {
  auto none = std::make_shared<ScriptedProvider>(std::vector<std::optional<std::string>>{"<none>"});
  CHECK_THROWS_AS(LlmClient(none).complete(sample_bundle(), {}), EmptyResponse);
  auto blank = std::make_shared<ScriptedProvider>(
      std::vector<std::optional<std::string>>{"```rust\n```"});
  CHECK_THROWS_AS(LlmClient(blank).complete(sample_bundle(), {}), EmptyResponse);
}

TEST_CASE("the first choice is used and fences are stripped") {
  auto provider = std::make_shared<ScriptedProvider>(
      std::vector<std::optional<std::string>>{"Here:\n```rust\nfn a() {}\n```\ntrailing"});
  CHECK(LlmClient(provider).complete(sample_bundle(), {}) == "fn a() {}");
}

TEST_CASE("code fence stripping") {
  CHECK(strip_code_fences("```rust\nlet x = 1;\n```") == "let x = 1;");
  CHECK(strip_code_fences("```\nplain\n```\n```rust\nsecond\n```") == "plain");
  CHECK(strip_code_fences("  no fence here \n") == "no fence here");
  CHECK(strip_code_fences("```rust\nunterminated\n") == "unterminated");
  CHECK(strip_code_fences("```rust\r\nx\r\n```") == "x");
  CHECK(strip_code_fences("```rust\n\n  indented\n\n```") == "\n  indented\n");
}

TEST_CASE("self-report parsing") {
  CHECK(parse_self_report("RPD=3 UTC=1") == SelfReport{3, 1});
  CHECK(parse_self_report("rpds = 2, utcs=0") == SelfReport{2, 0});
  CHECK(parse_self_report("UTC=4\nRPD=7") == SelfReport{7, 4});
  CHECK(parse_self_report("I count 4 dereferences and 2 casts.") == SelfReport{4, 2});
  CHECK_THROWS_AS(parse_self_report("none found"), SelfReportParseError);
  CHECK_THROWS_AS(parse_self_report("only 1 number"), SelfReportParseError);
  CHECK_THROWS_AS(parse_self_report("-1 and 2"), SelfReportParseError);
}

TEST_CASE("mock provider is a pure function of the prompt") {
  MockProvider mock;
  const PromptBundle a{"s", "u", Stage::Transpile};
  const PromptBundle b{"s", "u2", Stage::Transpile};
  CHECK(mock.send(a, {}) == mock.send(a, {}));
  CHECK(mock.send(a, {}) != mock.send(b, {}));
  CHECK(strip_code_fences(MockProvider::response_for(a)).find("unsafe {") != std::string::npos);
  CHECK(strip_code_fences(MockProvider::response_for({"s", "u", Stage::Refine})).find("unsafe") ==
        std::string::npos);
  CHECK(parse_self_report(MockProvider::response_for({"s", "u", Stage::SelfReport})) ==
        SelfReport{0, 0});
  CHECK(MockProvider::response_for({"s", "u", Stage::Summarize}).starts_with("PROGRAM-SUMMARY:"));
}

TEST_CASE("fault injection fails one call of one stage") {
  auto faulty = std::make_shared<FaultInjectingProvider>(std::make_shared<MockProvider>(),
                                                         Stage::Transpile, 2);
  const PromptBundle t{"s", "u", Stage::Transpile};
  const PromptBundle r{"s", "u", Stage::Refine};
  CHECK_NOTHROW(faulty->send(t, {}));
  CHECK_NOTHROW(faulty->send(r, {}));
  CHECK_THROWS_AS(faulty->send(t, {}), ProviderError);
  CHECK_NOTHROW(faulty->send(t, {}));
}

TEST_CASE("in-flight requests are bounded") {
  auto probe = std::make_shared<ConcurrencyProbe>();
  ClientOptions o;
  o.max_in_flight = 2;
  LlmClient client(probe, o);
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&] { client.complete(sample_bundle(), {}); });
  }
  threads.clear();
  CHECK(probe->peak.load() <= 2);
  CHECK(probe->peak.load() >= 1);
}

TEST_CASE("minimum interval paces request starts") {
  std::vector<std::chrono::milliseconds> sleeps;
  ClientOptions o = recording(sleeps);
  o.min_interval = 10'000ms;
  LlmClient client(std::make_shared<MockProvider>(), o);
  client.complete(sample_bundle(), {});
  client.complete(sample_bundle(), {});
  REQUIRE(sleeps.size() >= 1);
  CHECK(sleeps.back() > 9'000ms);
}

TEST_CASE("summaries are capped") {
  auto provider = std::make_shared<ScriptedProvider>(
      std::vector<std::optional<std::string>>{std::string(5000, 's')});
  LlmClient client(provider);
  const auto summary =
      summarize_program(client, PromptTemplates::defaults(), {}, "int main(void) { return 0; }");
  CHECK(summary.size() == kMaxSummaryChars);
  CHECK_THROWS_AS(summarize_program(client, PromptTemplates::defaults(), {}, ""),
                  PreconditionError);
}

TEST_CASE("prompt layout") {
  const auto t = PromptTemplates::defaults();
  const auto bundle = build_transpile_prompt(t, c_segment("int f(void) { return 1; }\n"),
                                             "Counts lines.", sample_context());
  const auto& u = bundle.user_content;
  const auto summary_at = u.find("### Program summary\nCounts lines.");
  const auto context_at = u.find(kContextBegin);
  const auto end_at = u.find(kContextEnd);
  const auto segment_at = u.find("### C segment\nint f(void)");
  CHECK(summary_at == 0);
  CHECK(context_at != std::string::npos);
  CHECK(summary_at < context_at);
  CHECK(context_at < end_at);
  CHECK(end_at < segment_at);
  CHECK(u.find("[1] rust/raw-pointers.md#2 (score 0.8125)") != std::string::npos);
  CHECK(bundle.system_prompt == t.transpile);

  const auto bare = build_transpile_prompt(t, c_segment("x;"), "", {});
  CHECK(bare.user_content == "### C segment\nx;");

  const auto refine = build_refine_prompt(t, "fn a() {}", {}, "S");
  CHECK(refine.user_content == "### Program summary\nS\n\n### Rust segment\nfn a() {}");
  CHECK(refine.system_prompt.find("Improve general memory safety and security.") !=
        std::string::npos);

  CHECK_THROWS_AS(build_transpile_prompt(t, c_segment(""), "", {}), PreconditionError);
  CHECK_THROWS_AS(build_refine_prompt(t, "", {}), PreconditionError);
  CHECK_THROWS_AS(build_self_report_prompt(t, ""), PreconditionError);
}

TEST_CASE("prompt snapshots") {
  const auto t = PromptTemplates::defaults();
  check_golden("summary_prompt", build_summary_prompt(t, "int main(void) {\n  return 0;\n}\n"));
  check_golden("transpile_prompt",
               build_transpile_prompt(t, c_segment("int add(int *a, int *b) {\n  return *a + *b;\n}\n"),
                                      "Adds numbers.", sample_context()));
  check_golden("refine_prompt",
               build_refine_prompt(t, "unsafe fn add(a: *const i32) -> i32 { *a }", sample_context(),
                                   "Adds numbers."));
  check_golden("self_report_prompt", build_self_report_prompt(t, "fn id(x: u8) -> u8 { x }"));
}

TEST_CASE("templates load from a directory and match the compiled defaults") {
  const auto dir = testing::source_dir() / "prompts" / "v1";
  const auto loaded = PromptTemplates::load(dir);
  const auto defaults = PromptTemplates::defaults();
  CHECK(loaded.version == "v1");
  CHECK(defaults.version == "v1");
  CHECK(loaded.summarize == defaults.summarize);
  CHECK(loaded.transpile == defaults.transpile);
  CHECK(loaded.refine == defaults.refine);
  CHECK(loaded.self_report == defaults.self_report);

  testing::TempDir tmp;
  CHECK_THROWS_AS(PromptTemplates::load(tmp.path()), ConfigError);
}

TEST_CASE("bundle hash covers stage and both prompts") {
  const PromptBundle a{"s", "u", Stage::Transpile};
  CHECK(a.hash() == PromptBundle{"s", "u", Stage::Transpile}.hash());
  CHECK(a.hash() != PromptBundle{"s", "u", Stage::Refine}.hash());
  CHECK(a.hash() != PromptBundle{"s", "u ", Stage::Transpile}.hash());
  CHECK(a.hash() != PromptBundle{"su", "", Stage::Transpile}.hash());
}
