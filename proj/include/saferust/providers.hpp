#pragma once

#include <chrono>
#include <string>

#include "saferust/knowledge_base.hpp"
#include "saferust/llm_client.hpp"

namespace saferust::llm {

struct HttpEndpoint {
  // e.g. "https://api.openai.com/v1" or "http://127.0.0.1:8080/v1"
  std::string api_base;
  std::string api_key;
  std::chrono::milliseconds timeout{60'000};
};

// POST {api_base}/chat/completions with a system and a user message,
// temperature 0 and n = 1. HTTP 429 maps to RateLimited, other failures to
// ProviderError.
class OpenAiCompatibleProvider final : public Provider {
 public:
  explicit OpenAiCompatibleProvider(HttpEndpoint endpoint);

  std::vector<std::string> send(const PromptBundle& bundle,
                                const GenerationConfig& config) override;
  std::string name() const override { return "openai-compatible"; }

 private:
  HttpEndpoint endpoint_;
};

// POST {api_base}/embeddings. Vectors must have `dimension` entries.
class RemoteEmbedder final : public kb::Embedder {
 public:
  RemoteEmbedder(HttpEndpoint endpoint, std::string model, std::size_t dimension);

  kb::EmbeddingVector embed(std::string_view text) const override;
  std::size_t dimension() const override { return dimension_; }
  std::string name() const override { return "remote:" + model_; }

 private:
  HttpEndpoint endpoint_;
  std::string model_;
  std::size_t dimension_;
};

}  // namespace saferust::llm
