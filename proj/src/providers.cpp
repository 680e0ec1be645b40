#include "saferust/providers.hpp"

#include <httplib.h>

#include <json.hpp>

#include "saferust/errors.hpp"

namespace saferust::llm {

using nlohmann::json;

namespace {

struct SplitUrl {
  std::string scheme_host_port;
  std::string path_prefix;
};

SplitUrl split_base(const std::string& base) {
  const auto scheme_end = base.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("api_base needs a scheme: " + base);
  const auto path_start = base.find('/', scheme_end + 3);
  SplitUrl out;
  out.scheme_host_port = base.substr(0, path_start);
  out.path_prefix = path_start == std::string::npos ? "" : base.substr(path_start);
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

json post_json(const HttpEndpoint& endpoint, const std::string& route, const json& body) {
  const SplitUrl url = split_base(endpoint.api_base);
  httplib::Client client(url.scheme_host_port);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(endpoint.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (!endpoint.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  }
  auto res = client.Post(url.path_prefix + route, headers, body.dump(), "application/json");
  if (!res) {
    throw ProviderError("request to " + endpoint.api_base + route + " failed: " +
                        httplib::to_string(res.error()));
  }
  if (res->status == 429) throw RateLimited("rate limited by " + endpoint.api_base);
  if (res->status == 401 || res->status == 403) {
    throw ProviderError("authentication rejected by " + endpoint.api_base + " (HTTP " +
                        std::to_string(res->status) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderError("HTTP " + std::to_string(res->status) + " from " + endpoint.api_base +
                        route + ": " + res->body.substr(0, 200));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed response body: ") + e.what());
  }
}

}  // namespace

OpenAiCompatibleProvider::OpenAiCompatibleProvider(HttpEndpoint endpoint)
    : endpoint_(std::move(endpoint)) {
  split_base(endpoint_.api_base);
}

std::vector<std::string> OpenAiCompatibleProvider::send(const PromptBundle& bundle,
                                                        const GenerationConfig& config) {
  config.validate();
  const json body = {
      {"model", config.model_id},
      {"temperature", config.temperature},
      {"n", 1},
      {"messages",
       json::array({{{"role", "system"}, {"content", bundle.system_prompt}},
                    {{"role", "user"}, {"content", bundle.user_content}}})},
  };
  HttpEndpoint ep = endpoint_;
  ep.timeout = config.timeout;
  const json response = post_json(ep, "/chat/completions", body);

  std::vector<std::string> choices;
  try {
    for (const auto& choice : response.value("choices", json::array())) {
      const auto& content = choice.at("message").at("content");
      choices.push_back(content.is_null() ? std::string() : content.get<std::string>());
    }
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected completion schema: ") + e.what());
  }
  return choices;
}

RemoteEmbedder::RemoteEmbedder(HttpEndpoint endpoint, std::string model, std::size_t dimension)
    : endpoint_(std::move(endpoint)), model_(std::move(model)), dimension_(dimension) {
  if (dimension_ == 0) throw ConfigError("embedding dimension must be positive");
  split_base(endpoint_.api_base);
}

kb::EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
  if (text.empty()) return kb::EmbeddingVector::Zero(static_cast<Eigen::Index>(dimension_));
  const json body = {{"model", model_}, {"input", std::string(text)}};
  const json response = post_json(endpoint_, "/embeddings", body);
  std::vector<double> values;
  try {
    values = response.at("data").at(0).at("embedding").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ProviderError(std::string("unexpected embedding schema: ") + e.what());
  }
  if (values.size() != dimension_) {
    throw DimensionMismatch("remote embedding has " + std::to_string(values.size()) +
                            " entries, expected " + std::to_string(dimension_));
  }
  return Eigen::Map<const kb::EmbeddingVector>(values.data(),
                                               static_cast<Eigen::Index>(values.size()));
}

}  // namespace saferust::llm
