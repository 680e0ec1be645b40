#include <cctype>

#include "saferust/hash.hpp"
#include "saferust/knowledge_base.hpp"

namespace saferust::kb {

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (c < 0x80 && (std::isalnum(c) || c == '_')) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

HashedTermFrequencyEmbedder::HashedTermFrequencyEmbedder(std::size_t dimension)
    : dimension_(dimension) {
  if (dimension_ == 0) throw ConfigError("embedding dimension must be positive");
}

std::string HashedTermFrequencyEmbedder::name() const {
  return "hashed-tf-" + std::to_string(dimension_);
}

EmbeddingVector HashedTermFrequencyEmbedder::embed(std::string_view text) const {
  EmbeddingVector v = EmbeddingVector::Zero(static_cast<Eigen::Index>(dimension_));
  for (const std::string& token : tokenize_words(text)) {
    v[static_cast<Eigen::Index>(fnv1a64(token) % dimension_)] += 1.0;
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

}  // namespace saferust::kb
