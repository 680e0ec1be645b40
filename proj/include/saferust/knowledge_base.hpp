#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "saferust/errors.hpp"

namespace saferust::kb {

using EmbeddingVector = Eigen::VectorXd;

struct Chunk {
  std::string doc_id;
  std::size_t chunk_index = 0;
  std::string text;
  std::size_t start_offset = 0;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct ChunkConfig {
  std::size_t chunk_size = 500;
  std::size_t overlap = 50;
};

// Re-chunking parameters applied to generated Rust before refinement.
struct RechunkConfig {
  std::size_t limit = 5000;
  std::size_t chunk_size = 4000;
  std::size_t overlap = 15;
};

struct RetrievalResult {
  Chunk chunk;
  double score = 0.0;
};

// Fixed-size windows advancing by chunk_size - overlap. Text no longer than
// chunk_size (including the empty string) yields exactly one chunk.
std::vector<Chunk> chunk_document(std::string_view text, std::size_t chunk_size,
                                  std::size_t overlap, std::string_view doc_id = {});

inline std::vector<Chunk> chunk_document(std::string_view text, const ChunkConfig& config,
                                         std::string_view doc_id = {}) {
  return chunk_document(text, config.chunk_size, config.overlap, doc_id);
}

std::vector<Chunk> rechunk_generated(std::string_view rust_text, const RechunkConfig& config = {});

// Closed-form number of chunks chunk_document produces.
std::size_t expected_chunk_count(std::size_t length, std::size_t chunk_size, std::size_t overlap);

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine_similarity(const Eigen::MatrixBase<DerivedA>& a,
                                            const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.size() != b.size()) {
    throw DimensionMismatch("cosine_similarity: dimensions " + std::to_string(a.size()) +
                            " and " + std::to_string(b.size()));
  }
  const Scalar na = a.norm();
  const Scalar nb = b.norm();
  if (na == Scalar(0) || nb == Scalar(0)) {
    throw ZeroVector("cosine_similarity: zero vector");
  }
  const Scalar s = a.dot(b) / (na * nb);
  return std::clamp(s, Scalar(-1), Scalar(1));
}

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::size_t dimension() const = 0;
  // Recorded in run manifests.
  virtual std::string name() const = 0;
};

// Lowercase alphanumeric word tokens, hashed into `dimension` buckets, counted
// and L2-normalized. Empty or token-free text maps to the zero vector.
class HashedTermFrequencyEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDefaultDimension = 1024;

  explicit HashedTermFrequencyEmbedder(std::size_t dimension = kDefaultDimension);

  EmbeddingVector embed(std::string_view text) const override;
  std::size_t dimension() const override { return dimension_; }
  std::string name() const override;

 private:
  std::size_t dimension_;
};

std::vector<std::string> tokenize_words(std::string_view text);

// Immutable after construction; safe for concurrent retrieve() calls.
class KnowledgeIndex {
 public:
  KnowledgeIndex() = default;

  std::size_t size() const noexcept { return chunks_.size(); }
  bool empty() const noexcept { return chunks_.empty(); }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  // Column i is the raw embedding of chunk i.
  const Eigen::MatrixXd& vectors() const noexcept { return vectors_; }
  bool retrievable(std::size_t i) const { return norms_[static_cast<Eigen::Index>(i)] > 0.0; }

  // Top-k chunks by cosine similarity, score descending, ties by
  // (doc_id, chunk_index). Zero-vector chunks are never returned; a query
  // that embeds to zero returns nothing. Throws EmptyIndex.
  std::vector<RetrievalResult> retrieve(const Embedder& embedder, std::string_view query,
                                        std::size_t k) const;
  std::vector<RetrievalResult> retrieve(const EmbeddingVector& query, std::size_t k) const;

  // Newline-delimited JSON, one {doc_id, chunk_index, start_offset, text, vector}
  // record per chunk. load() rejects vectors whose dimension differs from the
  // embedder's with DimensionMismatch.
  void save(const std::filesystem::path& path) const;
  static KnowledgeIndex load(const std::filesystem::path& path, const Embedder& embedder);

 private:
  friend class KnowledgeIndexBuilder;

  std::vector<Chunk> chunks_;
  Eigen::MatrixXd vectors_;
  Eigen::VectorXd norms_;
};

class KnowledgeIndexBuilder {
 public:
  explicit KnowledgeIndexBuilder(const Embedder& embedder) : embedder_(embedder) {}

  // Chunks and embeds one document; returns the number of chunks added.
  std::size_t add_document(std::string_view doc_id, std::string_view text,
                           const ChunkConfig& config);
  void add_chunk(Chunk chunk, EmbeddingVector vector);
  // Every *.md / *.txt file under `dir`, in sorted relative-path order; the
  // relative path is the doc_id.
  std::size_t add_directory(const std::filesystem::path& dir, const ChunkConfig& config);

  KnowledgeIndex build() &&;

 private:
  const Embedder& embedder_;
  std::vector<Chunk> chunks_;
  std::vector<EmbeddingVector> vectors_;
};

}  // namespace saferust::kb
