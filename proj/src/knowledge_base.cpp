#include "saferust/knowledge_base.hpp"

#include <fstream>
#include <json.hpp>
#include <numeric>
#include <sstream>

namespace saferust::kb {

using nlohmann::json;

std::size_t expected_chunk_count(std::size_t length, std::size_t chunk_size, std::size_t overlap) {
  if (overlap >= chunk_size) {
    throw InvalidChunkConfig("overlap must be smaller than chunk_size");
  }
  if (length <= chunk_size) return 1;
  const std::size_t step = chunk_size - overlap;
  return (length - chunk_size + step - 1) / step + 1;
}

std::vector<Chunk> chunk_document(std::string_view text, std::size_t chunk_size,
                                  std::size_t overlap, std::string_view doc_id) {
  if (chunk_size == 0 || overlap >= chunk_size) {
    throw InvalidChunkConfig("invalid chunk config: size " + std::to_string(chunk_size) +
                             ", overlap " + std::to_string(overlap));
  }
  const std::size_t step = chunk_size - overlap;
  std::vector<Chunk> chunks;
  std::size_t start = 0;
  while (true) {
    Chunk c;
    c.doc_id = std::string(doc_id);
    c.chunk_index = chunks.size();
    c.start_offset = start;
    c.text = std::string(text.substr(start, chunk_size));
    chunks.push_back(std::move(c));
    if (start + chunk_size >= text.size()) break;
    start += step;
  }
  return chunks;
}

std::vector<Chunk> rechunk_generated(std::string_view rust_text, const RechunkConfig& config) {
  if (config.limit < config.chunk_size) {
    throw InvalidChunkConfig("re-chunk limit must be at least the chunk size");
  }
  if (rust_text.size() <= config.limit) {
    return {Chunk{"", 0, std::string(rust_text), 0}};
  }
  return chunk_document(rust_text, config.chunk_size, config.overlap);
}

std::vector<RetrievalResult> KnowledgeIndex::retrieve(const Embedder& embedder,
                                                      std::string_view query,
                                                      std::size_t k) const {
  return retrieve(embedder.embed(query), k);
}

std::vector<RetrievalResult> KnowledgeIndex::retrieve(const EmbeddingVector& query,
                                                      std::size_t k) const {
  if (empty()) throw EmptyIndex("knowledge index is empty");
  if (k == 0) throw PreconditionError("k must be at least 1");
  if (query.size() != vectors_.rows()) {
    throw DimensionMismatch("query dimension " + std::to_string(query.size()) +
                            " does not match index dimension " +
                            std::to_string(vectors_.rows()));
  }
  const double qnorm = query.norm();
  if (qnorm == 0.0) return {};

  const Eigen::VectorXd dots = vectors_.transpose() * query;

  std::vector<std::size_t> order;
  order.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) {
    if (retrievable(i)) order.push_back(i);
  }
  auto score_of = [&](std::size_t i) {
    const auto idx = static_cast<Eigen::Index>(i);
    return std::clamp(dots[idx] / (norms_[idx] * qnorm), -1.0, 1.0);
  };
  std::vector<double> scores(size(), 0.0);
  for (std::size_t i : order) scores[i] = score_of(i);

  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (chunks_[a].doc_id != chunks_[b].doc_id) return chunks_[a].doc_id < chunks_[b].doc_id;
    return chunks_[a].chunk_index < chunks_[b].chunk_index;
  };
  const std::size_t take = std::min(k, order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    better);

  std::vector<RetrievalResult> results;
  results.reserve(take);
  for (std::size_t j = 0; j < take; ++j) {
    results.push_back({chunks_[order[j]], scores[order[j]]});
  }
  return results;
}

void KnowledgeIndex::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IndexFormatError("cannot write index file " + path.string());
  for (std::size_t i = 0; i < size(); ++i) {
    const auto col = vectors_.col(static_cast<Eigen::Index>(i));
    json record = {
        {"doc_id", chunks_[i].doc_id},
        {"chunk_index", chunks_[i].chunk_index},
        {"start_offset", chunks_[i].start_offset},
        {"text", chunks_[i].text},
        {"vector", std::vector<double>(col.data(), col.data() + col.size())},
    };
    out << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

KnowledgeIndex KnowledgeIndex::load(const std::filesystem::path& path, const Embedder& embedder) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexFormatError("cannot open index file " + path.string());
  KnowledgeIndexBuilder builder(embedder);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json record = json::parse(line);
      Chunk c;
      c.doc_id = record.at("doc_id").get<std::string>();
      c.chunk_index = record.at("chunk_index").get<std::size_t>();
      c.start_offset = record.at("start_offset").get<std::size_t>();
      c.text = record.at("text").get<std::string>();
      const auto values = record.at("vector").get<std::vector<double>>();
      builder.add_chunk(std::move(c),
                        Eigen::Map<const EmbeddingVector>(values.data(),
                                                          static_cast<Eigen::Index>(values.size())));
    } catch (const json::exception& e) {
      throw IndexFormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return std::move(builder).build();
}

std::size_t KnowledgeIndexBuilder::add_document(std::string_view doc_id, std::string_view text,
                                                const ChunkConfig& config) {
  auto chunks = chunk_document(text, config, doc_id);
  for (Chunk& c : chunks) {
    EmbeddingVector v = embedder_.embed(c.text);
    add_chunk(std::move(c), std::move(v));
  }
  return chunks.size();
}

void KnowledgeIndexBuilder::add_chunk(Chunk chunk, EmbeddingVector vector) {
  if (static_cast<std::size_t>(vector.size()) != embedder_.dimension()) {
    throw DimensionMismatch("chunk vector dimension " + std::to_string(vector.size()) +
                            " does not match embedder dimension " +
                            std::to_string(embedder_.dimension()));
  }
  chunks_.push_back(std::move(chunk));
  vectors_.push_back(std::move(vector));
}

std::size_t KnowledgeIndexBuilder::add_directory(const std::filesystem::path& dir,
                                                 const ChunkConfig& config) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".md" || ext == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::size_t added = 0;
  for (const fs::path& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.empty()) continue;
    added += add_document(fs::relative(file, dir).generic_string(), text, config);
  }
  return added;
}

KnowledgeIndex KnowledgeIndexBuilder::build() && {
  KnowledgeIndex index;
  const auto dim = static_cast<Eigen::Index>(embedder_.dimension());
  const auto n = static_cast<Eigen::Index>(vectors_.size());
  index.vectors_.resize(dim, n);
  for (Eigen::Index i = 0; i < n; ++i) index.vectors_.col(i) = vectors_[static_cast<std::size_t>(i)];
  index.norms_ = index.vectors_.colwise().norm().transpose();
  index.chunks_ = std::move(chunks_);
  return index;
}

}  // namespace saferust::kb
