#include <doctest.h>

#include <random>
#include <set>

#include "saferust/errors.hpp"
#include "saferust/knowledge_base.hpp"
#include "support/test_support.hpp"

using namespace saferust;
using namespace saferust::kb;

namespace {

std::size_t oracle_count(std::size_t len, std::size_t size, std::size_t overlap) {
  if (len <= size) return 1;
  const std::size_t step = size - overlap;
  return (len - size + step - 1) / step + 1;
}

// Fixed-dimension embedder for hand-built vectors.
class NullEmbedder final : public Embedder {
 public:
  explicit NullEmbedder(std::size_t dim) : dim_(dim) {}
  EmbeddingVector embed(std::string_view) const override { return EmbeddingVector::Zero(dim_); }
  std::size_t dimension() const override { return dim_; }
  std::string name() const override { return "null"; }

 private:
  std::size_t dim_;
};

std::vector<RetrievalResult> exhaustive(const KnowledgeIndex& index, const EmbeddingVector& q,
                                        std::size_t k) {
  std::vector<RetrievalResult> all;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const EmbeddingVector v = index.vectors().col(static_cast<Eigen::Index>(i));
    if (v.norm() == 0.0) continue;
    all.push_back({index.chunks()[i], cosine_similarity(q, v)});
  }
  std::sort(all.begin(), all.end(), [](const RetrievalResult& a, const RetrievalResult& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.chunk.doc_id != b.chunk.doc_id) return a.chunk.doc_id < b.chunk.doc_id;
    return a.chunk.chunk_index < b.chunk.chunk_index;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

}  // namespace

TEST_CASE("document chunks advance by size minus overlap") {
  const std::string text(1200, 'x');
  const auto chunks = chunk_document(text, 500, 50, "doc");
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].start_offset == 0);
  CHECK(chunks[1].start_offset == 450);
  CHECK(chunks[2].start_offset == 900);
  CHECK(chunks[2].text.size() == 300);
  CHECK(chunks[1].chunk_index == 1);
  CHECK(chunks[1].doc_id == "doc");
}

TEST_CASE("short and empty documents produce a single chunk") {
  CHECK(chunk_document("", ChunkConfig{}).size() == 1);
  CHECK(chunk_document(std::string(500, 'a'), ChunkConfig{}).size() == 1);
  CHECK(chunk_document(std::string(501, 'a'), ChunkConfig{}).size() == 2);
}

TEST_CASE("invalid chunk configurations are rejected") {
  CHECK_THROWS_AS(chunk_document("abc", 0, 0), InvalidChunkConfig);
  CHECK_THROWS_AS(chunk_document("abc", 10, 10), InvalidChunkConfig);
  CHECK_THROWS_AS(chunk_document("abc", 10, 11), InvalidChunkConfig);
  CHECK_THROWS_AS(rechunk_generated("x", {100, 200, 10}), InvalidChunkConfig);
}

TEST_CASE("chunk count matches the closed form over random configurations") {
  std::mt19937_64 rng(testing::kSeed);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t size = std::uniform_int_distribution<std::size_t>(1, 600)(rng);
    const std::size_t overlap = std::uniform_int_distribution<std::size_t>(0, size - 1)(rng);
    const std::size_t len = std::uniform_int_distribution<std::size_t>(0, 5000)(rng);
    std::string text(len, '\0');
    for (auto& c : text) c = static_cast<char>('a' + rng() % 26);
    const auto chunks = chunk_document(text, size, overlap);
    REQUIRE(chunks.size() == oracle_count(len, size, overlap));
    CHECK(expected_chunk_count(len, size, overlap) == chunks.size());
    // Every byte is covered and consecutive chunks share exactly `overlap`.
    CHECK(chunks.back().start_offset + chunks.back().text.size() == len);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      CHECK(chunks[i].text.size() <= size);
      CHECK(text.compare(chunks[i].start_offset, chunks[i].text.size(), chunks[i].text) == 0);
      if (i + 1 < chunks.size()) {
        CHECK(chunks[i].text.size() == size);
        CHECK(chunks[i + 1].start_offset == chunks[i].start_offset + size - overlap);
      }
    }
  }
}

TEST_CASE("generated code is re-chunked only above the limit") {
  const RechunkConfig cfg;
  CHECK(rechunk_generated(std::string(5000, 'r'), cfg).size() == 1);
  const auto two = rechunk_generated(std::string(5200, 'r'), cfg);
  REQUIRE(two.size() == 2);
  CHECK(two[0].text.size() == 4000);
  CHECK(two[1].start_offset == 3985);
  CHECK(two[1].text.size() == 1215);
  CHECK(rechunk_generated(std::string(5001, 'r'), cfg).size() == 2);
  CHECK(rechunk_generated(std::string(12000, 'r'), cfg).size() == 4);
}

TEST_CASE("cosine similarity") {
  Eigen::Vector3d a(1, 2, 3), b(4, 5, 6);
  CHECK(cosine_similarity(a, b) == doctest::Approx(0.974631846).epsilon(1e-9));
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0));
  CHECK(cosine_similarity(a, Eigen::Vector3d(-1, -2, -3)) == doctest::Approx(-1.0));
  CHECK(cosine_similarity(Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) == doctest::Approx(0.0));
  CHECK_THROWS_AS(cosine_similarity(a, Eigen::Vector3d::Zero()), ZeroVector);
  CHECK_THROWS_AS(cosine_similarity(Eigen::VectorXd(a), Eigen::VectorXd::Ones(2)), DimensionMismatch);
}

TEST_CASE("hashed term-frequency embedding") {
  const HashedTermFrequencyEmbedder e;
  CHECK(e.dimension() == 1024);
  CHECK(e.name() == "hashed-tf-1024");
  const auto v = e.embed("raw pointer dereference in unsafe block");
  CHECK(v.size() == 1024);
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(v == e.embed("raw pointer dereference in unsafe block"));
  CHECK(e.embed("Raw POINTER") == e.embed("raw pointer"));
  CHECK(e.embed("").norm() == 0.0);
  CHECK(e.embed("!!! ---").norm() == 0.0);
  CHECK(tokenize_words("Foo_bar, baz9!") == std::vector<std::string>{"foo_bar", "baz9"});
  CHECK_THROWS(HashedTermFrequencyEmbedder(0));
}

TEST_CASE("retrieval equals an exhaustive cosine scan") {
  std::mt19937_64 rng(testing::kSeed + 1);
  std::normal_distribution<double> normal;
  const std::size_t dim = 16;
  const NullEmbedder embedder(dim);
  for (int trial = 0; trial < 100; ++trial) {
    KnowledgeIndexBuilder builder(embedder);
    const std::size_t n = 1 + rng() % 200;
    for (std::size_t i = 0; i < n; ++i) {
      EmbeddingVector v(dim);
      for (auto& x : v) x = normal(rng);
      if (rng() % 25 == 0) v.setZero();
      builder.add_chunk({"doc" + std::to_string(rng() % 7), i, "t", 0}, v);
    }
    const auto index = std::move(builder).build();
    EmbeddingVector q(dim);
    for (auto& x : q) x = normal(rng);
    const std::size_t k = 1 + rng() % 12;
    const auto got = index.retrieve(q, k);
    const auto want = exhaustive(index, q, k);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].chunk == want[i].chunk);
      CHECK(got[i].score == doctest::Approx(want[i].score).epsilon(1e-12));
    }
  }
}

TEST_CASE("equal scores are ordered by document id then chunk index") {
  const NullEmbedder embedder(3);
  KnowledgeIndexBuilder builder(embedder);
  const Eigen::Vector3d same(1, 1, 0);
  builder.add_chunk({"b.md", 1, "b1", 0}, same);
  builder.add_chunk({"a.md", 2, "a2", 0}, same);
  builder.add_chunk({"b.md", 0, "b0", 0}, same);
  builder.add_chunk({"a.md", 0, "a0", 0}, same);
  builder.add_chunk({"c.md", 0, "far", 0}, Eigen::Vector3d(0, 0, 1));
  const auto index = std::move(builder).build();
  const auto got = index.retrieve(Eigen::Vector3d(1, 1, 0), 4);
  REQUIRE(got.size() == 4);
  CHECK(got[0].chunk.text == "a0");
  CHECK(got[1].chunk.text == "a2");
  CHECK(got[2].chunk.text == "b0");
  CHECK(got[3].chunk.text == "b1");
  // k beyond the index size returns every chunk.
  CHECK(index.retrieve(Eigen::Vector3d(1, 0, 0), 50).size() == 5);
}

TEST_CASE("retrieval preconditions") {
  const HashedTermFrequencyEmbedder e(32);
  KnowledgeIndex empty;
  CHECK_THROWS_AS(empty.retrieve(e, "q", 4), EmptyIndex);

  KnowledgeIndexBuilder builder(e);
  builder.add_document("doc.md", "pointers and references", {});
  const auto index = std::move(builder).build();
  CHECK_THROWS_AS(index.retrieve(e, "pointers", 0), PreconditionError);
  CHECK_THROWS_AS(index.retrieve(EmbeddingVector::Ones(8), 1), DimensionMismatch);
  CHECK(index.retrieve(e, "???", 4).empty());
  CHECK(index.retrieve(e, "pointers", 4).size() == 1);

  KnowledgeIndexBuilder bad(e);
  CHECK_THROWS_AS(bad.add_chunk({"x", 0, "t", 0}, EmbeddingVector::Ones(4)), DimensionMismatch);
}

TEST_CASE("index save and load round trip") {
  testing::TempDir dir;
  const HashedTermFrequencyEmbedder e(64);
  KnowledgeIndexBuilder builder(e);
  builder.add_document("a.md", std::string(1300, 'a') + " raw pointer unsafe", {});
  builder.add_document("b.md", "casting integers with as é ünïcode", {});
  const auto index = std::move(builder).build();
  index.save(dir / "index.ndjson");
  const auto loaded = KnowledgeIndex::load(dir / "index.ndjson", e);
  CHECK(loaded.chunks() == index.chunks());
  CHECK(loaded.vectors() == index.vectors());
  const auto r1 = index.retrieve(e, "unsafe pointer", 3);
  const auto r2 = loaded.retrieve(e, "unsafe pointer", 3);
  REQUIRE(r1.size() == r2.size());
  for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].chunk == r2[i].chunk);

  CHECK_THROWS_AS(KnowledgeIndex::load(dir / "index.ndjson", HashedTermFrequencyEmbedder(32)),
                  DimensionMismatch);
  testing::write_file(dir / "broken.ndjson", "{\"doc_id\": 3}\n");
  CHECK_THROWS_AS(KnowledgeIndex::load(dir / "broken.ndjson", e), IndexFormatError);
  CHECK_THROWS_AS(KnowledgeIndex::load(dir / "missing.ndjson", e), IndexFormatError);
}

TEST_CASE("directory indexing is sorted and filtered by extension") {
  testing::TempDir dir;
  testing::write_file(dir / "z.md", "zeta");
  testing::write_file(dir / "sub" / "a.txt", "alpha");
  testing::write_file(dir / "skip.rs", "fn main() {}");
  testing::write_file(dir / "empty.md", "");
  const HashedTermFrequencyEmbedder e(32);
  KnowledgeIndexBuilder builder(e);
  CHECK(builder.add_directory(dir.path(), {}) == 2);
  const auto index = std::move(builder).build();
  REQUIRE(index.size() == 2);
  CHECK(index.chunks()[0].doc_id == "sub/a.txt");
  CHECK(index.chunks()[1].doc_id == "z.md");
}
