#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "saferust/errors.hpp"
#include "saferust/hash.hpp"
#include "saferust/pipeline.hpp"

namespace saferust::pipeline {

namespace fs = std::filesystem;

CheckpointStore::CheckpointStore(fs::path dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) fs::create_directories(dir_);
}

std::string CheckpointStore::key(llm::Stage stage, std::size_t segment,
                                 std::optional<std::size_t> piece,
                                 const llm::PromptBundle& bundle) {
  char index[48];
  if (piece) {
    std::snprintf(index, sizeof index, "%04zu.%02zu", segment, *piece);
  } else {
    std::snprintf(index, sizeof index, "%04zu", segment);
  }
  return std::string(llm::to_string(stage)) + "-" + index + "-" + to_hex(bundle.hash());
}

std::optional<std::string> CheckpointStore::load(std::string_view key) const {
  if (!enabled()) return std::nullopt;
  std::ifstream in(dir_ / (std::string(key) + ".txt"), std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void CheckpointStore::store(std::string_view key, std::string_view value) const {
  if (!enabled()) return;
  static std::atomic<unsigned> counter{0};
  const fs::path target = dir_ / (std::string(key) + ".txt");
  const fs::path tmp = dir_ / ("." + std::string(key) + "." + std::to_string(::getpid()) + "." +
                               std::to_string(counter++) + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(value.data(), static_cast<std::streamsize>(value.size()));
    out.flush();
    if (!out) throw std::system_error(errno, std::generic_category(), "write " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::size_t CheckpointStore::size() const {
  if (!enabled() || !fs::exists(dir_)) return 0;
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") ++n;
  }
  return n;
}

}  // namespace saferust::pipeline
