#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace saferust {

// 64-bit FNV-1a. Stable across platforms and process restarts, which is all
// the mock provider, the hashed embedder and the config hash need.
class Fnv1a64 {
 public:
  static constexpr std::uint64_t kOffset = 0xcbf29ce484222325ULL;
  static constexpr std::uint64_t kPrime = 0x100000001b3ULL;

  Fnv1a64& update(std::string_view bytes) noexcept {
    for (unsigned char c : bytes) {
      state_ ^= c;
      state_ *= kPrime;
    }
    return *this;
  }

  // Length-prefixed update so that ("ab","c") and ("a","bc") differ.
  Fnv1a64& field(std::string_view bytes) noexcept;

  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = kOffset;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

// Lowercase, zero-padded, 16 characters.
std::string to_hex(std::uint64_t value);

}  // namespace saferust
