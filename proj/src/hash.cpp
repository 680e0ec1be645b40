#include "saferust/hash.hpp"

#include <array>

namespace saferust {

Fnv1a64& Fnv1a64::field(std::string_view bytes) noexcept {
  std::uint64_t n = bytes.size();
  std::array<char, 8> len{};
  for (auto& b : len) {
    b = static_cast<char>(n & 0xff);
    n >>= 8;
  }
  update(std::string_view(len.data(), len.size()));
  return update(bytes);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  return Fnv1a64{}.update(bytes).digest();
}

std::string to_hex(std::uint64_t value) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kDigits[value & 0xf];
    value >>= 4;
  }
  return out;
}

}  // namespace saferust
