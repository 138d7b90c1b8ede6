#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace lpe {

/// 64-bit FNV-1a; stable across platforms and runs.
class Fnv1a {
 public:
  Fnv1a& add(std::span<const unsigned char> bytes) noexcept {
    for (unsigned char b : bytes) {
      state_ ^= b;
      state_ *= 0x100000001b3ull;
    }
    return *this;
  }
  Fnv1a& add(std::string_view s) noexcept {
    return add(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
  }
  template <typename T>
  Fnv1a& add_values(std::span<const T> values) noexcept {
    return add(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(values.data()),
                                              values.size_bytes()));
  }
  std::uint64_t value() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ull;
};

std::string hex64(std::uint64_t value);

}  // namespace lpe
