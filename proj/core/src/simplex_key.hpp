#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace tdacloud::detail {

struct SimplexKeyHash {
  std::size_t operator()(const std::array<std::int32_t, 4>& v) const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (std::int32_t x : v) {
      h ^= static_cast<std::uint32_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 0xbf58476d1ce4e5b9ULL;
      h ^= h >> 31;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace tdacloud::detail
