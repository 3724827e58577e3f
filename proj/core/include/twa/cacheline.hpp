#pragma once

#include <cstddef>

namespace twa {

// Adjacent-line prefetch pulls cache lines in pairs on Intel parts, so the
// unit of isolation is a 128-byte sector rather than a single 64-byte line.
inline constexpr std::size_t kSectorSize = 128;

// Holds one value on a sector of its own.
template <typename T>
struct alignas(kSectorSize) Padded {
  T value{};
};

}  // namespace twa
