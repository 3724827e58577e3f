#pragma once

#include <atomic>
#include <cstdint>

namespace twa {

/// Identity-based park/unpark: a bounded binary semaphore owned by one thread.
///
/// An unpark that arrives before the park leaves a permit behind, and the
/// next park consumes it and returns at once. Permits do not accumulate.
///
/// Parkers are never freed. A thread draws one from a process-wide pool on
/// first use and returns it when the thread exits, so an unpark racing with
/// thread exit lands on live memory and at worst costs the next owner one
/// spurious park return.
class Parker {
 public:
  /// The calling thread's parker.
  static Parker& current();

  /// Blocks the owning thread until a permit is available, then consumes it.
  void park() noexcept;

  /// Publishes a permit and wakes the owner if it is parked. Any thread.
  void unpark() noexcept;

  Parker() = default;
  Parker(const Parker&) = delete;
  Parker& operator=(const Parker&) = delete;

 private:
  friend class ParkerPool;

  static constexpr std::uint32_t kEmpty = 0;
  static constexpr std::uint32_t kNotified = 1;
  static constexpr std::uint32_t kParked = UINT32_MAX;

  std::atomic<std::uint32_t> state_{kEmpty};
  Parker* next_free_ = nullptr;
};

}  // namespace twa
