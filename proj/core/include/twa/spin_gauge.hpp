#pragma once

#include <array>
#include <atomic>
#include <cstddef>
#include <cstdint>

namespace twa {

/// Conformance probe: tracks which tickets are spinning on grant.
///
/// Each short-term spinner registers its ticket on entry. At registration the
/// gauge counts registered tickets that are not yet admitted (ticket >= the
/// grant read after registering) and folds that into a running maximum. An
/// admitted spinner that has not yet deregistered is not counted.
class SpinGauge {
 public:
  static constexpr std::size_t kCapacity = 256;
  static constexpr std::uint64_t kVacant = UINT64_MAX;

  SpinGauge() noexcept {
    for (auto& s : slots_) s.store(kVacant);
  }

  /// Returns a handle for leave(). `grant` reads the semaphore's grant.
  template <typename GrantFn>
  std::size_t enter(std::uint64_t ticket, GrantFn&& grant) noexcept {
    std::size_t handle = 0;
    for (;; handle = (handle + 1) % kCapacity) {
      std::uint64_t vacant = kVacant;
      if (slots_[handle].compare_exchange_strong(vacant, ticket)) break;
    }
    const std::uint64_t g = grant();
    std::uint64_t spinning = 0;
    for (const auto& s : slots_) {
      const std::uint64_t t = s.load();
      if (t != kVacant && t >= g) ++spinning;
    }
    std::uint64_t seen = max_.load();
    while (spinning > seen && !max_.compare_exchange_weak(seen, spinning)) {
    }
    entries_.fetch_add(1);
    return handle;
  }

  void leave(std::size_t handle) noexcept { slots_[handle].store(kVacant); }

  std::uint64_t max_spinners() const noexcept { return max_.load(); }
  std::uint64_t entries() const noexcept { return entries_.load(); }

 private:
  std::array<std::atomic<std::uint64_t>, kCapacity> slots_;
  std::atomic<std::uint64_t> max_{0};
  std::atomic<std::uint64_t> entries_{0};
};

}  // namespace twa
