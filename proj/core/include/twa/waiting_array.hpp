#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>

#include "twa/cacheline.hpp"
#include "twa/wait_chain.hpp"
#include "twa/wait_strategy.hpp"

namespace twa {

/// Multiplicative mixing constant (2^64 / golden ratio).
inline constexpr std::uint64_t kHashMix = 0x9E3779B97F4A7C15ull;

/// Ticket-aware slot hash: consecutive tickets of one semaphore land on
/// unrelated slots. `log2_slots` must be in [0, 63].
constexpr std::size_t slot_index(std::uint64_t sem_identity, std::uint64_t ticket,
                                 unsigned log2_slots) noexcept {
  if (log2_slots == 0) return 0;
  const std::uint64_t mixed = (sem_identity ^ (ticket * kHashMix)) * kHashMix;
  return static_cast<std::size_t>(mixed >> (64 - log2_slots));
}

/// One waiting-array element. A semaphore uses either the notification
/// counter (counter-slot variant) or the chain head (chain-slot variant).
struct alignas(kSectorSize) WaitSlot {
  NotifyWord counter;
  ChainHead chain_head{nullptr};
};

/// Fixed-size array of padded slots used for long-term waiting, shared by
/// every semaphore that points at it.
class WaitingArray {
 public:
  static constexpr std::size_t kDefaultSlots = 4096;

  /// Throws std::invalid_argument unless `slots` is a power of two.
  explicit WaitingArray(std::size_t slots = kDefaultSlots);

  WaitingArray(const WaitingArray&) = delete;
  WaitingArray& operator=(const WaitingArray&) = delete;

  /// The process-wide array (kDefaultSlots slots).
  static WaitingArray& shared();

  std::size_t size() const noexcept { return std::size_t{1} << log2_slots_; }
  unsigned log2_size() const noexcept { return log2_slots_; }

  std::size_t index_of(std::uint64_t sem_identity, std::uint64_t ticket) const noexcept {
    return slot_index(sem_identity, ticket, log2_slots_);
  }

  WaitSlot& slot(std::size_t index) noexcept { return slots_[index]; }
  const WaitSlot& slot(std::size_t index) const noexcept { return slots_[index]; }

  /// Counter-slot notification: bumps the counter of the slot that `ticket`
  /// of `sem_identity` waits on and wakes any blocked waiters there.
  void notify(std::uint64_t sem_identity, std::uint64_t ticket) noexcept {
    slots_[index_of(sem_identity, ticket)].counter.notify();
  }

  std::uint32_t snapshot(std::size_t index) const noexcept {
    return slots_[index].counter.snapshot();
  }

  void wait_for_change(std::size_t index, std::uint32_t observed,
                       const WaitStrategy& strategy) noexcept {
    slots_[index].counter.wait_for_change(observed, strategy);
  }

 private:
  unsigned log2_slots_;
  std::unique_ptr<WaitSlot[]> slots_;
};

}  // namespace twa
