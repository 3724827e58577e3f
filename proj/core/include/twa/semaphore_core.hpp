#pragma once

#include <atomic>
#include <cstdint>

#include "twa/cacheline.hpp"
#include "twa/wait_strategy.hpp"

namespace twa {

/// The ticket/grant counter pair behind both semaphore algorithms.
///
/// Arrivals draw tickets with fetch-and-add; posts advance grant with an
/// atomic increment. The holder of ticket t is admitted once grant > t, which
/// yields first-come-first-enabled admission. Both counters are 64-bit and
/// never wrap in practice (over a century at one increment per nanosecond).
///
/// All accesses are sequentially consistent.
class SemaphoreCore {
 public:
  /// Compare-and-swap attempts before try_claim() reports would-block.
  static constexpr int kTryRetries = 16;

  explicit SemaphoreCore(std::uint64_t initial = 0) noexcept { grant_.value.store(initial); }

  SemaphoreCore(const SemaphoreCore&) = delete;
  SemaphoreCore& operator=(const SemaphoreCore&) = delete;

  /// Draws the next ticket.
  std::uint64_t arrive() noexcept { return ticket_.value.fetch_add(1); }

  /// Enables one more admission and returns the new grant value.
  std::uint64_t advance_grant() noexcept { return grant_.value.fetch_add(1) + 1; }

  /// Claims a ticket only if it would be admitted immediately. May fail
  /// spuriously when the CAS keeps losing to concurrent arrivals.
  bool try_claim() noexcept {
    for (int attempt = 0; attempt < kTryRetries; ++attempt) {
      std::uint64_t t = ticket_.value.load();
      if (grant_.value.load() <= t) return false;
      if (ticket_.value.compare_exchange_strong(t, t + 1)) return true;
    }
    return false;
  }

  std::uint64_t ticket() const noexcept { return ticket_.value.load(); }
  std::uint64_t grant() const noexcept { return grant_.value.load(); }

 private:
  Padded<std::atomic<std::uint64_t>> ticket_;
  Padded<std::atomic<std::uint64_t>> grant_;
};

/// Ticket-Semaphore: every waiter watches grant directly.
///
/// Spinning strategies poll grant. Blocking strategies sleep on a
/// notification word sitting next to grant, and every post wakes all of them
/// to re-check (there is only the one global waiting location).
class TicketSemaphore {
 public:
  explicit TicketSemaphore(std::uint64_t initial = 0, WaitStrategy strategy = {}) noexcept
      : core_(initial), strategy_(strategy) {}

  /// Blocks until admitted and returns the ticket that was admitted.
  std::uint64_t take() noexcept;
  void post() noexcept;
  void post(std::uint64_t n) noexcept {
    while (n-- > 0) post();
  }
  bool try_take() noexcept { return core_.try_claim(); }

  const SemaphoreCore& core() const noexcept { return core_; }
  const WaitStrategy& strategy() const noexcept { return strategy_; }

 private:
  SemaphoreCore core_;
  Padded<NotifyWord> wakeup_;
  WaitStrategy strategy_;
};

}  // namespace twa
