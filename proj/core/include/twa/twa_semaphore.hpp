#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "twa/semaphore_core.hpp"
#include "twa/spin_gauge.hpp"
#include "twa/wait_strategy.hpp"
#include "twa/waiting_array.hpp"

namespace twa {

enum class SlotVariant : std::uint8_t {
  Counter,  // slots hold a notification counter
  Chain,    // slots hold a stack of waiting elements
};

std::optional<SlotVariant> parse_slot_variant(std::string_view name) noexcept;
std::string_view to_string(SlotVariant variant) noexcept;

struct TwaOptions {
  std::uint64_t initial = 0;
  /// Waiters at most this far behind grant spin on it; the rest wait on the
  /// array. 0 sends every waiter to the array.
  std::uint64_t threshold = 1;
  SlotVariant variant = SlotVariant::Counter;
  WaitStrategy strategy{};
  /// Null selects WaitingArray::shared().
  WaitingArray* array = nullptr;
  /// Conformance instrumentation; null in normal use.
  SpinGauge* gauge = nullptr;
};

/// TWA-Semaphore: a ticket semaphore whose waiters spin on grant only when
/// they are within `threshold` of it, and otherwise wait semi-locally on a
/// slot of the waiting array chosen by hashing (identity, ticket).
///
/// A post advances grant and then nudges the slot of the ticket that has just
/// come within the threshold, so the successor's successor is staged while the
/// successor itself runs. Admission order is identical to TicketSemaphore for
/// every variant, strategy, and threshold.
class TwaSemaphore {
 public:
  explicit TwaSemaphore(const TwaOptions& options = {}) noexcept;

  TwaSemaphore(const TwaSemaphore&) = delete;
  TwaSemaphore& operator=(const TwaSemaphore&) = delete;

  /// Blocks until admitted and returns the ticket that was admitted.
  std::uint64_t take() noexcept;
  void post() noexcept;
  /// n single posts, each with its own notification.
  void post(std::uint64_t n) noexcept {
    while (n-- > 0) post();
  }
  bool try_take() noexcept { return core_.try_claim(); }

  /// Stable and unique for the object's lifetime: its address.
  std::uint64_t identity() const noexcept { return reinterpret_cast<std::uintptr_t>(this); }

  const SemaphoreCore& core() const noexcept { return core_; }
  std::uint64_t threshold() const noexcept { return threshold_; }
  SlotVariant variant() const noexcept { return variant_; }
  const WaitStrategy& strategy() const noexcept { return strategy_; }
  WaitingArray& array() const noexcept { return *array_; }

  /// The ticket whose slot a post raising grant to `grant` notifies.
  std::uint64_t notify_target(std::uint64_t grant) const noexcept {
    return grant + threshold_ - 1;
  }

 private:
  bool short_term(std::uint64_t ticket, std::uint64_t grant) const noexcept {
    return ticket - grant < threshold_;
  }
  void spin_on_grant(std::uint64_t ticket) noexcept;
  // Both return true when the wait itself proved admission.
  bool wait_on_counter(std::uint64_t ticket) noexcept;
  bool wait_on_chain(std::uint64_t ticket) noexcept;

  SemaphoreCore core_;
  WaitingArray* array_;
  SpinGauge* gauge_;
  std::uint64_t threshold_;
  WaitStrategy strategy_;
  SlotVariant variant_;
};

}  // namespace twa
