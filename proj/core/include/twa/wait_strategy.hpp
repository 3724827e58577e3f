#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string_view>

namespace twa {

enum class WaitKind : std::uint8_t {
  PauseSpin,     // busy-wait with the CPU spin hint
  YieldSpin,     // busy-wait with sched_yield between polls
  AddressWait,   // block in the kernel on the watched word
  SpinThenPark,  // bounded polite spin, then block
};

/// How a thread waits for a condition that another thread will establish.
///
/// Every strategy is spurious-wakeup tolerant: callers re-check their
/// condition in a loop. The pure spinning kinds never deschedule the caller
/// other than through scheduler hints.
struct WaitStrategy {
  static constexpr std::uint32_t kDefaultSpinBound = 1000;

  WaitKind kind = default_kind();
  std::uint32_t spin_bound = kDefaultSpinBound;

  static constexpr WaitStrategy pause() noexcept { return {WaitKind::PauseSpin}; }
  static constexpr WaitStrategy yield() noexcept { return {WaitKind::YieldSpin}; }
  static constexpr WaitStrategy address() noexcept { return {WaitKind::AddressWait}; }
  static constexpr WaitStrategy spin_then_park(
      std::uint32_t bound = kDefaultSpinBound) noexcept {
    return {WaitKind::SpinThenPark, bound};
  }

  /// AddressWait where the OS offers address-based blocking, SpinThenPark
  /// otherwise.
  static constexpr WaitKind default_kind() noexcept {
#if defined(__linux__)
    return WaitKind::AddressWait;
#else
    return WaitKind::SpinThenPark;
#endif
  }

  constexpr bool may_block() const noexcept {
    return kind == WaitKind::AddressWait || kind == WaitKind::SpinThenPark;
  }

  friend constexpr bool operator==(const WaitStrategy&, const WaitStrategy&) = default;
};

/// CLI names: "pause", "yield", "addr", "spinpark".
std::optional<WaitKind> parse_wait_kind(std::string_view name) noexcept;
std::string_view to_string(WaitKind kind) noexcept;

/// Issues the platform spin hint (PAUSE, YIELD) or nothing.
inline void polite_pause() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#elif defined(__aarch64__) || defined(__arm__)
  asm volatile("yield" ::: "memory");
#endif
}

/// Logical CPUs this process may run on.
unsigned online_cpus() noexcept;

/// One step of a polite busy-wait loop. Pauses; on a uniprocessor, or once
/// every 4096 iterations, also hints the scheduler, since the thread that
/// would end the wait may be waiting for this CPU.
void spin_relax(std::uint32_t iteration) noexcept;

/// Blocks while `word` holds `expected`. Returns when the value may have
/// changed, including spuriously. Never blocks if the value already differs.
void address_wait(const std::atomic<std::uint32_t>& word, std::uint32_t expected) noexcept;

/// Makes every thread blocked in address_wait on `word` runnable.
void address_wake_all(std::atomic<std::uint32_t>& word) noexcept;

/// A wrapping notification counter paired with a count of blocked waiters.
///
/// Protocol: a waiter takes snapshot(), re-checks its condition, then calls
/// wait_for_change(snapshot). A notifier first establishes the condition and
/// then calls notify(). With sequentially consistent accesses on both sides
/// no notification can slip between the re-check and the block.
class NotifyWord {
 public:
  std::uint32_t snapshot() const noexcept { return seq_.load(); }

  /// Bumps the counter and wakes blocked waiters, if any.
  void notify() noexcept;

  /// Returns once the counter differs from `observed` or spuriously.
  void wait_for_change(std::uint32_t observed, const WaitStrategy& strategy) noexcept;

  std::uint32_t blocked_waiters() const noexcept { return waiters_.load(); }

 private:
  void block(std::uint32_t observed) noexcept;

  std::atomic<std::uint32_t> seq_{0};
  std::atomic<std::uint32_t> waiters_{0};
};

}  // namespace twa
