#include "twa/wait_strategy.hpp"

#include <thread>

#if defined(__linux__)
#include <linux/futex.h>
#include <sched.h>
#include <sys/syscall.h>
#include <unistd.h>
#endif

namespace twa {

std::optional<WaitKind> parse_wait_kind(std::string_view name) noexcept {
  if (name == "pause") return WaitKind::PauseSpin;
  if (name == "yield") return WaitKind::YieldSpin;
  if (name == "addr") return WaitKind::AddressWait;
  if (name == "spinpark") return WaitKind::SpinThenPark;
  return std::nullopt;
}

std::string_view to_string(WaitKind kind) noexcept {
  switch (kind) {
    case WaitKind::PauseSpin: return "pause";
    case WaitKind::YieldSpin: return "yield";
    case WaitKind::AddressWait: return "addr";
    case WaitKind::SpinThenPark: return "spinpark";
  }
  return "?";
}

unsigned online_cpus() noexcept {
  static const unsigned cpus = [] {
#if defined(__linux__)
    cpu_set_t set;
    CPU_ZERO(&set);
    if (sched_getaffinity(0, sizeof(set), &set) == 0) {
      const int n = CPU_COUNT(&set);
      if (n > 0) return static_cast<unsigned>(n);
    }
#endif
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1u : n;
  }();
  return cpus;
}

void spin_relax(std::uint32_t iteration) noexcept {
  static const bool uniprocessor = online_cpus() == 1;
  polite_pause();
  if (uniprocessor || (iteration & 4095u) == 4095u) std::this_thread::yield();
}

#if defined(__linux__)

void address_wait(const std::atomic<std::uint32_t>& word, std::uint32_t expected) noexcept {
  // EAGAIN (value differs), EINTR and spurious returns all mean "re-check".
  ::syscall(SYS_futex, static_cast<const void*>(&word), FUTEX_WAIT_PRIVATE, expected,
            nullptr, nullptr, 0);
}

void address_wake_all(std::atomic<std::uint32_t>& word) noexcept {
  ::syscall(SYS_futex, static_cast<void*>(&word), FUTEX_WAKE_PRIVATE, INT32_MAX, nullptr,
            nullptr, 0);
}

#else

void address_wait(const std::atomic<std::uint32_t>& word, std::uint32_t expected) noexcept {
  word.wait(expected);
}

void address_wake_all(std::atomic<std::uint32_t>& word) noexcept { word.notify_all(); }

#endif

void NotifyWord::notify() noexcept {
  seq_.fetch_add(1);
  if (waiters_.load() != 0) address_wake_all(seq_);
}

void NotifyWord::block(std::uint32_t observed) noexcept {
  waiters_.fetch_add(1);
  if (seq_.load() == observed) address_wait(seq_, observed);
  waiters_.fetch_sub(1);
}

void NotifyWord::wait_for_change(std::uint32_t observed, const WaitStrategy& strategy) noexcept {
  switch (strategy.kind) {
    case WaitKind::PauseSpin:
      for (std::uint32_t i = 0; seq_.load() == observed; ++i) spin_relax(i);
      return;
    case WaitKind::YieldSpin:
      while (seq_.load() == observed) std::this_thread::yield();
      return;
    case WaitKind::AddressWait:
      block(observed);
      return;
    case WaitKind::SpinThenPark:
      for (std::uint32_t i = 0; i < strategy.spin_bound; ++i) {
        if (seq_.load() != observed) return;
        polite_pause();
      }
      block(observed);
      return;
  }
}

}  // namespace twa
