#include "twa/semaphore_core.hpp"

#include <thread>

namespace twa {

std::uint64_t TicketSemaphore::take() noexcept {
  const std::uint64_t t = core_.arrive();
  switch (strategy_.kind) {
    case WaitKind::PauseSpin:
      for (std::uint32_t i = 0; core_.grant() <= t; ++i) spin_relax(i);
      break;
    case WaitKind::YieldSpin:
      while (core_.grant() <= t) std::this_thread::yield();
      break;
    case WaitKind::AddressWait:
    case WaitKind::SpinThenPark:
      for (;;) {
        const std::uint32_t seq = wakeup_.value.snapshot();
        if (core_.grant() > t) break;
        wakeup_.value.wait_for_change(seq, strategy_);
      }
      break;
  }
  return t;
}

void TicketSemaphore::post() noexcept {
  core_.advance_grant();
  if (strategy_.may_block()) wakeup_.value.notify();
}

}  // namespace twa
