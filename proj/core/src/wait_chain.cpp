#include "twa/wait_chain.hpp"

#include <thread>

namespace twa {

WaitElement* unlinked_sentinel() noexcept {
  // Address only; never dereferenced.
  alignas(WaitElement) static unsigned char marker;
  return reinterpret_cast<WaitElement*>(&marker);
}

WaitElement* DetachedChain::resolve_next(const WaitElement& e) noexcept {
  WaitElement* next = e.next.load();
  // The pusher is between its exchange and its link store: two instructions.
  for (std::uint32_t i = 0; next == unlinked_sentinel(); ++i) {
    spin_relax(i);
    next = e.next.load();
  }
  return next;
}

std::size_t DetachedChain::wake_all(std::uint64_t sem_identity, std::uint64_t grant,
                                    const WaitElement* self) noexcept {
  return consume([&](WaitElement& e) {
    Parker* waiter = e.waiter;
    const bool unpark = waiter != nullptr && &e != self;
    e.payload_sem = sem_identity;
    e.payload_grant = grant;
    e.gate.store(WaitElement::kReleased);
    // `e` may be gone from here on.
    if (unpark) waiter->unpark();
  });
}

void await_gate(const WaitElement& element, const WaitStrategy& strategy) noexcept {
  switch (strategy.kind) {
    case WaitKind::PauseSpin:
      for (std::uint32_t i = 0; !element.released(); ++i) spin_relax(i);
      return;
    case WaitKind::YieldSpin:
      while (!element.released()) std::this_thread::yield();
      return;
    case WaitKind::SpinThenPark:
      for (std::uint32_t i = 0; i < strategy.spin_bound; ++i) {
        if (element.released()) return;
        polite_pause();
      }
      [[fallthrough]];
    case WaitKind::AddressWait:
      while (!element.released()) element.waiter->park();
      return;
  }
}

}  // namespace twa
