#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <utility>

#include "twa/parker.hpp"
#include "twa/wait_strategy.hpp"

namespace twa {

/// One waiter's record for one waiting episode on a chain slot.
///
/// Lives in the waiter's own stack frame. The waiter may reclaim it as soon
/// as the gate reads released; until then it may still be reachable from a
/// chain or a detached chain.
struct WaitElement {
  static constexpr std::uint32_t kWaiting = 0;
  static constexpr std::uint32_t kReleased = 1;

  std::atomic<std::uint32_t> gate{kWaiting};
  Parker* waiter = nullptr;  // null: the waiter spins on the gate
  std::atomic<WaitElement*> next;
  std::uint64_t payload_sem = 0;
  std::uint64_t payload_grant = 0;

  WaitElement() noexcept;
  explicit WaitElement(Parker* w) noexcept : WaitElement() { waiter = w; }
  WaitElement(const WaitElement&) = delete;
  WaitElement& operator=(const WaitElement&) = delete;

  bool released() const noexcept { return gate.load() == kReleased; }
};

/// `next` value of an element pushed onto a chain whose old head has not been
/// stored yet. Exchange-push publishes the element before linking it, so a
/// traverser that sees this waits for the pusher to finish its second store.
WaitElement* unlinked_sentinel() noexcept;

inline WaitElement::WaitElement() noexcept : next(unlinked_sentinel()) {}

using ChainHead = std::atomic<WaitElement*>;

/// Pushes `element` with a single exchange. `element` must be unlinked and not
/// on any chain.
inline void chain_push(ChainHead& head, WaitElement& element) noexcept {
  WaitElement* old = head.exchange(&element);
  element.next.store(old);
}

/// A chain removed from its slot; owned by the thread that detached it.
class DetachedChain {
 public:
  DetachedChain() = default;
  explicit DetachedChain(WaitElement* head) noexcept : head_(head) {}

  DetachedChain(DetachedChain&& other) noexcept : head_(other.head_) { other.head_ = nullptr; }
  DetachedChain& operator=(DetachedChain&& other) noexcept {
    head_ = other.head_;
    other.head_ = nullptr;
    return *this;
  }
  DetachedChain(const DetachedChain&) = delete;
  DetachedChain& operator=(const DetachedChain&) = delete;

  bool empty() const noexcept { return head_ == nullptr; }

  /// Visits every element in LIFO push order and leaves the chain empty. The
  /// successor link is read before `fn` runs, so `fn` may hand the element
  /// back to its owner.
  template <typename Fn>
  std::size_t consume(Fn&& fn) {
    std::size_t n = 0;
    for (WaitElement* e = std::exchange(head_, nullptr); e != nullptr; ++n) {
      WaitElement* next = resolve_next(*e);
      fn(*e);
      e = next;
    }
    return n;
  }

  /// Stores the payload into each element, opens its gate, and unparks its
  /// waiter. `self` (the caller's own element, if on the chain) is released
  /// but not unparked. Returns the number of elements released.
  std::size_t wake_all(std::uint64_t sem_identity, std::uint64_t grant,
                       const WaitElement* self = nullptr) noexcept;

 private:
  static WaitElement* resolve_next(const WaitElement& e) noexcept;

  WaitElement* head_ = nullptr;
};

/// Swaps the chain out of its slot, leaving the slot empty.
inline DetachedChain chain_detach_all(ChainHead& head) noexcept {
  return DetachedChain(head.exchange(nullptr));
}

/// Waits until `element`'s gate is released: spins for the spinning kinds,
/// parks for the blocking kinds (SpinThenPark spins for its bound first).
void await_gate(const WaitElement& element, const WaitStrategy& strategy) noexcept;

}  // namespace twa
