#include "twa/twa_semaphore.hpp"

namespace twa {

std::optional<SlotVariant> parse_slot_variant(std::string_view name) noexcept {
  if (name == "counter") return SlotVariant::Counter;
  if (name == "chain") return SlotVariant::Chain;
  return std::nullopt;
}

std::string_view to_string(SlotVariant variant) noexcept {
  return variant == SlotVariant::Counter ? "counter" : "chain";
}

TwaSemaphore::TwaSemaphore(const TwaOptions& options) noexcept
    : core_(options.initial),
      array_(options.array != nullptr ? options.array : &WaitingArray::shared()),
      gauge_(options.gauge),
      threshold_(options.threshold),
      strategy_(options.strategy),
      variant_(options.variant) {}

std::uint64_t TwaSemaphore::take() noexcept {
  const std::uint64_t t = core_.arrive();
  for (;;) {
    const std::uint64_t g = core_.grant();
    if (g > t) return t;
    if (short_term(t, g)) {
      spin_on_grant(t);
      return t;
    }
    const bool admitted =
        variant_ == SlotVariant::Counter ? wait_on_counter(t) : wait_on_chain(t);
    if (admitted) return t;
  }
}

void TwaSemaphore::post() noexcept {
  const std::uint64_t g = core_.advance_grant();
#if defined(TWA_FAULT_SUPPRESS_NOTIFY)
  (void)g;
#else
  const std::uint64_t target = notify_target(g);
  if (variant_ == SlotVariant::Counter) {
    array_->notify(identity(), target);
  } else {
    ChainHead& head = array_->slot(array_->index_of(identity(), target)).chain_head;
    if (head.load() != nullptr) chain_detach_all(head).wake_all(identity(), g);
  }
#endif
}

void TwaSemaphore::spin_on_grant(std::uint64_t ticket) noexcept {
  std::size_t handle = 0;
  if (gauge_ != nullptr) handle = gauge_->enter(ticket, [this] { return core_.grant(); });
  for (std::uint32_t i = 0; core_.grant() <= ticket; ++i) spin_relax(i);
  if (gauge_ != nullptr) gauge_->leave(handle);
}

bool TwaSemaphore::wait_on_counter(std::uint64_t ticket) noexcept {
  const std::size_t index = array_->index_of(identity(), ticket);
  const std::uint32_t seq = array_->snapshot(index);
  const std::uint64_t g = core_.grant();
  if (g > ticket || short_term(ticket, g)) return false;
  array_->wait_for_change(index, seq, strategy_);
  return false;
}

bool TwaSemaphore::wait_on_chain(std::uint64_t ticket) noexcept {
  ChainHead& head = array_->slot(array_->index_of(identity(), ticket)).chain_head;
  WaitElement self(strategy_.may_block() ? &Parker::current() : nullptr);
  chain_push(head, self);

  const std::uint64_t g = core_.grant();
  if (g > ticket || short_term(ticket, g)) {
    // The notification for this ticket may already have fired and missed the
    // element. Drain the slot ourselves so nothing is left stranded on it,
    // then wait until whoever holds our element has released it.
    chain_detach_all(head).wake_all(identity(), g, &self);
    await_gate(self, strategy_);
    return false;
  }

  await_gate(self, strategy_);
  return self.payload_sem == identity() && self.payload_grant > ticket;
}

}  // namespace twa
