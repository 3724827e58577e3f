#include "twa/parker.hpp"

#include <mutex>

#include "twa/wait_strategy.hpp"

namespace twa {

class ParkerPool {
 public:
  static ParkerPool& instance() {
    static auto* pool = new ParkerPool;  // immortal, outlives thread_local holders
    return *pool;
  }

  Parker* acquire() {
    std::lock_guard lock(mutex_);
    if (free_ == nullptr) return new Parker;
    Parker* p = free_;
    free_ = p->next_free_;
    p->next_free_ = nullptr;
    return p;
  }

  void release(Parker* p) {
    std::lock_guard lock(mutex_);
    p->next_free_ = free_;
    free_ = p;
  }

 private:
  std::mutex mutex_;
  Parker* free_ = nullptr;
};

namespace {

struct ParkerHolder {
  Parker* parker = ParkerPool::instance().acquire();
  ~ParkerHolder() { ParkerPool::instance().release(parker); }
};

}  // namespace

Parker& Parker::current() {
  thread_local ParkerHolder holder;
  return *holder.parker;
}

void Parker::park() noexcept {
  // kNotified -> kEmpty consumes a pending permit; kEmpty -> kParked blocks.
  if (state_.fetch_sub(1) == kNotified) return;
  for (;;) {
    address_wait(state_, kParked);
    std::uint32_t expected = kNotified;
    if (state_.compare_exchange_strong(expected, kEmpty)) return;
  }
}

void Parker::unpark() noexcept {
  if (state_.exchange(kNotified) == kParked) address_wake_all(state_);
}

}  // namespace twa
