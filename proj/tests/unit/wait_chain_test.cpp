#include <gtest/gtest.h>

#include <atomic>
#include <barrier>
#include <memory>
#include <thread>
#include <vector>

#include "test_util.hpp"
#include "twa/wait_chain.hpp"

namespace twa {
namespace {

using testing::eventually;

std::vector<WaitElement*> drain(ChainHead& head) {
  std::vector<WaitElement*> out;
  chain_detach_all(head).consume([&](WaitElement& e) { out.push_back(&e); });
  return out;
}

TEST(WaitChain, FreshElementIsUnlinkedAndWaiting) {
  WaitElement e;
  EXPECT_EQ(e.next.load(), unlinked_sentinel());
  EXPECT_FALSE(e.released());
  EXPECT_EQ(e.waiter, nullptr);
}

TEST(WaitChain, PushOntoEmpty) {
  ChainHead head{nullptr};
  WaitElement e;
  chain_push(head, e);
  EXPECT_EQ(head.load(), &e);
  EXPECT_EQ(e.next.load(), nullptr);
  EXPECT_EQ(drain(head), std::vector<WaitElement*>{&e});
  EXPECT_EQ(head.load(), nullptr);
}

TEST(WaitChain, DetachIsLifo) {
  ChainHead head{nullptr};
  WaitElement a, b;
  chain_push(head, a);
  chain_push(head, b);
  EXPECT_EQ(drain(head), (std::vector<WaitElement*>{&b, &a}));
}

TEST(WaitChain, DetachEmpty) {
  ChainHead head{nullptr};
  auto chain = chain_detach_all(head);
  EXPECT_TRUE(chain.empty());
  EXPECT_EQ(chain.wake_all(1, 1), 0u);
}

TEST(WaitChain, WakeAllReleasesAndCarriesPayload) {
  ChainHead head{nullptr};
  WaitElement a, b, c;
  for (WaitElement* e : {&a, &b, &c}) chain_push(head, *e);
  EXPECT_EQ(chain_detach_all(head).wake_all(0x5e3, 42), 3u);
  for (WaitElement* e : {&a, &b, &c}) {
    EXPECT_TRUE(e->released());
    EXPECT_EQ(e->payload_sem, 0x5e3u);
    EXPECT_EQ(e->payload_grant, 42u);
  }
}

TEST(WaitChain, WakeAllUnparksBlockedWaiters) {
  ChainHead head{nullptr};
  constexpr int kWaiters = 3;
  std::atomic<int> pushed{0}, woke{0};
  std::vector<std::thread> waiters;
  for (int i = 0; i < kWaiters; ++i)
    waiters.emplace_back([&] {
      WaitElement self(&Parker::current());
      chain_push(head, self);
      pushed.fetch_add(1);
      await_gate(self, WaitStrategy::address());
      woke.fetch_add(1);
    });
  ASSERT_TRUE(eventually([&] { return pushed.load() == kWaiters; }));
  EXPECT_EQ(chain_detach_all(head).wake_all(1, 2), static_cast<std::size_t>(kWaiters));
  for (auto& w : waiters) w.join();
  EXPECT_EQ(woke.load(), kWaiters);
}

TEST(WaitChain, AwaitGateAllKinds) {
  for (WaitKind kind : {WaitKind::PauseSpin, WaitKind::YieldSpin, WaitKind::AddressWait,
                        WaitKind::SpinThenPark}) {
    const WaitStrategy strategy{kind};
    ChainHead head{nullptr};
    std::atomic<bool> pushed{false};
    std::thread waiter([&] {
      WaitElement self(strategy.may_block() ? &Parker::current() : nullptr);
      chain_push(head, self);
      pushed = true;
      await_gate(self, strategy);
    });
    ASSERT_TRUE(eventually([&] { return pushed.load(); }));
    chain_detach_all(head).wake_all(0, 0);
    waiter.join();
  }
}

// Pushers and detachers run concurrently; a side log of what each pusher
// pushed is compared against everything collected.
TEST(WaitChain, ConcurrentPushDetachConservesElements) {
  constexpr std::size_t kPushers = 4, kEach = 10000;
  ChainHead head{nullptr};
  std::vector<std::unique_ptr<WaitElement[]>> pools;
  for (std::size_t p = 0; p < kPushers; ++p) pools.push_back(std::make_unique<WaitElement[]>(kEach));
  std::vector<std::atomic<int>> seen(kPushers * kEach);
  std::atomic<std::size_t> pushers_left{kPushers};

  auto record = [&](WaitElement& e) {
    for (std::size_t p = 0; p < kPushers; ++p) {
      if (&e >= pools[p].get() && &e < pools[p].get() + kEach) {
        seen[p * kEach + static_cast<std::size_t>(&e - pools[p].get())].fetch_add(1);
        return;
      }
    }
    ADD_FAILURE() << "collected an element nobody pushed";
  };

  std::vector<std::thread> threads;
  for (std::size_t p = 0; p < kPushers; ++p)
    threads.emplace_back([&, p] {
      for (std::size_t n = 0; n < kEach; ++n) {
        chain_push(head, pools[p][n]);
        if (n % 128 == 0) std::this_thread::yield();
      }
      pushers_left.fetch_sub(1);
    });
  for (int d = 0; d < 2; ++d)
    threads.emplace_back([&] {
      while (pushers_left.load() != 0) {
        chain_detach_all(head).consume(record);
        std::this_thread::yield();
      }
    });
  for (auto& t : threads) t.join();
  chain_detach_all(head).consume(record);

  std::size_t total = 0;
  for (auto& s : seen) {
    ASSERT_EQ(s.load(), 1);
    total += 1;
  }
  EXPECT_EQ(total, kPushers * kEach);
}

// A detach that lands between a push's exchange and its link store must wait
// for the link and then collect everything below it.
TEST(WaitChain, DetachInsidePushWindowWaitsForLink) {
  for (int trial = 0; trial < 200; ++trial) {
    ChainHead head{nullptr};
    WaitElement resident, racer;
    chain_push(head, resident);

    WaitElement* old = head.exchange(&racer);  // first half of a push
    std::vector<WaitElement*> got;
    std::atomic<bool> detached{false};
    std::thread detacher([&] {
      auto chain = chain_detach_all(head);
      detached = true;
      chain.consume([&](WaitElement& e) { got.push_back(&e); });
    });
    ASSERT_TRUE(eventually([&] { return detached.load(); }));
    racer.next.store(old);  // second half
    detacher.join();
    ASSERT_EQ(got, (std::vector<WaitElement*>{&racer, &resident}));
    ASSERT_EQ(head.load(), nullptr);
  }
}

TEST(WaitChain, DetachBeforePushLeavesElementForNextDetach) {
  ChainHead head{nullptr};
  WaitElement e;
  EXPECT_TRUE(drain(head).empty());
  chain_push(head, e);
  EXPECT_EQ(drain(head), std::vector<WaitElement*>{&e});
}

}  // namespace
}  // namespace twa
