#include <gtest/gtest.h>

#include <array>
#include <atomic>
#include <chrono>
#include <thread>
#include <vector>

#include "test_util.hpp"
#include "twa/cacheline.hpp"
#include "twa/parker.hpp"
#include "twa/wait_strategy.hpp"

namespace twa {
namespace {

using namespace std::chrono_literals;
using testing::eventually;
using testing::stays;

TEST(WaitKindNames, RoundTrip) {
  for (WaitKind k : {WaitKind::PauseSpin, WaitKind::YieldSpin, WaitKind::AddressWait,
                     WaitKind::SpinThenPark})
    EXPECT_EQ(parse_wait_kind(to_string(k)), k);
  EXPECT_EQ(parse_wait_kind("addr"), WaitKind::AddressWait);
  EXPECT_EQ(parse_wait_kind("spinpark"), WaitKind::SpinThenPark);
  EXPECT_FALSE(parse_wait_kind("mwait").has_value());
}

TEST(WaitStrategy, Defaults) {
  WaitStrategy s;
  EXPECT_EQ(s.spin_bound, 1000u);
#if defined(__linux__)
  EXPECT_EQ(s.kind, WaitKind::AddressWait);
#endif
  EXPECT_FALSE(WaitStrategy::pause().may_block());
  EXPECT_FALSE(WaitStrategy::yield().may_block());
  EXPECT_TRUE(WaitStrategy::address().may_block());
  EXPECT_TRUE(WaitStrategy::spin_then_park().may_block());
}

TEST(PolitePause, MillionCallsComplete) {
  for (int i = 0; i < 1'000'000; ++i) polite_pause();
  SUCCEED();
}

// Handover ping-pong between two threads, with and without the spin hint in
// the wait loop. The hinted loop should not be drastically slower.
std::chrono::nanoseconds handover_time(bool polite, int rounds) {
  alignas(kSectorSize) std::atomic<int> turn{0};
  const auto start = std::chrono::steady_clock::now();
  std::thread other([&] {
    for (int r = 0; r < rounds; ++r) {
      for (std::uint32_t i = 0; turn.load() != 1; ++i) {
        if (polite) spin_relax(i);
        else if ((i & 0xfff) == 0xfff) std::this_thread::yield();
      }
      turn.store(0);
    }
  });
  for (int r = 0; r < rounds; ++r) {
    turn.store(1);
    for (std::uint32_t i = 0; turn.load() != 0; ++i) {
      if (polite) spin_relax(i);
      else if ((i & 0xfff) == 0xfff) std::this_thread::yield();
    }
  }
  other.join();
  return std::chrono::steady_clock::now() - start;
}

TEST(PolitePause, HandoverNotMuchSlowerThanBareSpin) {
  constexpr int kRounds = 20000;
  const auto bare = handover_time(false, kRounds);
  const auto polite = handover_time(true, kRounds);
  RecordProperty("bare_ns", std::to_string(bare.count()));
  RecordProperty("polite_ns", std::to_string(polite.count()));
  EXPECT_LE(polite.count(), 2 * bare.count() + 50'000'000);
}

TEST(AddressWait, ReturnsAtOnceWhenValueDiffers) {
  std::atomic<std::uint32_t> word{5};
  address_wait(word, 4);
  SUCCEED();
}

TEST(AddressWait, WakeAfterStore) {
  std::atomic<std::uint32_t> word{5};
  std::atomic<bool> done{false};
  std::thread waiter([&] {
    while (word.load() == 5) address_wait(word, 5);
    done = true;
  });
  EXPECT_TRUE(stays([&] { return !done.load(); }, 30ms));
  word.store(6);
  address_wake_all(word);
  waiter.join();
  EXPECT_TRUE(done);
}

TEST(AddressWait, WakeWithoutWaitersIsNoop) {
  std::atomic<std::uint32_t> word{0};
  address_wake_all(word);
  SUCCEED();
}

TEST(AddressWait, WakeAllReleasesEveryWaiter) {
  alignas(kSectorSize) NotifyWord word;
  std::atomic<int> woke{0};
  std::vector<std::thread> waiters;
  const std::uint32_t seen = word.snapshot();
  for (int i = 0; i < 3; ++i)
    waiters.emplace_back([&] {
      while (word.snapshot() == seen) word.wait_for_change(seen, WaitStrategy::address());
      woke.fetch_add(1);
    });
  ASSERT_TRUE(eventually([&] { return word.blocked_waiters() == 3; }));
  word.notify();
  for (auto& w : waiters) w.join();
  EXPECT_EQ(woke.load(), 3);
}

// Waiters on 64 separate words; waking one word releases exactly its waiter.
TEST(AddressWait, TargetedWakesReleaseOnlyTheirAddress) {
  constexpr int kWords = 64;
  std::array<Padded<NotifyWord>, kWords> words;
  std::array<std::atomic<bool>, kWords> released{};
  std::vector<std::thread> waiters;
  for (int i = 0; i < kWords; ++i)
    waiters.emplace_back([&, i] {
      NotifyWord& w = words[i].value;
      while (w.snapshot() == 0) w.wait_for_change(0, WaitStrategy::address());
      released[i] = true;
    });
  for (int i = 0; i < kWords; ++i)
    ASSERT_TRUE(eventually([&] { return words[i].value.blocked_waiters() == 1; }));

  for (int i = 0; i < kWords; ++i) {
    words[i].value.notify();
    ASSERT_TRUE(eventually([&] { return released[i].load(); }));
    if (i % 16 == 0 && i + 1 < kWords) {
      EXPECT_TRUE(stays([&] { return !released[i + 1].load(); }, 20ms));
    }
    for (int j = i + 1; j < kWords; ++j) ASSERT_FALSE(released[j]) << "word " << j;
  }
  for (auto& w : waiters) w.join();
}

TEST(Parker, UnparkBeforeParkIsConsumed) {
  Parker& self = Parker::current();
  self.unpark();
  self.park();  // returns at once
  SUCCEED();
}

TEST(Parker, ParkThenUnpark) {
  std::atomic<Parker*> target{nullptr};
  std::atomic<bool> resumed{false};
  std::thread t([&] {
    target = &Parker::current();
    target.load()->park();
    resumed = true;
  });
  ASSERT_TRUE(eventually([&] { return target.load() != nullptr; }));
  EXPECT_TRUE(stays([&] { return !resumed.load(); }, 30ms));
  target.load()->unpark();
  t.join();
  EXPECT_TRUE(resumed);
}

TEST(Parker, PermitIsBinary) {
  std::atomic<Parker*> target{nullptr};
  std::atomic<int> parks_returned{0};
  std::atomic<bool> go{false};
  std::thread t([&] {
    target = &Parker::current();
    while (!go) std::this_thread::yield();
    target.load()->park();
    parks_returned = 1;
    target.load()->park();
    parks_returned = 2;
  });
  ASSERT_TRUE(eventually([&] { return target.load() != nullptr; }));
  target.load()->unpark();
  target.load()->unpark();
  go = true;
  ASSERT_TRUE(eventually([&] { return parks_returned.load() == 1; }));
  EXPECT_TRUE(stays([&] { return parks_returned.load() == 1; }, 100ms));
  target.load()->unpark();
  t.join();
  EXPECT_EQ(parks_returned.load(), 2);
}

TEST(Parker, DistinctPerThreadAndStable) {
  Parker* mine = &Parker::current();
  EXPECT_EQ(mine, &Parker::current());
  Parker* theirs = nullptr;
  std::thread([&] { theirs = &Parker::current(); }).join();
  EXPECT_NE(mine, theirs);
}

// Oversubscribed notify/wait loop across all strategies: no waiter is ever
// left behind once the notifier stops.
TEST(NotifyWord, NoLostWakeupsUnderOversubscription) {
  for (WaitKind kind : {WaitKind::PauseSpin, WaitKind::YieldSpin, WaitKind::AddressWait,
                        WaitKind::SpinThenPark}) {
    alignas(kSectorSize) NotifyWord word;
    std::atomic<std::uint64_t> level{0};
    constexpr std::uint64_t kTarget = 2000;
    const unsigned waiters_n = 2 * online_cpus() + 2;
    std::vector<std::thread> waiters;
    for (unsigned w = 0; w < waiters_n; ++w)
      waiters.emplace_back([&] {
        for (;;) {
          const std::uint32_t seen = word.snapshot();
          if (level.load() >= kTarget) return;
          word.wait_for_change(seen, {kind});
        }
      });
    for (std::uint64_t i = 0; i < kTarget; ++i) {
      level.fetch_add(1);
      word.notify();
      if (i % 64 == 0) std::this_thread::yield();
    }
    for (auto& w : waiters) w.join();
    SUCCEED() << to_string(kind);
  }
}

}  // namespace
}  // namespace twa
