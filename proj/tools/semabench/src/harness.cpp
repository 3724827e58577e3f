#include "semabench/harness.hpp"

#include <condition_variable>
#include <memory>
#include <mutex>
#include <thread>
#include <vector>

#if defined(__linux__)
#include <pthread.h>
#include <sched.h>
#endif


namespace semabench {

namespace {

struct Completion {
  std::mutex mutex;
  std::condition_variable cv;
  std::size_t finished = 0;
};

}  // namespace

bool run_with_deadline(std::size_t n, std::chrono::milliseconds timeout,
                       const std::function<void(std::size_t)>& body) {
  auto completion = std::make_shared<Completion>();
  std::vector<std::thread> threads;
  threads.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    threads.emplace_back([completion, body, i] {
      body(i);
      std::lock_guard lock(completion->mutex);
      ++completion->finished;
      completion->cv.notify_all();
    });
  }

  bool all_done;
  {
    std::unique_lock lock(completion->mutex);
    all_done = completion->cv.wait_for(lock, timeout, [&] { return completion->finished == n; });
  }
  for (auto& t : threads) {
    if (all_done)
      t.join();
    else
      t.detach();
  }
  return all_done;
}

void pin_current_thread(std::size_t cpu) noexcept {
#if defined(__linux__)
  cpu_set_t allowed;
  CPU_ZERO(&allowed);
  if (sched_getaffinity(0, sizeof(allowed), &allowed) != 0) return;
  const int count = CPU_COUNT(&allowed);
  if (count <= 0) return;
  std::size_t target = cpu % static_cast<std::size_t>(count);
  for (int c = 0; c < CPU_SETSIZE; ++c) {
    if (!CPU_ISSET(c, &allowed)) continue;
    if (target-- == 0) {
      cpu_set_t one;
      CPU_ZERO(&one);
      CPU_SET(c, &one);
      pthread_setaffinity_np(pthread_self(), sizeof(one), &one);
      return;
    }
  }
#else
  (void)cpu;
#endif
}

}  // namespace semabench
