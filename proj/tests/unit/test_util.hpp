#pragma once

#include <chrono>
#include <thread>

namespace twa::testing {

using namespace std::chrono_literals;

/// Polls `pred` until it holds or `timeout` passes.
template <typename Pred>
bool eventually(Pred pred, std::chrono::milliseconds timeout = 10s) {
  const auto deadline = std::chrono::steady_clock::now() + timeout;
  while (!pred()) {
    if (std::chrono::steady_clock::now() > deadline) return false;
    std::this_thread::yield();
  }
  return true;
}

/// Holds for the whole of `window` (a negative probe: "still blocked").
template <typename Pred>
bool stays(Pred pred, std::chrono::milliseconds window = 100ms) {
  const auto deadline = std::chrono::steady_clock::now() + window;
  while (std::chrono::steady_clock::now() < deadline) {
    if (!pred()) return false;
    std::this_thread::yield();
  }
  return true;
}

}  // namespace twa::testing
