#pragma once

#include <chrono>
#include <cstddef>
#include <functional>

namespace semabench {

/// Runs body(0..n-1) on n fresh threads and waits up to `timeout` for all of
/// them. Returns true if every thread finished (and was joined). On timeout
/// the threads are detached and left running, so `body` must own, by value,
/// everything it touches (shared_ptr captures).
bool run_with_deadline(std::size_t n, std::chrono::milliseconds timeout,
                       const std::function<void(std::size_t)>& body);

/// Pins the calling thread to `cpu` modulo the CPUs available. Best effort.
void pin_current_thread(std::size_t cpu) noexcept;

}  // namespace semabench
