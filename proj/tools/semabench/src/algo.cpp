#include "semabench/algo.hpp"

#include <cerrno>
#include <climits>
#include <stdexcept>

namespace semabench {

std::optional<Algo> parse_algo(std::string_view name) noexcept {
  if (name == "ticket") return Algo::Ticket;
  if (name == "twa-counter") return Algo::TwaCounter;
  if (name == "twa-chain") return Algo::TwaChain;
  if (name == "os-baseline") return Algo::OsBaseline;
  return std::nullopt;
}

std::string_view to_string(Algo algo) noexcept {
  switch (algo) {
    case Algo::Ticket: return "ticket";
    case Algo::TwaCounter: return "twa-counter";
    case Algo::TwaChain: return "twa-chain";
    case Algo::OsBaseline: return "os-baseline";
  }
  return "?";
}

#if defined(__linux__) || defined(__FreeBSD__)

bool algo_supported(Algo) noexcept { return true; }

OsSemaphore::OsSemaphore(std::uint64_t initial) {
  if (initial > SEM_VALUE_MAX || sem_init(&sem_, 0, static_cast<unsigned>(initial)) != 0)
    throw std::runtime_error("sem_init failed");
}

OsSemaphore::~OsSemaphore() { sem_destroy(&sem_); }

std::uint64_t OsSemaphore::take() noexcept {
  while (sem_wait(&sem_) != 0 && errno == EINTR) {
  }
  return 0;
}

void OsSemaphore::post() noexcept { sem_post(&sem_); }

bool OsSemaphore::try_take() noexcept { return sem_trywait(&sem_) == 0; }

#else

// Unnamed POSIX semaphores are unavailable (macOS) or absent altogether.
bool algo_supported(Algo algo) noexcept { return algo != Algo::OsBaseline; }

OsSemaphore::OsSemaphore(std::uint64_t) {
  throw std::runtime_error("os-baseline is unsupported on this platform");
}
OsSemaphore::~OsSemaphore() = default;
std::uint64_t OsSemaphore::take() noexcept { return 0; }
void OsSemaphore::post() noexcept {}
bool OsSemaphore::try_take() noexcept { return false; }

#endif

}  // namespace semabench
