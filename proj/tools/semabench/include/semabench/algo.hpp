#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>

#include <twa/semaphore_core.hpp>
#include <twa/spin_gauge.hpp>
#include <twa/twa_semaphore.hpp>
#include <twa/waiting_array.hpp>

#if defined(__unix__) || defined(__APPLE__)
#include <semaphore.h>
#endif

namespace semabench {

enum class Algo : std::uint8_t { Ticket, TwaCounter, TwaChain, OsBaseline };

std::optional<Algo> parse_algo(std::string_view name) noexcept;
std::string_view to_string(Algo algo) noexcept;

/// Whether the algorithm hands out tickets (everything but the OS baseline).
constexpr bool has_tickets(Algo algo) noexcept { return algo != Algo::OsBaseline; }
constexpr bool is_twa(Algo algo) noexcept {
  return algo == Algo::TwaCounter || algo == Algo::TwaChain;
}
bool algo_supported(Algo algo) noexcept;

/// Everything needed to construct one semaphore of any algorithm.
struct SemaphoreSpec {
  Algo algo = Algo::Ticket;
  std::uint64_t initial = 0;
  std::uint64_t threshold = 1;
  twa::WaitStrategy strategy{};
  std::shared_ptr<twa::WaitingArray> array;  // null: the shared array
  twa::SpinGauge* gauge = nullptr;
};

/// The platform counting semaphore (POSIX sem_t), for reference curves.
class OsSemaphore {
 public:
  explicit OsSemaphore(std::uint64_t initial);
  ~OsSemaphore();
  OsSemaphore(const OsSemaphore&) = delete;
  OsSemaphore& operator=(const OsSemaphore&) = delete;

  /// No tickets; always returns 0.
  std::uint64_t take() noexcept;
  void post() noexcept;
  bool try_take() noexcept;

 private:
#if defined(__unix__) || defined(__APPLE__)
  sem_t sem_;
#endif
};

/// Constructs the semaphore `spec` describes and passes a shared_ptr to it
/// to `fn`. Shared ownership lets threads that outlive a timed-out check keep
/// the object alive.
template <typename Fn>
decltype(auto) with_semaphore(const SemaphoreSpec& spec, Fn&& fn) {
  switch (spec.algo) {
    case Algo::TwaCounter:
    case Algo::TwaChain: {
      twa::TwaOptions options;
      options.initial = spec.initial;
      options.threshold = spec.threshold;
      options.variant =
          spec.algo == Algo::TwaChain ? twa::SlotVariant::Chain : twa::SlotVariant::Counter;
      options.strategy = spec.strategy;
      options.array = spec.array.get();
      options.gauge = spec.gauge;
      return fn(std::make_shared<twa::TwaSemaphore>(options));
    }
    case Algo::OsBaseline:
      return fn(std::make_shared<OsSemaphore>(spec.initial));
    case Algo::Ticket:
      break;
  }
  return fn(std::make_shared<twa::TicketSemaphore>(spec.initial, spec.strategy));
}

}  // namespace semabench
