#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "semabench/algo.hpp"
#include "semabench/bench.hpp"

namespace semabench {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  std::chrono::milliseconds elapsed{0};
};

struct ConformanceReport {
  std::vector<CheckResult> checks;

  bool passed() const noexcept;
  void print(std::ostream& out) const;
};

/// One admission as seen from inside the protected region.
struct AdmissionRecord {
  std::uint64_t ticket_value = 0;
  std::uint64_t admit_order = 0;
};

/// True when ordering the records by ticket and by admit order gives the
/// same sequence. On failure `why` names the first divergence.
bool fife_holds(std::vector<AdmissionRecord> records, std::string* why = nullptr);

using std::chrono::milliseconds;

/// Producers post, consumers take, cyclers take then post; `total_ops` is
/// split evenly across `threads`. Every admission checks
/// takes_returned <= initial + posts_started, and a sampler thread checks the
/// same bound plus ticket/grant monotonicity while the workers run.
CheckResult check_conservation(const SemaphoreSpec& spec, std::size_t threads,
                               std::uint64_t total_ops, milliseconds timeout);

/// Lock-mode run (one permit): each admission records its ticket and an
/// order stamp taken inside the protected region; the records must satisfy
/// fife_holds and mutual exclusion must never be observed broken.
CheckResult check_fife(const SemaphoreSpec& spec, std::size_t threads, std::uint64_t admissions,
                       milliseconds timeout);

/// Lock-mode stress for `duration` with a SpinGauge attached; the number of
/// unadmitted threads spinning on grant must never exceed the threshold.
CheckResult check_bounded_spinning(const SemaphoreSpec& spec, std::size_t threads,
                                   milliseconds duration, milliseconds timeout);

/// Lock-mode run in which every thread must complete `iterations`
/// take/post pairs before `timeout`.
CheckResult check_liveness(const SemaphoreSpec& spec, std::size_t threads,
                           std::uint64_t iterations, milliseconds timeout);

/// `pushers` threads push `pushes_each` elements onto one chain while two
/// detacher threads repeatedly detach it; every element must be collected
/// exactly once.
CheckResult check_chain_conservation(std::size_t pushers, std::size_t pushes_each,
                                     milliseconds timeout);

/// Forces a detach before, inside, and after a push's exchange-to-link
/// window, rotating over `trials`; nothing may be lost or duplicated.
CheckResult check_chain_window(std::size_t trials, milliseconds timeout);

/// Replays `schedules` random small schedules (at most 4 threads, 12
/// operations) one operation at a time and compares the admitted tickets
/// with a sequential counting-semaphore model. Thresholds and strategies are
/// drawn at random per schedule; `spec.algo` picks the variant.
CheckResult check_sequential_equivalence(const SemaphoreSpec& spec, std::size_t schedules,
                                         std::uint64_t seed, milliseconds step_timeout);

/// Fixed-budget benchmark run: the final shared-PRNG state of every run must
/// equal the seed advanced once per reported iteration. Fails if the runs
/// do not finish within `timeout`.
CheckResult check_determinism(const BenchConfig& config, milliseconds timeout = milliseconds(120000));

struct ConformanceOptions {
  std::uint64_t ops = 100000;
  std::uint64_t admissions = 50000;
  milliseconds spin_duration{2000};
  milliseconds liveness_timeout{10000};
  std::size_t chain_pushes = 10000;
  std::size_t window_trials = 10000;
  std::size_t schedules = 200;
};

/// Runs every check that applies to config.algo with config's tunables.
ConformanceReport run_conformance(const BenchConfig& config,
                                  const ConformanceOptions& options = {});

}  // namespace semabench
