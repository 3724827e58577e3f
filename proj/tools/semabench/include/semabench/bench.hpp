#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <twa/wait_strategy.hpp>
#include <twa/waiting_array.hpp>

#include "semabench/algo.hpp"

namespace semabench {

struct BenchConfig {
  Algo algo = Algo::Ticket;
  std::size_t threads = 1;
  double duration_secs = 10.0;
  std::size_t runs = 11;
  std::uint64_t threshold = 1;
  std::size_t array_slots = twa::WaitingArray::kDefaultSlots;
  twa::WaitStrategy wait{};
  std::uint64_t seed = 1;
  /// Posts issued after construction; 1 uses the semaphore as a lock.
  std::uint64_t permits = 1;
  bool pin = false;
  /// Nonzero: each thread runs exactly this many iterations instead of
  /// running against the clock (conformance mode).
  std::uint64_t fixed_iterations = 0;
  /// Upper bound on duration_secs * runs.
  double budget_secs = 600.0;
};

/// Throws std::invalid_argument describing the first bad field.
void validate(const BenchConfig& config);

struct BenchResult {
  std::vector<std::uint64_t> per_run_iterations;
  std::uint64_t median_iterations = 0;
  /// Index into per_run_iterations of the run reported as the median.
  std::size_t median_run = 0;
  /// Final shared-PRNG state of each run.
  std::vector<std::uint64_t> per_run_prng_state;
  BenchConfig config_echo;
};

/// Index of the median order statistic (the lower median for even counts).
/// Ties resolve to the earliest run. `values` must be non-empty.
std::size_t median_index(const std::vector<std::uint64_t>& values);

/// Thrown when a run cannot be carried out; no partial results escape.
class BenchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Spawns config.threads workers that loop take, shared-PRNG step, post,
/// private-PRNG step, and reports aggregate iterations for each run.
BenchResult run_benchmark(const BenchConfig& config);

/// Header plus one row per (result, run).
void emit_csv(const std::vector<BenchResult>& results, std::ostream& out);

struct CsvRow {
  std::string algo;
  std::size_t threads = 0;
  double duration_secs = 0;
  std::size_t run_index = 0;
  std::uint64_t iterations = 0;
  bool median_flag = false;
  std::uint64_t threshold = 0;
  std::size_t array_slots = 0;
  std::string wait_strategy;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCsvHeader =
    "algo,threads,duration_secs,run_index,iterations,median_flag,threshold,array_slots,"
    "wait_strategy,seed";

/// Parses what emit_csv wrote. Throws std::runtime_error on malformed input.
std::vector<CsvRow> read_csv(std::istream& in);

}  // namespace semabench
