#include "semabench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <istream>
#include <latch>
#include <numeric>
#include <ostream>
#include <sstream>
#include <system_error>
#include <thread>

#include <twa/cacheline.hpp>

#include "semabench/harness.hpp"
#include "semabench/prng.hpp"

namespace semabench {

void validate(const BenchConfig& c) {
  if (c.threads == 0) throw std::invalid_argument("threads must be positive");
  if (c.runs == 0) throw std::invalid_argument("runs must be positive");
  if (c.fixed_iterations == 0) {
    if (!(c.duration_secs > 0)) throw std::invalid_argument("duration must be positive");
    if (c.duration_secs * static_cast<double>(c.runs) > c.budget_secs)
      throw std::invalid_argument("duration x runs exceeds the wall-clock budget");
  }
  if (c.array_slots == 0 || (c.array_slots & (c.array_slots - 1)) != 0)
    throw std::invalid_argument("array slots must be a power of two");
  if (c.permits == 0) throw std::invalid_argument("permits must be positive");
  if (!algo_supported(c.algo))
    throw std::invalid_argument(std::string(to_string(c.algo)) + " is unsupported here");
}

std::size_t median_index(const std::vector<std::uint64_t>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  const std::uint64_t median = values[order[(order.size() - 1) / 2]];
  return static_cast<std::size_t>(std::find(values.begin(), values.end(), median) -
                                  values.begin());
}

namespace {

struct alignas(twa::kSectorSize) Lane {
  std::uint64_t iterations = 0;
  std::uint64_t private_state = 0;
};

struct RunOutcome {
  std::uint64_t iterations = 0;
  std::uint64_t prng_state = 0;
};

template <typename Sem>
RunOutcome run_once(const BenchConfig& config, const std::shared_ptr<Sem>& sem) {
  for (std::uint64_t i = 0; i < config.permits; ++i) sem->post();

  twa::Padded<std::atomic<std::uint64_t>> shared_prng;
  twa::Padded<std::atomic<bool>> stop;
  shared_prng.value.store(config.seed);
  std::vector<Lane> lanes(config.threads);
  std::latch start(static_cast<std::ptrdiff_t>(config.threads) + 1);

  auto worker = [&](std::size_t index) {
    if (config.pin) pin_current_thread(index);
    Lane& lane = lanes[index];
    std::uint64_t priv = config.seed ^ ((index + 1) * twa::kHashMix);
    std::uint64_t n = 0;
    start.arrive_and_wait();
    auto iterate = [&] {
      sem->take();
      // Protected by the semaphore alone; relaxed atomics only keep a
      // multi-permit configuration free of data races.
      shared_prng.value.store(prng_step(shared_prng.value.load(std::memory_order_relaxed)),
                              std::memory_order_relaxed);
      sem->post();
      priv = prng_step(priv);
      ++n;
    };
    if (config.fixed_iterations != 0) {
      while (n < config.fixed_iterations) iterate();
    } else {
      while (!stop.value.load(std::memory_order_relaxed)) iterate();
    }
    lane.iterations = n;
    lane.private_state = priv;
  };

  std::vector<std::thread> threads;
  threads.reserve(config.threads);
  try {
    for (std::size_t i = 0; i < config.threads; ++i) threads.emplace_back(worker, i);
  } catch (const std::system_error& e) {
    // Release the ones already waiting at the start line, then bail.
    stop.value.store(true);
    for (std::size_t i = threads.size(); i <= config.threads; ++i) start.count_down();
    for (auto& t : threads) t.join();
    throw BenchError(std::string("thread spawn failed: ") + e.what());
  }

  start.arrive_and_wait();
  if (config.fixed_iterations == 0) {
    std::this_thread::sleep_for(std::chrono::duration<double>(config.duration_secs));
    stop.value.store(true);
  }
  for (auto& t : threads) t.join();

  RunOutcome out;
  for (const Lane& lane : lanes) out.iterations += lane.iterations;
  out.prng_state = shared_prng.value.load();
  return out;
}

}  // namespace

BenchResult run_benchmark(const BenchConfig& config) {
  validate(config);
  BenchResult result;
  result.config_echo = config;

  auto array = std::make_shared<twa::WaitingArray>(config.array_slots);
  SemaphoreSpec spec;
  spec.algo = config.algo;
  spec.initial = 0;
  spec.threshold = config.threshold;
  spec.strategy = config.wait;
  spec.array = array;

  for (std::size_t run = 0; run < config.runs; ++run) {
    const RunOutcome outcome =
        with_semaphore(spec, [&](const auto& sem) { return run_once(config, sem); });
    result.per_run_iterations.push_back(outcome.iterations);
    result.per_run_prng_state.push_back(outcome.prng_state);
  }
  result.median_run = median_index(result.per_run_iterations);
  result.median_iterations = result.per_run_iterations[result.median_run];
  return result;
}

void emit_csv(const std::vector<BenchResult>& results, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const BenchResult& r : results) {
    const BenchConfig& c = r.config_echo;
    for (std::size_t run = 0; run < r.per_run_iterations.size(); ++run) {
      out << to_string(c.algo) << ',' << c.threads << ',' << c.duration_secs << ',' << run << ','
          << r.per_run_iterations[run] << ',' << (run == r.median_run ? 1 : 0) << ','
          << c.threshold << ',' << c.array_slots << ',' << twa::to_string(c.wait.kind) << ','
          << c.seed << '\n';
    }
  }
  out.flush();
  if (!out) throw std::runtime_error("failed writing CSV output");
}

namespace {

template <typename T>
T parse_field(const std::string& text, std::size_t line) {
  T value{};
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size())
    throw std::runtime_error("CSV line " + std::to_string(line) + ": bad number '" + text + "'");
  return value;
}

}  // namespace

std::vector<CsvRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw std::runtime_error("CSV header mismatch");

  std::vector<CsvRow> rows;
  for (std::size_t number = 2; std::getline(in, line); ++number) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 10)
      throw std::runtime_error("CSV line " + std::to_string(number) + ": expected 10 fields");

    CsvRow row;
    row.algo = f[0];
    row.threads = parse_field<std::size_t>(f[1], number);
    row.duration_secs = parse_field<double>(f[2], number);
    row.run_index = parse_field<std::size_t>(f[3], number);
    row.iterations = parse_field<std::uint64_t>(f[4], number);
    row.median_flag = parse_field<int>(f[5], number) != 0;
    row.threshold = parse_field<std::uint64_t>(f[6], number);
    row.array_slots = parse_field<std::size_t>(f[7], number);
    row.wait_strategy = f[8];
    row.seed = parse_field<std::uint64_t>(f[9], number);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace semabench
