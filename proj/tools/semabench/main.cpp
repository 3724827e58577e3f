// semabench: T threads contend on one central semaphore, each looping
// take -> shared PRNG step -> post -> private PRNG step. Reports aggregate
// iterations per run and the median over runs.

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semabench/bench.hpp"
#include "semabench/conformance.hpp"

namespace {

template <typename T>
std::optional<T> env_number(const char* name) {
  const char* text = std::getenv(name);
  if (text == nullptr || *text == '\0') return std::nullopt;
  T value{};
  const char* end = text + std::char_traits<char>::length(text);
  const auto [ptr, ec] = std::from_chars(text, end, value);
  if (ec != std::errc{} || ptr != end) {
    std::cerr << "semabench: ignoring malformed " << name << "=" << text << '\n';
    return std::nullopt;
  }
  return value;
}

// "N" or "A..B" -> inclusive thread-count range.
bool parse_sweep(const std::string& text, std::size_t& lo, std::size_t& hi) {
  const auto dots = text.find("..");
  auto number = [](std::string_view s, std::size_t& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  };
  if (dots == std::string::npos) {
    lo = 1;
    return number(text, hi) && hi >= 1;
  }
  return number(std::string_view(text).substr(0, dots), lo) &&
         number(std::string_view(text).substr(dots + 2), hi) && lo >= 1 && lo <= hi;
}

}  // namespace

int main(int argc, char** argv) {
  semabench::BenchConfig config;
  if (auto slots = env_number<std::size_t>("TWA_ARRAY_SLOTS")) config.array_slots = *slots;
  if (auto k = env_number<std::uint64_t>("TWA_LONGTERM_THRESHOLD")) config.threshold = *k;

  CLI::App app{"Semaphore contention benchmark (ticket and TWA semaphores)"};
  std::string algo = "twa-counter";
  std::string wait = std::string(twa::to_string(config.wait.kind));
  std::string csv_path;
  std::string sweep;
  bool conformance = false;
  double liveness_timeout = 10.0;

  app.add_option("--algo", algo, "ticket | twa-counter | twa-chain | os-baseline")
      ->capture_default_str();
  app.add_option("--threads", config.threads, "Worker threads")->capture_default_str();
  app.add_option("--duration", config.duration_secs, "Seconds per run")->capture_default_str();
  app.add_option("--runs", config.runs, "Independent runs; the median is reported")
      ->capture_default_str();
  app.add_option("--threshold", config.threshold,
                 "Long-term threshold (env TWA_LONGTERM_THRESHOLD)")
      ->capture_default_str();
  app.add_option("--array-slots", config.array_slots,
                 "Waiting array slots, a power of two (env TWA_ARRAY_SLOTS)")
      ->capture_default_str();
  app.add_option("--wait", wait, "pause | yield | addr | spinpark")->capture_default_str();
  app.add_option("--spin-bound", config.wait.spin_bound, "Spin iterations before parking")
      ->capture_default_str();
  app.add_option("--seed", config.seed, "PRNG seed")->capture_default_str();
  app.add_option("--permits", config.permits, "Posts issued before the threads start")
      ->capture_default_str();
  app.add_option("--iterations", config.fixed_iterations,
                 "Fixed iterations per thread instead of a timed run");
  app.add_option("--budget", config.budget_secs, "Wall-clock cap on duration x runs")
      ->capture_default_str();
  app.add_option("--csv", csv_path, "Write per-run rows to PATH ('-' for stdout)");
  app.add_option("--sweep", sweep, "Thread counts to sweep: N (1..N) or A..B");
  app.add_flag("--conformance", conformance, "Run the invariant checks instead of timing");
  app.add_option("--liveness-timeout", liveness_timeout,
                 "Seconds before a conformance check counts as hung")
      ->capture_default_str();
  app.add_flag("--pin", config.pin, "Pin worker i to CPU i (investigation only)");
  CLI11_PARSE(app, argc, argv);

  const auto parsed_algo = semabench::parse_algo(algo);
  if (!parsed_algo) {
    std::cerr << "semabench: unknown --algo " << algo << '\n';
    return 2;
  }
  config.algo = *parsed_algo;
  const auto kind = twa::parse_wait_kind(wait);
  if (!kind) {
    std::cerr << "semabench: unknown --wait " << wait << '\n';
    return 2;
  }
  config.wait.kind = *kind;

  std::vector<std::size_t> thread_counts{config.threads};
  if (!sweep.empty()) {
    std::size_t lo = 0, hi = 0;
    if (!parse_sweep(sweep, lo, hi)) {
      std::cerr << "semabench: bad --sweep " << sweep << '\n';
      return 2;
    }
    thread_counts.clear();
    for (std::size_t t = lo; t <= hi; ++t) thread_counts.push_back(t);
  }

  try {
    if (conformance) {
      semabench::ConformanceOptions options;
      options.liveness_timeout = std::chrono::milliseconds(
          static_cast<std::chrono::milliseconds::rep>(liveness_timeout * 1000));
      if (config.fixed_iterations != 0) options.ops = config.fixed_iterations;
      bool ok = true;
      for (std::size_t t : thread_counts) {
        config.threads = t;
        std::cout << "# conformance algo=" << algo << " threads=" << t
                  << " threshold=" << config.threshold << " wait=" << wait << '\n';
        const auto report = semabench::run_conformance(config, options);
        report.print(std::cout);
        ok = ok && report.passed();
      }
      std::cout.flush();
      // A failed liveness check leaves threads blocked for good; skip the
      // normal teardown rather than join them.
      if (!ok) std::_Exit(1);
      return 0;
    }

    // Keep stdout pure CSV when the rows go there.
    std::ostream& log = csv_path == "-" ? std::cerr : std::cout;
    std::vector<semabench::BenchResult> results;
    for (std::size_t t : thread_counts) {
      config.threads = t;
      auto result = semabench::run_benchmark(config);
      log << algo << " threads=" << t << " wait=" << wait << " threshold="
                << config.threshold << " median=" << result.median_iterations << " runs=[";
      for (std::size_t r = 0; r < result.per_run_iterations.size(); ++r)
        log << (r ? " " : "") << result.per_run_iterations[r];
      log << "]\n" << std::flush;
      results.push_back(std::move(result));
    }

    if (!csv_path.empty()) {
      if (csv_path == "-") {
        semabench::emit_csv(results, std::cout);
      } else {
        std::ofstream out(csv_path);
        if (!out) {
          std::cerr << "semabench: cannot open " << csv_path << '\n';
          return 1;
        }
        semabench::emit_csv(results, out);
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "semabench: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "semabench: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
