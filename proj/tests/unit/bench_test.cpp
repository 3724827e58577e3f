#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>

#include "semabench/bench.hpp"
#include "semabench/prng.hpp"

namespace semabench {
namespace {

// Reference outputs of the splitmix64 finalizer iterated as a function of
// its state, computed with a separate Python implementation.
TEST(Prng, PinnedValues) {
  static_assert(prng_step(0) == 0xe220a8397b1dcdafull);
  EXPECT_EQ(prng_step(1), 0x910a2dec89025cc1ull);
  EXPECT_EQ(prng_step(2), 0x975835de1c9756ceull);
  EXPECT_EQ(prng_advance(1, 1'000'000), 0x6ab21ba173660897ull);
  EXPECT_EQ(prng_advance(42, 10'000), 0x7f7d7fbdfbb073b5ull);
  EXPECT_EQ(prng_advance(9, 0), 9u);
}

TEST(MedianIndex, OddEvenAndTies) {
  EXPECT_EQ(median_index({5}), 0u);
  EXPECT_EQ(median_index({30, 10, 20}), 2u);
  EXPECT_EQ(median_index({4, 1, 3, 2}), 3u);  // lower median: value 2
  EXPECT_EQ(median_index({7, 7, 7}), 0u);
  EXPECT_EQ(median_index({1, 7, 7, 9, 7}), 1u);
}

BenchConfig quick(Algo algo) {
  BenchConfig c;
  c.algo = algo;
  c.threads = 1;
  c.duration_secs = 1;
  c.runs = 3;
  return c;
}

TEST(Validate, RejectsBadConfigs) {
  auto bad = [](auto mutate) {
    BenchConfig c = quick(Algo::Ticket);
    mutate(c);
    return c;
  };
  EXPECT_NO_THROW(validate(quick(Algo::Ticket)));
  EXPECT_THROW(validate(bad([](auto& c) { c.threads = 0; })), std::invalid_argument);
  EXPECT_THROW(validate(bad([](auto& c) { c.runs = 0; })), std::invalid_argument);
  EXPECT_THROW(validate(bad([](auto& c) { c.duration_secs = 0; })), std::invalid_argument);
  EXPECT_THROW(validate(bad([](auto& c) { c.array_slots = 3000; })), std::invalid_argument);
  EXPECT_THROW(validate(bad([](auto& c) { c.permits = 0; })), std::invalid_argument);
  EXPECT_THROW(validate(bad([](auto& c) {
                 c.duration_secs = 100;
                 c.runs = 11;
               })),
               std::invalid_argument);
  EXPECT_THROW(run_benchmark(bad([](auto& c) { c.threads = 0; })), std::invalid_argument);
}

class BenchAlgos : public ::testing::TestWithParam<Algo> {};

// One thread, one second, three runs: every run makes progress, the median is
// the middle value, and each run's PRNG state replays from the seed.
TEST_P(BenchAlgos, SingleThreadSanity) {
  const BenchResult r = run_benchmark(quick(GetParam()));
  ASSERT_EQ(r.per_run_iterations.size(), 3u);
  ASSERT_EQ(r.per_run_prng_state.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GT(r.per_run_iterations[i], 0u);
    EXPECT_EQ(r.per_run_prng_state[i], prng_advance(1, r.per_run_iterations[i]));
  }
  EXPECT_EQ(r.median_iterations, r.per_run_iterations[r.median_run]);
  EXPECT_EQ(r.median_run, median_index(r.per_run_iterations));
}

TEST_P(BenchAlgos, FixedBudgetIsDeterministic) {
  BenchConfig c = quick(GetParam());
  c.threads = 4;
  c.fixed_iterations = 2000;
  c.seed = 42;
  const BenchResult a = run_benchmark(c);
  const BenchResult b = run_benchmark(c);
  EXPECT_EQ(a.per_run_iterations, b.per_run_iterations);
  EXPECT_EQ(a.per_run_prng_state, b.per_run_prng_state);
  for (std::uint64_t s : a.per_run_prng_state) EXPECT_EQ(s, prng_advance(42, 8000));
}

INSTANTIATE_TEST_SUITE_P(All, BenchAlgos,
                         ::testing::Values(Algo::Ticket, Algo::TwaCounter, Algo::TwaChain,
                                           Algo::OsBaseline),
                         [](const auto& info) {
                           std::string name(to_string(info.param));
                           for (char& ch : name)
                             if (ch == '-') ch = '_';
                           return name;
                         });

TEST(Csv, EmptyResultsGiveHeaderOnly) {
  std::ostringstream out;
  emit_csv({}, out);
  EXPECT_EQ(out.str(), std::string(kCsvHeader) + "\n");
  std::istringstream in(out.str());
  EXPECT_TRUE(read_csv(in).empty());
}

TEST(Csv, RoundTripWithOneMedianRow) {
  BenchResult r;
  r.config_echo = quick(Algo::TwaChain);
  r.config_echo.threshold = 4;
  r.config_echo.array_slots = 256;
  r.config_echo.wait = twa::WaitStrategy::spin_then_park();
  r.config_echo.seed = 77;
  r.per_run_iterations = {300, 100, 200};
  r.median_run = median_index(r.per_run_iterations);
  r.median_iterations = 200;

  std::stringstream buf;
  emit_csv({r}, buf);
  const auto rows = read_csv(buf);
  ASSERT_EQ(rows.size(), 3u);
  int medians = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const CsvRow& row = rows[i];
    EXPECT_EQ(row.algo, "twa-chain");
    EXPECT_EQ(row.threads, 1u);
    EXPECT_DOUBLE_EQ(row.duration_secs, 1.0);
    EXPECT_EQ(row.run_index, i);
    EXPECT_EQ(row.iterations, r.per_run_iterations[i]);
    EXPECT_EQ(row.threshold, 4u);
    EXPECT_EQ(row.array_slots, 256u);
    EXPECT_EQ(row.wait_strategy, "spinpark");
    EXPECT_EQ(row.seed, 77u);
    medians += row.median_flag;
  }
  EXPECT_EQ(medians, 1);
  EXPECT_TRUE(rows[2].median_flag);
}

TEST(Csv, RejectsMalformedInput) {
  std::istringstream wrong_header("algo,threads\n");
  EXPECT_THROW(read_csv(wrong_header), std::runtime_error);
  std::istringstream short_row(std::string(kCsvHeader) + "\nticket,1,1\n");
  EXPECT_THROW(read_csv(short_row), std::runtime_error);
  std::istringstream bad_number(std::string(kCsvHeader) + "\nticket,x,1,0,5,1,1,64,addr,1\n");
  EXPECT_THROW(read_csv(bad_number), std::runtime_error);
}

}  // namespace
}  // namespace semabench
