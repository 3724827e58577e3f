#include "semabench/conformance.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <exception>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <twa/cacheline.hpp>
#include <twa/wait_chain.hpp>

#include "semabench/harness.hpp"
#include "semabench/prng.hpp"

namespace semabench {

using Clock = std::chrono::steady_clock;

bool ConformanceReport::passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

void ConformanceReport::print(std::ostream& out) const {
  for (const CheckResult& c : checks) {
    out << (c.passed ? "PASS " : "FAIL ") << std::left << std::setw(28) << c.name << std::right
        << std::setw(8) << c.elapsed.count() << " ms  " << c.detail << '\n';
  }
  out << (passed() ? "conformance: PASS" : "conformance: FAIL") << '\n';
}

bool fife_holds(std::vector<AdmissionRecord> records, std::string* why) {
  auto by_ticket = records;
  std::sort(by_ticket.begin(), by_ticket.end(),
            [](const auto& a, const auto& b) { return a.ticket_value < b.ticket_value; });
  std::sort(records.begin(), records.end(),
            [](const auto& a, const auto& b) { return a.admit_order < b.admit_order; });
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].ticket_value != by_ticket[i].ticket_value ||
        records[i].admit_order != by_ticket[i].admit_order) {
      if (why != nullptr) {
        std::ostringstream os;
        os << "position " << i << ": admit order " << records[i].admit_order << " has ticket "
           << records[i].ticket_value << ", ticket order expects ticket "
           << by_ticket[i].ticket_value;
        *why = os.str();
      }
      return false;
    }
  }
  return true;
}

namespace {

template <typename Sem>
concept HasCore = requires(const Sem& s) { s.core().ticket(); };

// Splits `total` across `parts` as evenly as possible.
std::uint64_t share(std::uint64_t total, std::size_t parts, std::size_t index) {
  return total / parts + (index < total % parts ? 1 : 0);
}

// Stress workers give up the CPU every few operations so that, even with
// fewer CPUs than threads, takes regularly find the semaphore contended.
inline void perturb(std::uint64_t n) {
  if ((n & 15) == 15) std::this_thread::yield();
}

milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<milliseconds>(Clock::now() - start);
}

template <typename Pred>
bool wait_until(Pred pred, milliseconds timeout) {
  const auto deadline = Clock::now() + timeout;
  while (!pred()) {
    if (Clock::now() > deadline) return false;
    std::this_thread::yield();
  }
  return true;
}

std::string describe(const SemaphoreSpec& spec) {
  std::ostringstream os;
  os << to_string(spec.algo) << '/' << twa::to_string(spec.strategy.kind);
  if (is_twa(spec.algo)) os << "/k=" << spec.threshold;
  return os.str();
}

}  // namespace

CheckResult check_conservation(const SemaphoreSpec& spec, std::size_t threads,
                               std::uint64_t total_ops, milliseconds timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "conservation " + describe(spec);

  struct State {
    twa::Padded<std::atomic<std::uint64_t>> takes;
    twa::Padded<std::atomic<std::uint64_t>> posts;
    std::atomic<std::uint64_t> violations{0};
    std::atomic<std::uint64_t> regressions{0};
    std::atomic<std::uint64_t> samples{0};
    std::atomic<std::size_t> workers_left{0};
  };
  enum class Role { Producer, Consumer, Cycler };
  auto role_of = [threads](std::size_t i) {
    if (threads < 3) return Role::Cycler;
    return static_cast<Role>(i % 3);
  };

  std::size_t producers = 0;
  std::uint64_t consumer_takes = 0;
  const std::uint64_t per_thread = total_ops / threads;
  for (std::size_t i = 0; i < threads; ++i) {
    if (role_of(i) == Role::Producer) ++producers;
    if (role_of(i) == Role::Consumer) consumer_takes += per_thread;
  }
  std::uint64_t expected_takes = consumer_takes;
  for (std::size_t i = 0; i < threads; ++i)
    if (role_of(i) == Role::Cycler) expected_takes += per_thread / 2;
  const std::uint64_t expected_posts = expected_takes;

  return with_semaphore(spec, [&](auto sem) {
    auto state = std::make_shared<State>();
    state->workers_left = threads;
    const std::uint64_t initial = spec.initial;

    auto take = [sem, state, initial] {
      sem->take();
      const std::uint64_t taken = state->takes.value.fetch_add(1) + 1;
      if (taken > initial + state->posts.value.load()) state->violations.fetch_add(1);
    };
    auto post = [sem, state] {
      state->posts.value.fetch_add(1);
      sem->post();
    };

    std::vector<std::uint64_t> producer_posts(threads, 0);
    for (std::size_t i = 0, p = 0; i < threads; ++i)
      if (role_of(i) == Role::Producer) producer_posts[i] = share(consumer_takes, producers, p++);

    const bool finished = run_with_deadline(threads + 1, timeout, [=](std::size_t i) {
      if (i == threads) {
        // Sampler.
        std::uint64_t last_ticket = 0, last_grant = 0;
        while (state->workers_left.load() != 0) {
          const std::uint64_t taken = state->takes.value.load();
          const std::uint64_t posted = state->posts.value.load();
          if (taken > initial + posted) state->violations.fetch_add(1);
          if constexpr (HasCore<typename decltype(sem)::element_type>) {
            const std::uint64_t t = sem->core().ticket();
            const std::uint64_t g = sem->core().grant();
            if (t < last_ticket || g < last_grant) state->regressions.fetch_add(1);
            last_ticket = t;
            last_grant = g;
          }
          state->samples.fetch_add(1);
          std::this_thread::yield();
        }
        return;
      }
      switch (role_of(i)) {
        case Role::Producer:
          for (std::uint64_t n = 0; n < producer_posts[i]; ++n) {
            post();
            perturb(n);
          }
          break;
        case Role::Consumer:
          for (std::uint64_t n = 0; n < per_thread; ++n) {
            take();
            perturb(n);
          }
          break;
        case Role::Cycler:
          for (std::uint64_t n = 0; n < per_thread / 2; ++n) {
            take();
            perturb(n);
            post();
          }
          break;
      }
      state->workers_left.fetch_sub(1);
    });

    std::ostringstream os;
    os << "takes=" << state->takes.value.load() << "/" << expected_takes
       << " posts=" << state->posts.value.load() << "/" << expected_posts
       << " violations=" << state->violations.load()
       << " regressions=" << state->regressions.load() << " samples=" << state->samples.load();
    bool ok = finished && state->violations.load() == 0 && state->regressions.load() == 0 &&
              state->takes.value.load() == expected_takes &&
              state->posts.value.load() == expected_posts;
    if constexpr (HasCore<typename decltype(sem)::element_type>) {
      if (finished) {
        const bool counters = sem->core().ticket() == expected_takes &&
                              sem->core().grant() == initial + expected_posts;
        if (!counters) os << " final counters ticket=" << sem->core().ticket()
                          << " grant=" << sem->core().grant();
        ok = ok && counters;
      }
    }
    if (!finished) os << " TIMEOUT after " << timeout.count() << " ms";
    result.passed = ok;
    result.detail = os.str();
    result.elapsed = since(start);
    return result;
  });
}

CheckResult check_fife(const SemaphoreSpec& spec_in, std::size_t threads,
                       std::uint64_t admissions, milliseconds timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "fife " + describe(spec_in);
  if (!has_tickets(spec_in.algo)) {
    result.passed = true;
    result.detail = "not applicable (no tickets)";
    return result;
  }
  SemaphoreSpec spec = spec_in;
  spec.initial = 1;

  struct State {
    std::vector<AdmissionRecord> records;
    std::atomic<std::uint64_t> order{0};
    std::atomic<int> inside{0};
    std::atomic<std::uint64_t> exclusion_breaks{0};
  };

  return with_semaphore(spec, [&](auto sem) {
    auto state = std::make_shared<State>();
    state->records.resize(admissions);
    const bool finished = run_with_deadline(threads, timeout, [=](std::size_t i) {
      const std::uint64_t mine = share(admissions, threads, i);
      for (std::uint64_t n = 0; n < mine; ++n) {
        const std::uint64_t ticket = sem->take();
        if (state->inside.fetch_add(1) != 0) state->exclusion_breaks.fetch_add(1);
        const std::uint64_t order = state->order.fetch_add(1);
        state->records[order] = {ticket, order};
        state->inside.fetch_sub(1);
        perturb(n);
        sem->post();
      }
    });

    std::ostringstream os;
    bool ok = finished && state->exclusion_breaks.load() == 0;
    if (finished) {
      std::string why;
      const bool fife = fife_holds(state->records, &why);
      // One permit: the k-th admission must hold ticket k.
      std::uint64_t dense_breaks = 0;
      for (std::uint64_t k = 0; k < admissions; ++k)
        if (state->records[k].ticket_value != k) ++dense_breaks;
      ok = ok && fife && dense_breaks == 0;
      os << "admissions=" << admissions << " exclusion_breaks=" << state->exclusion_breaks.load()
         << " misordered=" << dense_breaks;
      if (!fife) os << " first divergence: " << why;
    } else {
      os << "TIMEOUT after " << timeout.count() << " ms, admitted "
         << state->order.load() << "/" << admissions;
    }
    result.passed = ok;
    result.detail = os.str();
    result.elapsed = since(start);
    return result;
  });
}

CheckResult check_bounded_spinning(const SemaphoreSpec& spec_in, std::size_t threads,
                                   milliseconds duration, milliseconds timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "bounded-spinning " + describe(spec_in);
  if (!is_twa(spec_in.algo)) {
    result.passed = true;
    result.detail = "not applicable (no threshold split)";
    return result;
  }
  auto gauge = std::make_shared<twa::SpinGauge>();
  SemaphoreSpec spec = spec_in;
  spec.initial = 1;
  spec.gauge = gauge.get();

  struct State {
    twa::Padded<std::atomic<bool>> stop;
    std::atomic<std::uint64_t> iterations{0};
  };

  return with_semaphore(spec, [&](auto sem) {
    auto state = std::make_shared<State>();
    const bool finished = run_with_deadline(threads + 1, duration + timeout,
                                            [=](std::size_t i) {
      if (i == threads) {
        std::this_thread::sleep_for(duration);
        state->stop.value.store(true);
        return;
      }
      // The gauge must outlive any thread still spinning.
      [[maybe_unused]] auto keep = gauge;
      std::uint64_t n = 0;
      while (!state->stop.value.load(std::memory_order_relaxed)) {
        sem->take();
        sem->post();
        ++n;
      }
      state->iterations.fetch_add(n);
    });

    const std::uint64_t bound = spec.threshold;
    std::ostringstream os;
    os << "max_spinners=" << gauge->max_spinners() << " bound=" << bound
       << " spin_entries=" << gauge->entries() << " iterations=" << state->iterations.load();
    if (!finished) os << " TIMEOUT";
    result.passed = finished && gauge->max_spinners() <= bound;
    result.detail = os.str();
    result.elapsed = since(start);
    return result;
  });
}

CheckResult check_liveness(const SemaphoreSpec& spec_in, std::size_t threads,
                           std::uint64_t iterations, milliseconds timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "liveness " + describe(spec_in);
  SemaphoreSpec spec = spec_in;
  spec.initial = 1;

  return with_semaphore(spec, [&](auto sem) {
    auto completed = std::make_shared<std::atomic<std::size_t>>(0);
    const bool finished = run_with_deadline(threads, timeout, [=](std::size_t) {
      for (std::uint64_t n = 0; n < iterations; ++n) {
        sem->take();
        perturb(n);
        sem->post();
      }
      completed->fetch_add(1);
    });
    std::ostringstream os;
    os << threads << " threads x " << iterations << " take/post, completed "
       << completed->load() << "/" << threads;
    if (!finished) os << " TIMEOUT after " << timeout.count() << " ms";
    result.passed = finished;
    result.detail = os.str();
    result.elapsed = since(start);
    return result;
  });
}

CheckResult check_chain_conservation(std::size_t pushers, std::size_t pushes_each,
                                     milliseconds timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "chain-conservation";
  constexpr std::size_t kDetachers = 2;

  struct State {
    twa::ChainHead head{nullptr};
    std::vector<std::unique_ptr<twa::WaitElement[]>> elements;
    std::vector<std::unique_ptr<std::atomic<std::uint32_t>[]>> hits;
    std::atomic<std::size_t> pushers_left{0};
    std::atomic<std::uint64_t> collected{0};
    std::atomic<std::uint64_t> detaches{0};
    std::atomic<std::uint64_t> strays{0};
  };
  auto state = std::make_shared<State>();
  for (std::size_t p = 0; p < pushers; ++p) {
    state->elements.push_back(std::make_unique<twa::WaitElement[]>(pushes_each));
    state->hits.push_back(std::make_unique<std::atomic<std::uint32_t>[]>(pushes_each));
  }
  state->pushers_left = pushers;

  // Maps an element back to its (pusher, index) slot in the hit table.
  auto record = [state, pushers, pushes_each](twa::WaitElement& e) {
    for (std::size_t p = 0; p < pushers; ++p) {
      twa::WaitElement* base = state->elements[p].get();
      if (&e >= base && &e < base + pushes_each) {
        state->hits[p][static_cast<std::size_t>(&e - base)].fetch_add(1);
        state->collected.fetch_add(1);
        return;
      }
    }
    state->strays.fetch_add(1);
  };

  const bool finished = run_with_deadline(pushers + kDetachers, timeout, [=](std::size_t i) {
    if (i < pushers) {
      for (std::size_t n = 0; n < pushes_each; ++n) {
        twa::chain_push(state->head, state->elements[i][n]);
        if ((n & 63) == 0) std::this_thread::yield();
      }
      state->pushers_left.fetch_sub(1);
      return;
    }
    for (;;) {
      const bool last = state->pushers_left.load() == 0;
      twa::chain_detach_all(state->head).consume(record);
      state->detaches.fetch_add(1);
      if (last) break;
      std::this_thread::yield();
    }
  });

  std::uint64_t missing = 0, duplicated = 0;
  if (finished) {
    twa::chain_detach_all(state->head).consume(record);
    for (std::size_t p = 0; p < pushers; ++p)
      for (std::size_t n = 0; n < pushes_each; ++n) {
        const std::uint32_t h = state->hits[p][n].load();
        if (h == 0) ++missing;
        if (h > 1) ++duplicated;
      }
  }
  const std::uint64_t expected = static_cast<std::uint64_t>(pushers) * pushes_each;
  std::ostringstream os;
  os << "pushed=" << expected << " collected=" << state->collected.load()
     << " missing=" << missing << " duplicated=" << duplicated
     << " strays=" << state->strays.load() << " detaches=" << state->detaches.load();
  if (!finished) os << " TIMEOUT";
  result.passed = finished && missing == 0 && duplicated == 0 && state->strays.load() == 0 &&
                  state->collected.load() == expected;
  result.detail = os.str();
  result.elapsed = since(start);
  return result;
}

CheckResult check_chain_window(std::size_t trials, milliseconds timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "chain-window";

  struct State {
    twa::ChainHead head{nullptr};
    twa::WaitElement resident;  // already on the chain when the race starts
    twa::WaitElement racer;
    std::barrier<> sync{2};
    std::atomic<bool> racer_seen{false};
    std::atomic<bool> resident_seen{false};
    std::atomic<std::uint64_t> failures{0};
    std::atomic<std::uint64_t> in_window{0};
    std::string first_failure;
  };
  auto state = std::make_shared<State>();

  // Trial modes: 0 detach before the push, 1 detach inside the window,
  // 2 detach after the push completes.
  const bool finished = run_with_deadline(2, timeout, [=](std::size_t role) {
    auto& s = *state;
    for (std::size_t trial = 0; trial < trials; ++trial) {
      const int mode = static_cast<int>(trial % 3);
      if (role == 1) {
        // Detacher.
        s.sync.arrive_and_wait();  // A: setup done (and push started for mode 1/2)
        auto chain = twa::chain_detach_all(s.head);
        chain.consume([&](twa::WaitElement& e) {
          if (&e == &s.racer) s.racer_seen = true;
          if (&e == &s.resident) s.resident_seen = true;
        });
        s.sync.arrive_and_wait();  // B: detach done
        s.sync.arrive_and_wait();  // C: verification done
        continue;
      }

      // Pusher and verifier.
      s.racer_seen = false;
      s.resident_seen = false;
      s.resident.next.store(twa::unlinked_sentinel());
      s.racer.next.store(twa::unlinked_sentinel());
      twa::chain_push(s.head, s.resident);

      bool saw_racer = false, saw_resident = false;
      if (mode == 0) {
        s.sync.arrive_and_wait();  // A
        s.sync.arrive_and_wait();  // B
        twa::chain_push(s.head, s.racer);
      } else if (mode == 1) {
        // First half of the push only; the link store is held back.
        twa::WaitElement* old = s.head.exchange(&s.racer);
        s.sync.arrive_and_wait();  // A
        // Hold the link back until the detacher has swapped the chain out.
        if (wait_until([&] { return s.head.load() == nullptr; }, milliseconds(5000)))
          s.in_window.fetch_add(1);
        s.racer.next.store(old);
        s.sync.arrive_and_wait();  // B
      } else {
        twa::chain_push(s.head, s.racer);
        s.sync.arrive_and_wait();  // A
        s.sync.arrive_and_wait();  // B
      }
      saw_racer = s.racer_seen;
      saw_resident = s.resident_seen;
      twa::chain_detach_all(s.head).consume([&](twa::WaitElement& e) {
        if (&e == &s.racer) {
          if (saw_racer) s.failures.fetch_add(1);
          saw_racer = true;
        }
        if (&e == &s.resident) {
          if (saw_resident) s.failures.fetch_add(1);
          saw_resident = true;
        }
      });
      const bool expect_racer_in_detach = mode != 0;
      const bool bad = !saw_racer || !saw_resident ||
                       s.racer_seen.load() != expect_racer_in_detach || !s.resident_seen.load();
      if (bad && s.failures.fetch_add(1) == 0)
        s.first_failure = "trial " + std::to_string(trial) + " mode " + std::to_string(mode);
      s.sync.arrive_and_wait();  // C
    }
  });

  std::ostringstream os;
  os << "trials=" << trials << " failures=" << state->failures.load()
     << " detaches_inside_window=" << state->in_window.load();
  if (!state->first_failure.empty()) os << " first: " << state->first_failure;
  if (!finished) os << " TIMEOUT";
  result.passed = finished && state->failures.load() == 0;
  result.detail = os.str();
  result.elapsed = since(start);
  return result;
}

namespace {

// One replayed schedule. Workers execute exactly one command at a time.
struct Replay {
  enum Command : int { kNone, kTake, kPost, kExit };

  struct alignas(twa::kSectorSize) Worker {
    std::atomic<std::uint64_t> issued{0};
    std::atomic<std::uint64_t> done{0};
    std::atomic<int> command{kNone};
    std::atomic<std::uint64_t> ticket{0};
  };

  std::vector<Worker> workers;
  explicit Replay(std::size_t n) : workers(n) {}
};

}  // namespace

CheckResult check_sequential_equivalence(const SemaphoreSpec& base, std::size_t schedules,
                                         std::uint64_t seed, milliseconds step_timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "sequential-equivalence " + std::string(to_string(base.algo));
  if (!has_tickets(base.algo)) {
    result.passed = true;
    result.detail = "not applicable (no tickets)";
    return result;
  }

  std::mt19937_64 rng(seed);
  constexpr std::uint64_t kThresholds[] = {0, 1, 2, 4};
  constexpr twa::WaitKind kKinds[] = {twa::WaitKind::PauseSpin, twa::WaitKind::YieldSpin,
                                      twa::WaitKind::AddressWait, twa::WaitKind::SpinThenPark};
  // A tiny private array makes slot collisions routine.
  auto array = std::make_shared<twa::WaitingArray>(8);
  std::uint64_t total_admissions = 0;
  std::string failure;

  for (std::size_t s = 0; s < schedules && failure.empty(); ++s) {
    const std::size_t nthreads = 1 + rng() % 4;
    const std::size_t nops = 1 + rng() % 12;
    std::vector<std::vector<int>> program(nthreads);
    for (std::size_t k = 0; k < nops; ++k)
      program[rng() % nthreads].push_back(rng() % 2 == 0 ? Replay::kTake : Replay::kPost);

    SemaphoreSpec spec = base;
    spec.initial = rng() % 3;
    spec.threshold = kThresholds[rng() % 4];
    spec.strategy.kind = kKinds[rng() % 4];
    spec.array = array;

    std::ostringstream where;
    where << "schedule " << s << " (" << describe(spec) << ", initial " << spec.initial << ")";

    failure = with_semaphore(spec, [&](auto sem) -> std::string {
      if constexpr (!HasCore<typename decltype(sem)::element_type>) {
        return "variant has no ticket counter";
      } else {
      auto replay = std::make_shared<Replay>(nthreads);
      std::vector<std::thread> threads;
      for (std::size_t i = 0; i < nthreads; ++i) {
        threads.emplace_back([sem, replay, i] {
          auto& w = replay->workers[i];
          for (std::uint64_t seen = 0;;) {
            while (w.issued.load() == seen) std::this_thread::yield();
            ++seen;
            const int cmd = w.command.load();
            if (cmd == Replay::kExit) return;
            if (cmd == Replay::kTake) w.ticket.store(sem->take());
            if (cmd == Replay::kPost) sem->post();
            w.done.store(seen);
          }
        });
      }
      auto issue = [&](std::size_t i, int cmd) {
        replay->workers[i].command.store(cmd);
        replay->workers[i].issued.fetch_add(1);
      };
      auto finished = [&](std::size_t i) {
        return replay->workers[i].done.load() == replay->workers[i].issued.load();
      };

      // Sequential model.
      std::uint64_t grant = spec.initial, next_ticket = 0;
      std::vector<std::uint64_t> blocked_on(nthreads, UINT64_MAX);
      std::vector<std::size_t> pc(nthreads, 0);
      std::vector<std::uint64_t> model_seq, real_seq;
      std::string err;

      auto stray_admission = [&] {
        for (std::size_t j = 0; j < nthreads; ++j)
          if (blocked_on[j] != UINT64_MAX && finished(j))
            return "ticket " + std::to_string(blocked_on[j]) + " admitted before it was enabled";
        return std::string();
      };
      auto expect_admission = [&](std::size_t j) {
        if (!wait_until([&] { return finished(j); }, step_timeout)) {
          err = "ticket " + std::to_string(blocked_on[j]) + " not admitted once enabled";
          return;
        }
        model_seq.push_back(blocked_on[j]);
        real_seq.push_back(replay->workers[j].ticket.load());
        blocked_on[j] = UINT64_MAX;
      };
      auto model_post = [&] {
        ++grant;
        for (std::size_t j = 0; j < nthreads && err.empty(); ++j)
          if (blocked_on[j] == grant - 1) expect_admission(j);
      };

      for (;;) {
        if (!err.empty()) break;
        std::vector<std::size_t> runnable;
        for (std::size_t i = 0; i < nthreads; ++i)
          if (blocked_on[i] == UINT64_MAX && pc[i] < program[i].size()) runnable.push_back(i);
        if (runnable.empty()) break;
        const std::size_t i = runnable[rng() % runnable.size()];
        const int op = program[i][pc[i]++];
        issue(i, op);
        if (op == Replay::kPost) {
          if (!wait_until([&] { return finished(i); }, step_timeout)) {
            err = "post did not return";
            break;
          }
          model_post();
        } else {
          const std::uint64_t t = next_ticket++;
          if (!wait_until([&] { return finished(i) || sem->core().ticket() > t; },
                          step_timeout)) {
            err = "take never drew a ticket";
            break;
          }
          blocked_on[i] = t;
          if (grant > t) expect_admission(i);
        }
        if (err.empty()) err = stray_admission();
      }
      // Drain: the controller posts until nobody is left waiting.
      while (err.empty() && std::any_of(blocked_on.begin(), blocked_on.end(),
                                        [](std::uint64_t b) { return b != UINT64_MAX; })) {
        sem->post();
        model_post();
        if (err.empty()) err = stray_admission();
      }
      if (err.empty() && model_seq != real_seq) err = "admitted ticket sequence differs";
      total_admissions += real_seq.size();

      if (err.empty()) {
        for (std::size_t i = 0; i < nthreads; ++i) issue(i, Replay::kExit);
        for (auto& t : threads) t.join();
        return {};
      }
      // Stuck workers are abandoned; the shared_ptr captures keep their
      // state alive.
      for (auto& t : threads) t.detach();
      return err;
      }
    });
    if (!failure.empty()) failure = where.str() + ": " + failure;
  }

  std::ostringstream os;
  os << "schedules=" << schedules << " admissions=" << total_admissions;
  if (!failure.empty()) os << " FAILED " << failure;
  result.passed = failure.empty();
  result.detail = os.str();
  result.elapsed = since(start);
  return result;
}

CheckResult check_determinism(const BenchConfig& config_in, milliseconds timeout) {
  const auto start = Clock::now();
  CheckResult result;
  result.name = "determinism " + std::string(to_string(config_in.algo));
  BenchConfig config = config_in;
  if (config.fixed_iterations == 0) config.fixed_iterations = 10000;
  config.permits = 1;

  // The benchmark itself has no deadline; run it on a thread we can abandon.
  struct Outcome {
    BenchResult bench;
    std::exception_ptr error;
  };
  auto out = std::make_shared<Outcome>();
  const bool finished = run_with_deadline(1, timeout, [config, out](std::size_t) {
    try {
      out->bench = run_benchmark(config);
    } catch (...) {
      out->error = std::current_exception();
    }
  });
  if (finished && out->error) std::rethrow_exception(out->error);
  if (!finished) {
    result.passed = false;
    result.detail = "TIMEOUT after " + std::to_string(timeout.count()) + " ms";
    result.elapsed = since(start);
    return result;
  }
  const BenchResult& bench = out->bench;
  const std::uint64_t per_run = config.fixed_iterations * config.threads;
  const std::uint64_t expected = prng_advance(config.seed, per_run);
  std::size_t bad = 0;
  for (std::size_t r = 0; r < bench.per_run_iterations.size(); ++r) {
    if (bench.per_run_iterations[r] != per_run || bench.per_run_prng_state[r] != expected) ++bad;
  }
  std::ostringstream os;
  os << "runs=" << bench.per_run_iterations.size() << " iterations/run=" << per_run
     << " expected_state=0x" << std::hex << expected << std::dec << " mismatched_runs=" << bad;
  result.passed = bad == 0;
  result.detail = os.str();
  result.elapsed = since(start);
  return result;
}

ConformanceReport run_conformance(const BenchConfig& config, const ConformanceOptions& options) {
  ConformanceReport report;
  SemaphoreSpec spec;
  spec.algo = config.algo;
  spec.threshold = config.threshold;
  spec.strategy = config.wait;
  spec.array = std::make_shared<twa::WaitingArray>(config.array_slots);

  const std::size_t threads = std::max<std::size_t>(config.threads, 2);
  const milliseconds timeout = options.liveness_timeout;

  SemaphoreSpec counting = spec;
  counting.initial = 1;
  report.checks.push_back(check_conservation(counting, threads, options.ops, timeout));
  report.checks.push_back(check_fife(spec, threads, options.admissions, timeout));
  report.checks.push_back(
      check_bounded_spinning(spec, threads, options.spin_duration, timeout));
  report.checks.push_back(
      check_liveness(spec, 2 * twa::online_cpus() + 2, options.ops / 10, timeout));
  report.checks.push_back(check_sequential_equivalence(spec, options.schedules, config.seed,
                                                       milliseconds(5000)));
  report.checks.push_back(check_chain_conservation(4, options.chain_pushes, timeout));
  report.checks.push_back(check_chain_window(options.window_trials, timeout));

  BenchConfig fixed = config;
  fixed.runs = std::min<std::size_t>(config.runs, 3);
  if (fixed.fixed_iterations == 0) fixed.fixed_iterations = 10000;
  report.checks.push_back(check_determinism(fixed, 4 * timeout));
  return report;
}

}  // namespace semabench
