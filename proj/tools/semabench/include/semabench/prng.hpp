#pragma once

#include <cstdint>

namespace semabench {

/// One advance of the benchmark PRNG: the splitmix64 increment-and-finalize,
/// used as an iterated function of the state.
constexpr std::uint64_t prng_step(std::uint64_t state) noexcept {
  std::uint64_t z = state + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t prng_advance(std::uint64_t state, std::uint64_t steps) noexcept {
  while (steps-- > 0) state = prng_step(state);
  return state;
}

}  // namespace semabench
