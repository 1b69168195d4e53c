#pragma once

#include <cstdint>
#include <random>

namespace spfrcs {

// mt19937_64 output is bit-exact across platforms; the standard library
// distributions are not, so draws are mapped to ranges by hand.

inline double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double next_real(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * next_unit(rng);
}

inline std::size_t next_index(std::mt19937_64& rng, std::size_t n) {
  return n == 0 ? 0 : static_cast<std::size_t>(rng() % n);
}

}  // namespace spfrcs
