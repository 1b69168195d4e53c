#pragma once

#include "spfrcs/jfsrd.hpp"

namespace spfrcs {

class SizeGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything left to TCP; reports how many flows fall short.
Solution pure_tcp(const Instance& instance);

// Grows the controlled set in ascending flow-id order, each flow pinned at
// exactly its demand, stopping at the first prefix TCP can finish off.
Solution baseline(const Instance& instance);

inline constexpr int kOracleMaxFlows = 12;
inline constexpr int kOracleMaxLinks = 10;

// min demand / 4 (1.0 for an empty instance).
double default_oracle_delta(const Instance& instance);

// Exhaustive search over controlled subsets by ascending cardinality and,
// per subset, over rate vectors on the grid {demand + k*delta} capped by path
// capacities. Optimal within the grid. Guarded to kOracleMaxFlows /
// kOracleMaxLinks; delta <= 0 selects the default.
Solution exact_oracle(const Instance& instance, double delta = 0.0);

}  // namespace spfrcs
