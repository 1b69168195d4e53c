#pragma once

#include <map>
#include <set>

#include "spfrcs/netmodel.hpp"

namespace spfrcs {

struct Allocation {
  std::map<int, double> rates;    // flow id -> allocated rate
  std::map<int, int> bottleneck;  // uncontrolled flow id -> saturating link

  bool operator==(const Allocation&) const = default;
};

// Steady-state rates: controlled flows consume exactly their pinned rates,
// uncontrolled flows share the residual capacity max-min fairly (progressive
// filling). Throws InfeasibleError when the pinned rates alone overload a
// link.
Allocation allocate(const Instance& instance, const StatusMap& statuses);

// Flows whose allocated rate falls short of their demand (beyond kEps).
std::set<int> unsatisfied_flows(const Instance& instance,
                                const Allocation& allocation);

// Bottleneck characterization of max-min fairness: capacities respected,
// every uncontrolled flow has a saturated path link where its rate is maximal
// among uncontrolled flows, controlled flows carry exactly their pinned
// rates. Validates an allocation without re-running the filling loop.
bool check_maxmin(const Instance& instance, const StatusMap& statuses,
                  const Allocation& allocation);

}  // namespace spfrcs
