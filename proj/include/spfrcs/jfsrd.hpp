#pragma once

#include <map>
#include <set>
#include <vector>

#include "spfrcs/fairshare.hpp"
#include "spfrcs/netmodel.hpp"

namespace spfrcs {

// Per-link hypothesis built around a target rate: every flow on the link is
// either pinned (controlled) or expected to settle at the target via TCP.
struct LinkConfiguration {
  int link_id = -1;
  double target_rate = 0.0;
  // Uncontrolled entries run at target_rate; controlled entries carry their
  // pinned rate.
  std::map<int, ControlStatus> assignment;

  int controlled_count() const;
  double assigned_sum() const;
  bool controls(int flow_id) const;

  bool operator==(const LinkConfiguration&) const = default;
};

struct SolutionMetrics {
  int controlled = 0;
  int unsatisfied = 0;
  bool operator==(const SolutionMetrics&) const = default;
};

struct Solution {
  StatusMap statuses;
  Allocation allocation;
  SolutionMetrics metrics;
  bool operator==(const Solution&) const = default;
};

struct FlowSelectionResult {
  StatusMap statuses;
  std::map<int, LinkConfiguration> selected;  // keyed by link id
};

// One configuration per distinct demand value among the flows on the link,
// targets ascending. For target t, flows above t stay pinned at their demand
// and flows at or below t are raised to t smallest-gap-first while the raise
// budget (link capacity minus total demand) lasts.
std::vector<LinkConfiguration> candidate_configurations(
    const Instance& instance, int link_id);

// Number of flows not on the link that share at least one link with some
// flow on it.
int correlation(const Instance& instance, int link_id);

// Fraction of the configuration's controlled flows that at least one other
// link's candidate configuration also controls; 1 when nothing is
// controlled. Peer entries for the configuration's own link are ignored.
double configuration_profit(const LinkConfiguration& config,
                            const std::vector<LinkConfiguration>& peers);

// Visits links by descending correlation and keeps the highest-profit
// candidate per link; a flow ends up controlled iff some selected
// configuration controls it.
FlowSelectionResult flow_selection(const Instance& instance);

// Release pass: per link (descending correlation), raise the rates of the
// remaining pinned flows priority-proportionally into the link's residual,
// then try handing the link's temporarily-controlled flows back to TCP;
// the hand-back commits only if every flow stays satisfied. Rate increases
// persist either way. `extra_temporary` marks flows outside the recorded
// configurations (dynamic joins and demand bumps) that the pass may also try
// to release.
Solution rate_determination(const Instance& instance,
                            const FlowSelectionResult& fs,
                            const std::set<int>& extra_temporary = {});

Solution solve(const Instance& instance);

// Allocation + metrics for a fixed status assignment.
Solution make_solution(const Instance& instance, StatusMap statuses);

}  // namespace spfrcs
