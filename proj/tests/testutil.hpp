#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "spfrcs/netmodel.hpp"
#include "spfrcs/rng.hpp"

namespace spfrcs::testutil {

inline Link L(int id, std::string src, std::string dst, double capacity) {
  return {id, std::move(src), std::move(dst), capacity};
}

inline Flow F(int id, std::vector<int> path, double demand,
              double priority = 1.0) {
  return {id, std::move(path), demand, priority};
}

// Three flows funneling through one shared link of the given capacity, each
// entering over its own wide ingress link. Demands default to {7.5, 2.5,
// 2.5}: one flow asks for more than the equal share.
inline Instance funnel_instance(double shared_capacity = 12.9,
                                std::vector<double> demands = {7.5, 2.5,
                                                               2.5}) {
  Instance instance;
  instance.topology.nodes = {"s0", "s1", "s2", "m", "t"};
  instance.topology.links = {
      L(0, "s0", "m", 100.0),
      L(1, "s1", "m", 100.0),
      L(2, "s2", "m", 100.0),
      L(3, "m", "t", shared_capacity),
  };
  for (int i = 0; i < 3; ++i)
    instance.flows.push_back(F(i, {i, 3}, demands[i]));
  return instance;
}

// Small random instance plus per-link-feasible controlled rates, for
// property tests. Paths are loop-free random walks; capacities are drawn
// with enough headroom that the pinned rates always fit.
struct RandomCase {
  Instance instance;
  StatusMap statuses;
};

inline RandomCase random_case(std::mt19937_64& rng, bool with_controlled = true) {
  RandomCase out;
  Topology& topo = out.instance.topology;

  const int n_nodes = 3 + static_cast<int>(next_index(rng, 4));  // 3..6
  for (int i = 0; i < n_nodes; ++i) topo.nodes.push_back("v" + std::to_string(i));

  // A ring keeps everything reachable; a few extra chords add overlap.
  int id = 0;
  std::set<std::pair<int, int>> used;
  for (int i = 0; i < n_nodes; ++i) {
    topo.links.push_back(L(id++, topo.nodes[i], topo.nodes[(i + 1) % n_nodes], 1.0));
    used.insert({i, (i + 1) % n_nodes});
  }
  const int extra = static_cast<int>(next_index(rng, 3));
  for (int k = 0; k < extra; ++k) {
    int a = static_cast<int>(next_index(rng, n_nodes));
    int b = static_cast<int>(next_index(rng, n_nodes));
    if (a == b || used.count({a, b})) continue;
    used.insert({a, b});
    topo.links.push_back(L(id++, topo.nodes[a], topo.nodes[b], 1.0));
  }

  std::map<std::string, std::vector<const Link*>> adj;
  for (const Link& link : topo.links) adj[link.src].push_back(&link);

  const int n_flows = 1 + static_cast<int>(next_index(rng, 6));  // 1..6
  for (int f = 0; f < n_flows; ++f) {
    Flow flow;
    flow.id = f;
    flow.demand = next_real(rng, 0.5, 4.0);
    flow.priority = next_real(rng, 0.5, 2.0);
    std::string at = topo.nodes[next_index(rng, topo.nodes.size())];
    std::set<int> walked;
    const int len = 1 + static_cast<int>(next_index(rng, 4));
    for (int step = 0; step < len; ++step) {
      const auto& options = adj[at];
      if (options.empty()) break;
      const Link* pick = options[next_index(rng, options.size())];
      if (walked.count(pick->id)) break;
      walked.insert(pick->id);
      flow.path.push_back(pick->id);
      at = pick->dst;
    }
    if (flow.path.empty()) flow.path.push_back(static_cast<int>(next_index(rng, topo.links.size())));
    out.instance.flows.push_back(std::move(flow));
  }

  if (with_controlled) {
    for (const Flow& flow : out.instance.flows)
      if (next_unit(rng) < 0.35)
        out.statuses[flow.id] =
            ControlStatus::pinned(flow.demand * next_real(rng, 1.0, 1.3));
  }

  // Capacity: enough for the pinned rates, and a random amount of room
  // around the total demand so both tight and slack links occur.
  for (Link& link : topo.links) {
    double pinned = 0.0;
    double demand = 0.0;
    for (const Flow& flow : out.instance.flows) {
      if (std::find(flow.path.begin(), flow.path.end(), link.id) ==
          flow.path.end())
        continue;
      demand += flow.demand;
      auto it = out.statuses.find(flow.id);
      if (it != out.statuses.end()) pinned += it->second.rate;
    }
    link.capacity =
        std::max(pinned * next_real(rng, 1.0, 1.4) + 0.1,
                 demand * next_real(rng, 0.6, 1.6) + 0.1);
  }
  return out;
}

}  // namespace spfrcs::testutil
