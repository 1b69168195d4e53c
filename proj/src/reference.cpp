#include "spfrcs/reference.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <unordered_map>

namespace spfrcs {

Solution pure_tcp(const Instance& instance) {
  return make_solution(instance, {});
}

Solution baseline(const Instance& instance) {
  std::vector<int> ids;
  ids.reserve(instance.flows.size());
  for (const Flow& flow : instance.flows) ids.push_back(flow.id);
  std::sort(ids.begin(), ids.end());

  StatusMap statuses;
  for (std::size_t k = 0; k <= ids.size(); ++k) {
    if (k > 0) {
      const Flow* f = instance.find_flow(ids[k - 1]);
      statuses[f->id] = ControlStatus::pinned(f->demand);
    }
    Allocation alloc = allocate(instance, statuses);
    if (unsatisfied_flows(instance, alloc).empty())
      return make_solution(instance, std::move(statuses));
  }
  throw InfeasibleError("even controlling every flow leaves demands unmet");
}

double default_oracle_delta(const Instance& instance) {
  double min_demand = std::numeric_limits<double>::infinity();
  for (const Flow& flow : instance.flows)
    min_demand = std::min(min_demand, flow.demand);
  return instance.flows.empty() ? 1.0 : min_demand / 4.0;
}

namespace {

// In a satisfying allocation every flow consumes at least its demand and a
// pinned flow consumes exactly its rate, so per link the raises above demand
// can never exceed capacity minus the demand sum. Searching rates beyond
// that headroom is pointless; grids are ascending, so the first unfittable
// value ends the dimension.
struct GridSearch {
  const Instance& instance;
  const std::vector<const Flow*>& subset;
  const std::vector<std::vector<double>>& grids;
  std::unordered_map<int, double> headroom;  // link id -> c - all demands -
                                             // raises committed so far
  StatusMap statuses;

  bool assign(std::size_t i) {
    if (i == subset.size()) {
      Allocation alloc = allocate(instance, statuses);
      return unsatisfied_flows(instance, alloc).empty();
    }
    const Flow* f = subset[i];
    for (double r : grids[i]) {
      bool fits = true;
      for (int id : f->path)
        if (r - f->demand > headroom.at(id) + kEps) {
          fits = false;
          break;
        }
      if (!fits) break;
      for (int id : f->path) headroom.at(id) -= r - f->demand;
      statuses[f->id] = ControlStatus::pinned(r);
      if (assign(i + 1)) return true;
      statuses.erase(f->id);
      for (int id : f->path) headroom.at(id) += r - f->demand;
    }
    return false;
  }
};

}  // namespace

Solution exact_oracle(const Instance& instance, double delta) {
  const int n = static_cast<int>(instance.flows.size());
  if (n > kOracleMaxFlows ||
      static_cast<int>(instance.topology.links.size()) > kOracleMaxLinks)
    throw SizeGuardError("instance exceeds the oracle size guard (" +
                         std::to_string(kOracleMaxFlows) + " flows / " +
                         std::to_string(kOracleMaxLinks) + " links)");
  if (delta <= 0) delta = default_oracle_delta(instance);

  std::vector<const Flow*> flows;
  for (const Flow& flow : instance.flows) flows.push_back(&flow);
  std::sort(flows.begin(), flows.end(),
            [](const Flow* a, const Flow* b) { return a->id < b->id; });

  // Identical flows are interchangeable: only subsets that take a prefix of
  // each identity group need checking.
  std::map<std::tuple<std::vector<int>, double, double>, std::vector<int>>
      groups;
  std::unordered_map<int, int> group_pos;  // flow id -> position in its group
  std::unordered_map<int, const std::vector<int>*> group_of;
  for (const Flow* f : flows) {
    auto& members = groups[{f->path, f->demand, f->priority}];
    group_pos[f->id] = static_cast<int>(members.size());
    members.push_back(f->id);
  }
  for (auto& [key, members] : groups) {
    (void)key;
    for (int id : members) group_of[id] = &members;
  }

  std::unordered_map<int, double> base_headroom;
  for (const Link& link : instance.topology.links) {
    double demand_sum = 0.0;
    for (const Flow& f : instance.flows)
      for (int id : f.path)
        if (id == link.id) demand_sum += f.demand;
    const double room = link.capacity - demand_sum;
    if (room < -kEps)
      throw InfeasibleError(
          "demands overload link " + std::to_string(link.id), link.id);
    base_headroom[link.id] = room;
  }

  // Per-flow rate grid {demand + k*delta} capped by the tightest path link.
  std::unordered_map<int, std::vector<double>> grid_of;
  for (const Flow* f : flows) {
    double cap = std::numeric_limits<double>::infinity();
    for (int id : f->path)
      cap = std::min(cap, instance.topology.find_link(id)->capacity);
    std::vector<double> grid;
    for (double r = f->demand; r <= cap + kEps; r += delta) grid.push_back(r);
    if (grid.empty()) grid.push_back(f->demand);
    grid_of[f->id] = std::move(grid);
  }

  // Flows sharing at least one link; a controlled rate above the demand can
  // only matter when it squeezes some flow left to TCP.
  std::unordered_map<int, std::set<int>> companions;
  for (const Flow* a : flows)
    for (const Flow* b : flows) {
      if (a->id == b->id) continue;
      for (int id : a->path)
        if (std::find(b->path.begin(), b->path.end(), id) != b->path.end()) {
          companions[a->id].insert(b->id);
          break;
        }
    }

  std::vector<int> pick;
  for (int k = 0; k <= n; ++k) {
    pick.assign(k, 0);
    for (int i = 0; i < k; ++i) pick[i] = i;
    while (true) {
      // Canonical under the identity-group symmetry?
      bool canonical = true;
      std::unordered_map<const std::vector<int>*, int> taken;
      for (int i = 0; i < k && canonical; ++i) {
        const Flow* f = flows[pick[i]];
        const auto* members = group_of.at(f->id);
        if (group_pos.at(f->id) != taken[members]) canonical = false;
        ++taken[members];
      }

      if (canonical) {
        std::vector<const Flow*> subset;
        std::vector<std::vector<double>> grids;
        for (int i = 0; i < k; ++i) {
          const Flow* f = flows[pick[i]];
          subset.push_back(f);
          bool squeezes = false;
          for (int other : companions[f->id]) {
            bool in_subset = false;
            for (int j = 0; j < k; ++j)
              if (flows[pick[j]]->id == other) in_subset = true;
            if (!in_subset) {
              squeezes = true;
              break;
            }
          }
          if (squeezes)
            grids.push_back(grid_of.at(f->id));
          else
            grids.push_back({f->demand});
        }
        GridSearch search{instance, subset, grids, base_headroom, {}};
        if (search.assign(0))
          return make_solution(instance, std::move(search.statuses));
      }

      // next k-combination in lexicographic order
      int i = k - 1;
      while (i >= 0 && pick[i] == n - k + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw InfeasibleError("no controlled subset satisfies every demand");
}

}  // namespace spfrcs
