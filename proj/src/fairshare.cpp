#include "spfrcs/fairshare.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

namespace spfrcs {

namespace {

struct LinkIndex {
  std::vector<const Link*> links;
  std::vector<std::vector<int>> flows;  // flow indices per link slot
  std::unordered_map<int, int> slot_of;

  explicit LinkIndex(const Instance& instance) {
    links.reserve(instance.topology.links.size());
    for (const Link& link : instance.topology.links) {
      slot_of.emplace(link.id, static_cast<int>(links.size()));
      links.push_back(&link);
    }
    flows.resize(links.size());
    for (std::size_t fi = 0; fi < instance.flows.size(); ++fi) {
      for (int link_id : instance.flows[fi].path) {
        auto it = slot_of.find(link_id);
        if (it == slot_of.end())
          throw std::invalid_argument("unknown link " +
                                      std::to_string(link_id) + " in flow " +
                                      std::to_string(instance.flows[fi].id));
        flows[it->second].push_back(static_cast<int>(fi));
      }
    }
  }
};

const ControlStatus* status_of(const StatusMap& statuses, int flow_id) {
  auto it = statuses.find(flow_id);
  return it == statuses.end() ? nullptr : &it->second;
}

}  // namespace

Allocation allocate(const Instance& instance, const StatusMap& statuses) {
  const auto& flows = instance.flows;
  for (const auto& [id, status] : statuses) {
    (void)status;
    if (!instance.find_flow(id))
      throw std::invalid_argument("status for unknown flow " +
                                  std::to_string(id));
  }

  LinkIndex index(instance);
  const int n_links = static_cast<int>(index.links.size());

  std::vector<bool> controlled(flows.size(), false);
  std::vector<double> rate(flows.size(), 0.0);
  for (std::size_t fi = 0; fi < flows.size(); ++fi) {
    if (const ControlStatus* s = status_of(statuses, flows[fi].id);
        s && s->controlled) {
      controlled[fi] = true;
      rate[fi] = s->rate;
    }
  }

  // residual = capacity minus pinned rates minus already-frozen shares;
  // unfrozen counts the uncontrolled flows still riding the water level.
  std::vector<double> residual(n_links);
  std::vector<int> unfrozen(n_links, 0);
  for (int li = 0; li < n_links; ++li) {
    double pinned = 0.0;
    for (int fi : index.flows[li]) {
      if (controlled[fi])
        pinned += rate[fi];
      else
        ++unfrozen[li];
    }
    residual[li] = index.links[li]->capacity - pinned;
    if (residual[li] < -kEps)
      throw InfeasibleError("controlled rates overload link " +
                                std::to_string(index.links[li]->id),
                            index.links[li]->id);
  }

  // Progressive filling: all unfrozen flows share one rising water level.
  // Each round the tightest links saturate; their flows freeze at the level
  // where that happens and stop counting against the rest.
  std::vector<bool> frozen(flows.size(), false);
  std::vector<int> bottleneck(flows.size(), -1);
  int remaining = 0;
  for (std::size_t fi = 0; fi < flows.size(); ++fi)
    if (!controlled[fi]) ++remaining;

  while (remaining > 0) {
    double level = std::numeric_limits<double>::infinity();
    for (int li = 0; li < n_links; ++li) {
      if (unfrozen[li] == 0) continue;
      level = std::min(level, residual[li] / unfrozen[li]);
    }
    level = std::max(level, 0.0);

    std::vector<int> newly;
    for (int li = 0; li < n_links; ++li) {
      if (unfrozen[li] == 0) continue;
      if (residual[li] / unfrozen[li] > level + kEps) continue;
      for (int fi : index.flows[li]) {
        if (controlled[fi] || frozen[fi]) continue;
        frozen[fi] = true;
        rate[fi] = level;
        bottleneck[fi] = index.links[li]->id;
        newly.push_back(fi);
      }
    }
    for (int fi : newly) {
      for (int link_id : flows[fi].path) {
        int li = index.slot_of.at(link_id);
        residual[li] -= rate[fi];
        --unfrozen[li];
      }
      --remaining;
    }
  }

  Allocation out;
  for (std::size_t fi = 0; fi < flows.size(); ++fi) {
    out.rates[flows[fi].id] = rate[fi];
    if (!controlled[fi]) out.bottleneck[flows[fi].id] = bottleneck[fi];
  }
  return out;
}

std::set<int> unsatisfied_flows(const Instance& instance,
                                const Allocation& allocation) {
  std::set<int> out;
  for (const Flow& flow : instance.flows) {
    auto it = allocation.rates.find(flow.id);
    if (it == allocation.rates.end())
      throw std::invalid_argument("allocation misses flow " +
                                  std::to_string(flow.id));
    if (it->second < flow.demand - kEps) out.insert(flow.id);
  }
  return out;
}

bool check_maxmin(const Instance& instance, const StatusMap& statuses,
                  const Allocation& allocation) {
  LinkIndex index(instance);

  for (const Flow& flow : instance.flows)
    if (!allocation.rates.count(flow.id)) return false;

  // (a) capacities respected
  std::vector<double> load(index.links.size(), 0.0);
  for (std::size_t li = 0; li < index.links.size(); ++li) {
    for (int fi : index.flows[li])
      load[li] += allocation.rates.at(instance.flows[fi].id);
    if (load[li] > index.links[li]->capacity + kEps) return false;
  }

  for (const Flow& flow : instance.flows) {
    const ControlStatus* s = status_of(statuses, flow.id);
    const double r = allocation.rates.at(flow.id);
    if (s && s->controlled) {
      // (c) pinned flows carry exactly their rate
      if (std::abs(r - s->rate) > kEps) return false;
      continue;
    }
    // (b) a saturated path link where this rate is maximal among the
    // uncontrolled flows there
    bool found = false;
    for (int link_id : flow.path) {
      int li = index.slot_of.at(link_id);
      if (index.links[li]->capacity - load[li] > kEps) continue;
      bool maximal = true;
      for (int fi : index.flows[li]) {
        const Flow& other = instance.flows[fi];
        const ControlStatus* os = status_of(statuses, other.id);
        if (os && os->controlled) continue;
        if (allocation.rates.at(other.id) > r + kEps) {
          maximal = false;
          break;
        }
      }
      if (maximal) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace spfrcs
