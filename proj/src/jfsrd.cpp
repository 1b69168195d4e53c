#include "spfrcs/jfsrd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace spfrcs {

int LinkConfiguration::controlled_count() const {
  int n = 0;
  for (const auto& [id, status] : assignment) {
    (void)id;
    if (status.controlled) ++n;
  }
  return n;
}

double LinkConfiguration::assigned_sum() const {
  double sum = 0.0;
  for (const auto& [id, status] : assignment) {
    (void)id;
    sum += status.controlled ? status.rate : target_rate;
  }
  return sum;
}

bool LinkConfiguration::controls(int flow_id) const {
  auto it = assignment.find(flow_id);
  return it != assignment.end() && it->second.controlled;
}

namespace {

const Link& link_or_throw(const Instance& instance, int link_id) {
  const Link* link = instance.topology.find_link(link_id);
  if (!link)
    throw std::invalid_argument("unknown link " + std::to_string(link_id));
  return *link;
}

std::vector<const Flow*> link_flows(const Instance& instance, int link_id) {
  std::vector<const Flow*> out;
  for (const Flow& flow : instance.flows)
    for (int id : flow.path)
      if (id == link_id) {
        out.push_back(&flow);
        break;
      }
  return out;
}

// Links ordered by descending correlation, ties by ascending link id;
// only links that carry at least one flow.
std::vector<int> correlation_order(const Instance& instance) {
  std::vector<std::pair<int, int>> scored;  // (gamma, link id)
  for (const Link& link : instance.topology.links) {
    if (link_flows(instance, link.id).empty()) continue;
    scored.emplace_back(correlation(instance, link.id), link.id);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<int> out;
  out.reserve(scored.size());
  for (const auto& [gamma, id] : scored) {
    (void)gamma;
    out.push_back(id);
  }
  return out;
}

}  // namespace

std::vector<LinkConfiguration> candidate_configurations(
    const Instance& instance, int link_id) {
  const Link& link = link_or_throw(instance, link_id);
  std::vector<const Flow*> flows = link_flows(instance, link_id);
  if (flows.empty()) return {};

  double demand_sum = 0.0;
  for (const Flow* f : flows) demand_sum += f->demand;
  const double budget = link.capacity - demand_sum;
  if (budget < -kEps)
    throw InfeasibleError(
        "demands overload link " + std::to_string(link_id), link_id);

  std::vector<double> targets;
  for (const Flow* f : flows) targets.push_back(f->demand);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  // Raising order: largest demand first, i.e. cheapest gap first.
  std::vector<const Flow*> by_gap = flows;
  std::sort(by_gap.begin(), by_gap.end(), [](const Flow* a, const Flow* b) {
    if (a->demand != b->demand) return a->demand > b->demand;
    return a->id < b->id;
  });

  std::vector<LinkConfiguration> out;
  for (double target : targets) {
    LinkConfiguration cfg;
    cfg.link_id = link_id;
    cfg.target_rate = target;
    double left = budget;
    for (const Flow* f : by_gap) {
      if (f->demand > target) {
        cfg.assignment[f->id] = ControlStatus::pinned(f->demand);
        continue;
      }
      const double gap = target - f->demand;
      if (gap <= left + kEps) {
        left -= gap;
        cfg.assignment[f->id] = ControlStatus::uncontrolled();
      } else {
        cfg.assignment[f->id] = ControlStatus::pinned(f->demand);
      }
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

int correlation(const Instance& instance, int link_id) {
  link_or_throw(instance, link_id);

  std::unordered_set<int> on_link;
  std::unordered_set<int> touched;  // links used by flows on link_id
  for (const Flow& flow : instance.flows) {
    bool here = false;
    for (int id : flow.path)
      if (id == link_id) {
        here = true;
        break;
      }
    if (!here) continue;
    on_link.insert(flow.id);
    for (int id : flow.path) touched.insert(id);
  }

  int gamma = 0;
  for (const Flow& flow : instance.flows) {
    if (on_link.count(flow.id)) continue;
    for (int id : flow.path)
      if (touched.count(id)) {
        ++gamma;
        break;
      }
  }
  return gamma;
}

double configuration_profit(const LinkConfiguration& config,
                            const std::vector<LinkConfiguration>& peers) {
  int total = 0;
  int shared = 0;
  for (const auto& [flow_id, status] : config.assignment) {
    if (!status.controlled) continue;
    ++total;
    for (const LinkConfiguration& peer : peers) {
      if (peer.link_id == config.link_id) continue;
      if (peer.controls(flow_id)) {
        ++shared;
        break;
      }
    }
  }
  if (total == 0) return 1.0;
  return static_cast<double>(shared) / total;
}

FlowSelectionResult flow_selection(const Instance& instance) {
  std::vector<int> order = correlation_order(instance);

  std::unordered_map<int, std::vector<LinkConfiguration>> candidates;
  for (int link_id : order)
    candidates.emplace(link_id, candidate_configurations(instance, link_id));

  // Profit peers: links already examined count only through the
  // configuration actually selected for them; unexamined links still offer
  // every candidate. Scoring against discarded candidates would credit
  // controlled flows nobody ends up paying for.
  std::vector<LinkConfiguration> peers;
  for (int link_id : order)
    for (const LinkConfiguration& cfg : candidates.at(link_id))
      peers.push_back(cfg);

  FlowSelectionResult result;
  for (int link_id : order) {
    const auto& cfgs = candidates.at(link_id);
    const LinkConfiguration* best = nullptr;
    double best_profit = -1.0;
    for (const LinkConfiguration& cfg : cfgs) {
      const double profit = configuration_profit(cfg, peers);
      bool better = false;
      if (profit > best_profit) {
        better = true;
      } else if (profit == best_profit && best) {
        const int c = cfg.controlled_count();
        const int bc = best->controlled_count();
        better = c < bc || (c == bc && cfg.target_rate < best->target_rate);
      }
      if (better) {
        best = &cfg;
        best_profit = profit;
      }
    }
    if (best) {
      std::erase_if(peers, [&](const LinkConfiguration& cfg) {
        return cfg.link_id == link_id;
      });
      peers.push_back(*best);
      result.selected.emplace(link_id, *best);
    }
  }

  // A flow is controlled iff some selected configuration controls it, at the
  // highest rate any selecting link assigned.
  for (const Flow& flow : instance.flows) {
    double pinned = -1.0;
    for (const auto& [link_id, cfg] : result.selected) {
      (void)link_id;
      auto it = cfg.assignment.find(flow.id);
      if (it != cfg.assignment.end() && it->second.controlled)
        pinned = std::max(pinned, it->second.rate);
    }
    result.statuses[flow.id] = pinned < 0 ? ControlStatus::uncontrolled()
                                          : ControlStatus::pinned(pinned);
  }
  return result;
}

namespace {

struct RdIndex {
  std::unordered_map<int, const Link*> link_of;
  std::unordered_map<int, std::vector<const Flow*>> flows_of;

  explicit RdIndex(const Instance& instance) {
    for (const Link& link : instance.topology.links)
      link_of.emplace(link.id, &link);
    for (const Flow& flow : instance.flows)
      for (int id : flow.path) flows_of[id].push_back(&flow);
  }
};

// Residual of every link with pinned flows at their rates and everything
// else reserved at its demand. This is the raisable budget: consuming it
// caps what a released flow could grab without touching any guarantee.
std::unordered_map<int, double> reserved_residuals(const Instance& instance,
                                                   const RdIndex& index,
                                                   const StatusMap& statuses) {
  std::unordered_map<int, double> out;
  for (const Link& link : instance.topology.links) {
    double used = 0.0;
    auto it = index.flows_of.find(link.id);
    if (it != index.flows_of.end())
      for (const Flow* f : it->second) {
        const ControlStatus& s = statuses.at(f->id);
        used += s.controlled ? s.rate : f->demand;
      }
    out[link.id] = link.capacity - used;
  }
  return out;
}

}  // namespace

Solution rate_determination(const Instance& instance,
                            const FlowSelectionResult& fs,
                            const std::set<int>& extra_temporary) {
  RdIndex index(instance);
  StatusMap statuses;
  for (const Flow& flow : instance.flows) {
    auto it = fs.statuses.find(flow.id);
    statuses[flow.id] =
        it == fs.statuses.end() ? ControlStatus::uncontrolled() : it->second;
  }

  for (int link_id : correlation_order(instance)) {
    auto fit = index.flows_of.find(link_id);
    if (fit == index.flows_of.end()) continue;
    const std::vector<const Flow*>& here = fit->second;

    const LinkConfiguration* cfg = nullptr;
    if (auto sit = fs.selected.find(link_id); sit != fs.selected.end())
      cfg = &sit->second;

    // Temporarily controlled: pinned right now, but this link's
    // configuration (or a dynamic event) expected TCP to carry them.
    std::vector<const Flow*> tc;
    for (const Flow* f : here) {
      if (!statuses.at(f->id).controlled) continue;
      bool unc_here = false;
      if (cfg) {
        auto ait = cfg->assignment.find(f->id);
        unc_here = ait != cfg->assignment.end() && !ait->second.controlled;
      }
      if (unc_here || extra_temporary.count(f->id)) tc.push_back(f);
    }
    if (tc.empty()) continue;

    // A hand-back that works without any raise costs nothing.
    StatusMap plain = statuses;
    for (const Flow* f : tc) plain.at(f->id) = ControlStatus::uncontrolled();
    if (unsatisfied_flows(instance, allocate(instance, plain)).empty()) {
      statuses = std::move(plain);
      continue;
    }

    auto residual = reserved_residuals(instance, index, statuses);

    // Raise the remaining pinned flows into this link's residual,
    // proportionally to priority, dropping a riser as soon as any link on
    // its path fills up.
    StatusMap raised = statuses;
    std::vector<const Flow*> risers;
    for (const Flow* f : here) {
      if (!statuses.at(f->id).controlled) continue;
      bool is_tc = false;
      for (const Flow* t : tc)
        if (t == f) is_tc = true;
      if (is_tc) continue;
      double slack = std::numeric_limits<double>::infinity();
      for (int id : f->path) slack = std::min(slack, residual.at(id));
      if (slack > kEps) risers.push_back(f);
    }

    while (!risers.empty() && residual.at(link_id) > kEps) {
      std::unordered_map<int, double> weight;  // link id -> priority sum
      for (const Flow* f : risers)
        for (int id : f->path) weight[id] += f->priority;

      double step = std::numeric_limits<double>::infinity();
      for (const auto& [id, w] : weight)
        step = std::min(step, residual.at(id) / w);

      for (const Flow* f : risers) raised.at(f->id).rate += f->priority * step;
      for (const auto& [id, w] : weight) residual.at(id) -= w * step;

      std::vector<const Flow*> still;
      for (const Flow* f : risers) {
        double slack = std::numeric_limits<double>::infinity();
        for (int id : f->path) slack = std::min(slack, residual.at(id));
        if (slack > kEps) still.push_back(f);
      }
      risers.swap(still);
    }

    // Commit the raises plus the hand-back only when everyone stays
    // satisfied; otherwise the link is left untouched.
    StatusMap released = raised;
    for (const Flow* f : tc)
      released.at(f->id) = ControlStatus::uncontrolled();
    if (unsatisfied_flows(instance, allocate(instance, released)).empty()) {
      statuses = std::move(released);
    }
  }

  return make_solution(instance, std::move(statuses));
}

Solution solve(const Instance& instance) {
  return rate_determination(instance, flow_selection(instance));
}

Solution make_solution(const Instance& instance, StatusMap statuses) {
  for (const Flow& flow : instance.flows)
    statuses.try_emplace(flow.id, ControlStatus::uncontrolled());
  Solution out;
  out.allocation = allocate(instance, statuses);
  out.metrics.unsatisfied =
      static_cast<int>(unsatisfied_flows(instance, out.allocation).size());
  int controlled = 0;
  for (const auto& [id, status] : statuses) {
    (void)id;
    if (status.controlled) ++controlled;
  }
  out.metrics.controlled = controlled;
  out.statuses = std::move(statuses);
  return out;
}

}  // namespace spfrcs
