#include "spfrcs/dynamics.hpp"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"

namespace spfrcs {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

Event Event::make_join(int t, Flow flow) {
  Event e;
  e.kind = Kind::join;
  e.t = t;
  e.flow = std::move(flow);
  e.flow_id = e.flow.id;
  return e;
}

Event Event::make_leave(int t, int flow_id) {
  Event e;
  e.kind = Kind::leave;
  e.t = t;
  e.flow_id = flow_id;
  return e;
}

Event Event::make_increase(int t, int flow_id, double new_demand) {
  Event e;
  e.kind = Kind::demand_increase;
  e.t = t;
  e.flow_id = flow_id;
  e.new_demand = new_demand;
  return e;
}

Event Event::make_decrease(int t, int flow_id, double new_demand) {
  Event e;
  e.kind = Kind::demand_decrease;
  e.t = t;
  e.flow_id = flow_id;
  e.new_demand = new_demand;
  return e;
}

Event parse_event_line(const std::string& line) {
  json doc;
  try {
    doc = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_object()) throw ParseError("event must be an object");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    if (key != "t" && key != "kind" && key != "flow" && key != "id" &&
        key != "demand")
      throw ParseError("unknown field \"" + key + "\" in event");
  }
  if (!doc.contains("kind")) throw ParseError("event misses \"kind\"");
  const std::string kind = doc["kind"].get<std::string>();
  const int t = doc.value("t", 0);

  if (kind == "join") {
    if (!doc.contains("flow")) throw ParseError("join event misses \"flow\"");
    const json& f = doc["flow"];
    Flow flow;
    flow.id = f.at("id").get<int>();
    flow.path = f.at("path").get<std::vector<int>>();
    flow.demand = f.at("demand").get<double>();
    flow.priority = f.value("priority", 1.0);
    return Event::make_join(t, std::move(flow));
  }
  if (!doc.contains("id")) throw ParseError("event misses \"id\"");
  const int id = doc["id"].get<int>();
  if (kind == "leave") return Event::make_leave(t, id);
  if (kind == "inc")
    return Event::make_increase(t, id, doc.at("demand").get<double>());
  if (kind == "dec")
    return Event::make_decrease(t, id, doc.at("demand").get<double>());
  throw ParseError("unknown event kind \"" + kind + "\"");
}

std::string serialize_event(const Event& event) {
  ordered_json doc;
  doc["t"] = event.t;
  switch (event.kind) {
    case Event::Kind::join: {
      doc["kind"] = "join";
      ordered_json f;
      f["id"] = event.flow.id;
      f["path"] = event.flow.path;
      f["demand"] = event.flow.demand;
      f["priority"] = event.flow.priority;
      doc["flow"] = std::move(f);
      break;
    }
    case Event::Kind::leave:
      doc["kind"] = "leave";
      doc["id"] = event.flow_id;
      break;
    case Event::Kind::demand_increase:
      doc["kind"] = "inc";
      doc["id"] = event.flow_id;
      doc["demand"] = event.new_demand;
      break;
    case Event::Kind::demand_decrease:
      doc["kind"] = "dec";
      doc["id"] = event.flow_id;
      doc["demand"] = event.new_demand;
      break;
  }
  return doc.dump();
}

const char* to_string(EventOutcome::Action action) {
  switch (action) {
    case EventOutcome::Action::none:
      return "none";
    case EventOutcome::Action::full_solve:
      return "full-solve";
    case EventOutcome::Action::rd_rerun:
      return "rd";
  }
  return "?";
}

namespace {

// Remaining per-link headroom against raw demands; a join or demand bump may
// not push any link's demand sum past its capacity.
void check_demand_headroom(const Instance& instance, const Flow& candidate,
                           double extra_demand) {
  std::unordered_map<int, double> sums;
  for (const Flow& flow : instance.flows)
    for (int id : flow.path) sums[id] += flow.demand;
  for (int id : candidate.path) {
    const Link* link = instance.topology.find_link(id);
    if (sums[id] + extra_demand > link->capacity + kEps)
      throw InfeasibleError("demands would overload link " +
                                std::to_string(id),
                            id);
  }
}

}  // namespace

DynamicState::DynamicState(Instance initial) : instance_(std::move(initial)) {
  auto violations = validate_instance(instance_);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  solution_ = pure_solution();
  if (solution_.metrics.unsatisfied > 0) full_solve();
}

Solution DynamicState::pure_solution() const {
  return make_solution(instance_, {});
}

void DynamicState::full_solve() {
  post_fs_ = flow_selection(instance_);
  solution_ = rate_determination(instance_, post_fs_);
  bootstrapped_ = true;
}

void DynamicState::validate_event(const Event& event) const {
  switch (event.kind) {
    case Event::Kind::join: {
      const Flow& f = event.flow;
      if (instance_.find_flow(f.id))
        throw std::invalid_argument("join reuses flow id " +
                                    std::to_string(f.id));
      Instance probe = instance_;
      probe.flows.push_back(f);
      auto violations = validate_instance(probe);
      if (!violations.empty()) throw ValidationError(std::move(violations));
      check_demand_headroom(instance_, f, f.demand);
      break;
    }
    case Event::Kind::leave:
      if (!instance_.find_flow(event.flow_id))
        throw std::invalid_argument("leave of unknown flow " +
                                    std::to_string(event.flow_id));
      break;
    case Event::Kind::demand_increase: {
      const Flow* f = instance_.find_flow(event.flow_id);
      if (!f)
        throw std::invalid_argument("demand change of unknown flow " +
                                    std::to_string(event.flow_id));
      if (event.new_demand <= f->demand + kEps)
        throw std::invalid_argument("demand increase must raise the demand");
      check_demand_headroom(instance_, *f, event.new_demand - f->demand);
      break;
    }
    case Event::Kind::demand_decrease: {
      const Flow* f = instance_.find_flow(event.flow_id);
      if (!f)
        throw std::invalid_argument("demand change of unknown flow " +
                                    std::to_string(event.flow_id));
      if (event.new_demand >= f->demand - kEps || event.new_demand <= 0)
        throw std::invalid_argument("demand decrease must lower the demand");
      break;
    }
  }
}

// Controlled-in-snapshot flows (and post-snapshot joiners that are still
// pinned) come back controlled at their *current* demand: tracing back
// forgets raises and stale demands, which keeps the pinned load bounded by
// the demand sums the event guards checked.
StatusMap DynamicState::traced_back_statuses(int changed_flow_id) const {
  StatusMap out;
  for (const Flow& flow : instance_.flows) {
    if (flow.id == changed_flow_id) continue;
    bool controlled;
    if (auto snap = post_fs_.statuses.find(flow.id);
        snap != post_fs_.statuses.end()) {
      controlled = snap->second.controlled;
    } else {
      auto cur = solution_.statuses.find(flow.id);
      controlled = cur != solution_.statuses.end() && cur->second.controlled;
    }
    out[flow.id] = controlled ? ControlStatus::pinned(flow.demand)
                              : ControlStatus::uncontrolled();
  }
  return out;
}

// Pins every still-unsatisfied flow at its demand until the allocation
// covers everyone; returns the set of flows pinned here.
std::set<int> DynamicState::ensure_feasible(StatusMap& statuses) const {
  std::set<int> pinned;
  while (true) {
    Allocation alloc = allocate(instance_, statuses);
    std::set<int> unsat = unsatisfied_flows(instance_, alloc);
    if (unsat.empty()) return pinned;
    for (int id : unsat) {
      statuses[id] = ControlStatus::pinned(instance_.find_flow(id)->demand);
      pinned.insert(id);
    }
  }
}

void DynamicState::rerun_rd(StatusMap statuses, std::set<int> temporary) {
  auto extra = ensure_feasible(statuses);
  temporary.insert(extra.begin(), extra.end());
  FlowSelectionResult fs;
  fs.statuses = std::move(statuses);
  fs.selected = post_fs_.selected;
  solution_ = rate_determination(instance_, fs, temporary);
}

EventOutcome DynamicState::handle_pre_bootstrap(const Event& event) {
  switch (event.kind) {
    case Event::Kind::join:
      instance_.flows.push_back(event.flow);
      break;
    case Event::Kind::leave:
      std::erase_if(instance_.flows,
                    [&](const Flow& f) { return f.id == event.flow_id; });
      break;
    case Event::Kind::demand_increase:
    case Event::Kind::demand_decrease:
      for (Flow& f : instance_.flows)
        if (f.id == event.flow_id) f.demand = event.new_demand;
      break;
  }
  solution_ = pure_solution();
  if (solution_.metrics.unsatisfied == 0) return {EventOutcome::Action::none, false};
  full_solve();
  return {EventOutcome::Action::full_solve, true};
}

EventOutcome DynamicState::apply_event(const Event& event) {
  validate_event(event);

  if (!bootstrapped_) {
    EventOutcome outcome = handle_pre_bootstrap(event);
    if (bootstrapped_) ++events_since_recompute_;
    return outcome;
  }

  ++events_since_recompute_;
  const StatusMap before = solution_.statuses;

  switch (event.kind) {
    case Event::Kind::demand_decrease: {
      for (Flow& f : instance_.flows)
        if (f.id == event.flow_id) f.demand = event.new_demand;
      // Still satisfied by the same configuration; nothing moves.
      return {EventOutcome::Action::none, false};
    }

    case Event::Kind::demand_increase: {
      const ControlStatus& status = solution_.statuses.at(event.flow_id);
      const double current = status.controlled
                                 ? status.rate
                                 : solution_.allocation.rates.at(event.flow_id);
      for (Flow& f : instance_.flows)
        if (f.id == event.flow_id) f.demand = event.new_demand;
      if (current >= event.new_demand - kEps)
        return {EventOutcome::Action::none, false};

      StatusMap statuses = traced_back_statuses(event.flow_id);
      statuses[event.flow_id] = ControlStatus::pinned(event.new_demand);
      rerun_rd(std::move(statuses), {event.flow_id});
      return {EventOutcome::Action::rd_rerun,
              solution_.statuses != before};
    }

    case Event::Kind::leave: {
      std::erase_if(instance_.flows,
                    [&](const Flow& f) { return f.id == event.flow_id; });
      StatusMap statuses = solution_.statuses;
      statuses.erase(event.flow_id);
      Allocation alloc = allocate(instance_, statuses);
      std::set<int> unsat = unsatisfied_flows(instance_, alloc);
      if (unsat.empty()) {
        solution_ = make_solution(instance_, std::move(statuses));
        return {EventOutcome::Action::none, false};
      }
      std::set<int> temporary;
      for (int id : unsat) {
        statuses[id] = ControlStatus::pinned(instance_.find_flow(id)->demand);
        temporary.insert(id);
      }
      rerun_rd(std::move(statuses), std::move(temporary));
      return {EventOutcome::Action::rd_rerun,
              solution_.statuses != before};
    }

    case Event::Kind::join: {
      instance_.flows.push_back(event.flow);
      StatusMap statuses = traced_back_statuses(event.flow.id);
      statuses[event.flow.id] = ControlStatus::pinned(event.flow.demand);
      rerun_rd(std::move(statuses), {event.flow.id});
      return {EventOutcome::Action::rd_rerun,
              solution_.statuses != before};
    }
  }
  return {};
}

void DynamicState::periodic_recompute() {
  full_solve();
  events_since_recompute_ = 0;
}

}  // namespace spfrcs
