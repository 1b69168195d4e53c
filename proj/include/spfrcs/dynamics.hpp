#pragma once

#include <string>

#include "spfrcs/jfsrd.hpp"

namespace spfrcs {

struct Event {
  enum class Kind { join, leave, demand_increase, demand_decrease };

  Kind kind = Kind::join;
  int t = 0;              // event index
  Flow flow;              // join only
  int flow_id = -1;       // leave / demand changes
  double new_demand = 0;  // demand changes

  static Event make_join(int t, Flow flow);
  static Event make_leave(int t, int flow_id);
  static Event make_increase(int t, int flow_id, double new_demand);
  static Event make_decrease(int t, int flow_id, double new_demand);

  bool operator==(const Event&) const = default;
};

// JSON Lines trace format, one event per line:
//   {"t":0,"kind":"join","flow":{"id":9,"path":[1,2],"demand":2.5,"priority":1.0}}
//   {"t":1,"kind":"leave","id":3}
//   {"t":2,"kind":"inc","id":4,"demand":7.5}
//   {"t":3,"kind":"dec","id":4,"demand":6.0}
Event parse_event_line(const std::string& line);
std::string serialize_event(const Event& event);

struct EventOutcome {
  enum class Action { none, full_solve, rd_rerun };
  Action action = Action::none;
  bool statuses_changed = false;
};

const char* to_string(EventOutcome::Action action);

// Single-writer state machine over the live instance and its current
// solution. Nothing runs until TCP first leaves a demand unsatisfied; from
// then on events are handled by local updates (temporary controls + a
// re-run of the release pass) and the stored solution keeps zero unsatisfied
// flows after every event.
class DynamicState {
 public:
  explicit DynamicState(Instance initial);

  // Applies one event. Throws std::invalid_argument for events that
  // reference unknown flows or are otherwise malformed, and InfeasibleError
  // for joins or demand increases that would overload a link; the state is
  // unchanged on error.
  EventOutcome apply_event(const Event& event);

  // Replaces the solution with a fresh full solve of the current instance
  // and resets the event counter.
  void periodic_recompute();

  const Instance& instance() const { return instance_; }
  const Solution& solution() const { return solution_; }
  bool bootstrapped() const { return bootstrapped_; }
  int events_since_recompute() const { return events_since_recompute_; }

 private:
  EventOutcome handle_pre_bootstrap(const Event& event);
  void validate_event(const Event& event) const;
  Solution pure_solution() const;
  StatusMap traced_back_statuses(int changed_flow_id) const;
  std::set<int> ensure_feasible(StatusMap& statuses) const;
  void rerun_rd(StatusMap statuses, std::set<int> temporary);
  void full_solve();

  Instance instance_;
  Solution solution_;
  FlowSelectionResult post_fs_;  // snapshot from the last full solve
  bool bootstrapped_ = false;
  int events_since_recompute_ = 0;
};

}  // namespace spfrcs
