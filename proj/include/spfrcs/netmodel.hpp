#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace spfrcs {

// Absolute tolerance for every rate/capacity comparison. Capacities are
// expected to stay below kMaxCapacity bandwidth units so a single absolute
// epsilon is meaningful across all modules.
inline constexpr double kEps = 1e-9;
inline constexpr double kMaxCapacity = 1e6;

struct Link {
  int id = -1;
  std::string src;
  std::string dst;
  double capacity = 0.0;

  bool operator==(const Link&) const = default;
};

struct Flow {
  int id = -1;
  std::vector<int> path;  // link ids, chained head to tail
  double demand = 0.0;
  double priority = 1.0;

  bool operator==(const Flow&) const = default;
};

struct Topology {
  std::vector<std::string> nodes;
  std::vector<Link> links;

  const Link* find_link(int id) const;
  bool operator==(const Topology&) const = default;
};

// A flow is either left to TCP or pinned to a fixed rate by the controller.
struct ControlStatus {
  bool controlled = false;
  double rate = 0.0;  // meaningful only when controlled

  static ControlStatus uncontrolled() { return {}; }
  static ControlStatus pinned(double rate) { return {true, rate}; }
  bool operator==(const ControlStatus&) const = default;
};

// Flows absent from the map count as uncontrolled.
using StatusMap = std::map<int, ControlStatus>;

struct Instance {
  Topology topology;
  std::vector<Flow> flows;

  const Flow* find_flow(int id) const;
  bool operator==(const Instance&) const = default;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  std::vector<std::string> violations_;
};

// Controller-assigned rates that cannot fit, or an instance with no feasible
// solution at all. Carries the offending link when one is known.
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what, int link_id = -1)
      : std::runtime_error(what), link_id_(link_id) {}
  int link_id() const { return link_id_; }

 private:
  int link_id_;
};

// Returns one message per violated invariant; empty means the instance is
// well formed. Violations are data, not faults.
std::vector<std::string> validate_instance(const Instance& instance);

// JSON wire format (unknown fields rejected):
//   {"nodes":[...],
//    "links":[{"id","src","dst","capacity"}...],
//    "flows":[{"id","path":[linkIds],"demand","priority"}...]}
Instance load_instance(const std::string& bytes);
Instance load_instance_file(const std::string& path);
std::string serialize(const Instance& instance);

std::set<int> flows_on_link(const Instance& instance, int link_id);

// Minimal GraphML reader for topology-zoo style node/edge lists. Every edge
// becomes a pair of directed links carrying default_capacity.
Topology import_graphml(const std::string& text, double default_capacity);

}  // namespace spfrcs
