#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "spfrcs/dynamics.hpp"
#include "spfrcs/jfsrd.hpp"
#include "spfrcs/netmodel.hpp"

namespace spfrcs {

// Built-in topologies: directed rings with chord shortcuts at the node/link
// scales of the two evaluation networks. Capacities start at 1 and are
// overwritten by the generator.
Topology claranet_scale();  // 15 nodes, 18 links
Topology columbus_scale();  // 70 nodes, 85 links
Topology tiny_scale();      // 6 nodes, 8 links; fits the oracle guard

enum class Routing { shortest_path, default_path_biased };

struct GenSpec {
  Topology topology;
  int flow_count = 60;
  double load = 0.75;  // total demand-hops over total capacity; must be < 0.8
  double demand_lo = 1.0;
  double demand_hi = 10.0;
  Routing routing = Routing::shortest_path;
  double capacity_floor = 1.0;
  std::uint64_t seed = 0;
};

// Random (src,dst) pairs routed by the chosen policy, demands uniform in
// [demand_lo, demand_hi] rescaled so the network load matches the spec, and
// every link capacity set to max(floor, 1.25 * sum of demands crossing it).
// Deterministic under seed.
Instance generate(const GenSpec& spec);

// Fewest-hop route (link-id order breaks ties); empty when unreachable.
std::vector<int> route_shortest(const Topology& topology,
                                const std::string& src,
                                const std::string& dst);

enum class Algorithm { jfsrd, fs_only, baseline, pure_tcp, oracle };

const char* to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct RunRow {
  int sample = 0;
  Algorithm algorithm = Algorithm::jfsrd;
  int controlled = 0;
  int unsatisfied = 0;
  double millis = 0.0;
};

struct AlgorithmStats {
  double mean_controlled = 0.0;
  double mean_unsatisfied = 0.0;
  double mean_millis = 0.0;
};

struct RunReport {
  int samples = 0;
  int flow_count = 0;
  std::vector<RunRow> rows;  // ordered by (sample, requested algorithm)
  std::map<Algorithm, AlgorithmStats> aggregates;
};

// Runs every requested algorithm on `samples` seeded instances (seed + i for
// sample i). Every returned solution is re-validated against the max-min
// checker before being counted. oracle_delta <= 0 selects the per-instance
// default grid.
RunReport run_suite(const GenSpec& spec,
                    const std::vector<Algorithm>& algorithms, int samples,
                    double oracle_delta = 0.0, int workers = 0);

// CSV with fixed columns: sample,algorithm,controlled,unsatisfied,millis
std::string to_csv(const RunReport& report);
std::string to_json_summary(const RunReport& report, const GenSpec& spec);

struct DynamicRow {
  int t = 0;
  std::string kind;
  std::string action;
  int controlled = 0;
  int unsatisfied = 0;
  bool statuses_changed = false;
};

struct RecomputeRow {
  int after_event = 0;
  int controlled_before = 0;
  int controlled_after = 0;
};

struct DynamicReport {
  std::vector<DynamicRow> rows;
  std::vector<RecomputeRow> recomputes;
  int initial_controlled = 0;
  int final_controlled = 0;
  int rd_reruns = 0;
  int full_solves = 0;
  int max_unsatisfied = 0;  // across all post-bootstrap states; must be 0
};

// Replays a trace through the dynamic engine, recomputing every `cadence`
// events (0 disables the periodic recompute).
DynamicReport run_dynamic(const GenSpec& spec, const std::vector<Event>& trace,
                          int cadence = 25);

std::string to_json(const DynamicReport& report);

// Seeded churn trace (joins, leaves, demand changes) that is always valid
// against the evolving instance.
std::vector<Event> make_trace(const Instance& start, int n_events,
                              std::uint64_t seed);

std::vector<Event> load_trace(const std::string& text);

}  // namespace spfrcs
