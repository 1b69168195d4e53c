#include "spfrcs/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <mutex>
#include <queue>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"
#include "spfrcs/reference.hpp"
#include "spfrcs/rng.hpp"

namespace spfrcs {

namespace {

Topology ring_with_chords(int n_nodes,
                          const std::vector<std::pair<int, int>>& chords) {
  Topology topo;
  for (int i = 0; i < n_nodes; ++i) topo.nodes.push_back("n" + std::to_string(i));
  int id = 0;
  for (int i = 0; i < n_nodes; ++i)
    topo.links.push_back(
        {id++, topo.nodes[i], topo.nodes[(i + 1) % n_nodes], 1.0});
  for (const auto& [a, b] : chords)
    topo.links.push_back({id++, topo.nodes[a], topo.nodes[b], 1.0});
  return topo;
}

}  // namespace

Topology claranet_scale() {
  return ring_with_chords(15, {{0, 5}, {5, 10}, {10, 2}});
}

Topology columbus_scale() {
  std::vector<std::pair<int, int>> chords;
  for (int j = 0; j < 7; ++j) chords.push_back({10 * j, (10 * j + 10) % 70});
  for (int j = 0; j < 8; ++j)
    chords.push_back({(9 * j + 3) % 70, (9 * j + 34) % 70});
  return ring_with_chords(70, chords);
}

Topology tiny_scale() { return ring_with_chords(6, {{0, 3}, {3, 1}}); }

std::vector<int> route_shortest(const Topology& topology,
                                const std::string& src,
                                const std::string& dst) {
  if (src == dst) return {};
  std::unordered_map<std::string, std::vector<const Link*>> adj;
  for (const Link& link : topology.links) adj[link.src].push_back(&link);
  for (auto& [node, links] : adj) {
    (void)node;
    std::sort(links.begin(), links.end(),
              [](const Link* a, const Link* b) { return a->id < b->id; });
  }

  std::unordered_map<std::string, const Link*> via;
  std::queue<std::string> frontier;
  frontier.push(src);
  via[src] = nullptr;
  while (!frontier.empty()) {
    std::string node = frontier.front();
    frontier.pop();
    if (node == dst) break;
    for (const Link* link : adj[node]) {
      if (via.count(link->dst)) continue;
      via[link->dst] = link;
      frontier.push(link->dst);
    }
  }
  if (!via.count(dst)) return {};

  std::vector<int> path;
  for (std::string node = dst; node != src;) {
    const Link* link = via.at(node);
    path.push_back(link->id);
    node = link->src;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

namespace {

// Route via a designated root node before branching toward the destination;
// approximates default-path TE, which concentrates traffic near the root.
// Falls back to the direct route when the two legs would reuse a link.
std::vector<int> route_biased(const Topology& topology, const std::string& src,
                              const std::string& dst) {
  const std::string& root = topology.nodes.front();
  if (src == root || dst == root) return route_shortest(topology, src, dst);
  std::vector<int> to_root = route_shortest(topology, src, root);
  std::vector<int> from_root = route_shortest(topology, root, dst);
  if (to_root.empty() || from_root.empty())
    return route_shortest(topology, src, dst);
  std::set<int> seen(to_root.begin(), to_root.end());
  for (int id : from_root)
    if (seen.count(id)) return route_shortest(topology, src, dst);
  to_root.insert(to_root.end(), from_root.begin(), from_root.end());
  return to_root;
}

double network_load(double alpha, double floor,
                    const std::vector<double>& link_demand_sums) {
  double carried = 0.0;
  double capacity = 0.0;
  for (double s : link_demand_sums) {
    carried += alpha * s;
    capacity += std::max(floor, 1.25 * alpha * s);
  }
  return capacity == 0 ? 0.0 : carried / capacity;
}

}  // namespace

Instance generate(const GenSpec& spec) {
  if (spec.flow_count < 0) throw std::invalid_argument("negative flow count");
  if (!(spec.load > 0))
    throw std::invalid_argument("load must be positive");
  if (spec.load >= 0.8 - 1e-9)
    throw std::invalid_argument(
        "load >= 0.8 is unreachable: loaded links carry 25% capacity "
        "headroom by construction");
  if (!(spec.demand_lo > 0) || spec.demand_hi < spec.demand_lo)
    throw std::invalid_argument("bad demand range");
  if (!(spec.capacity_floor > 0))
    throw std::invalid_argument("capacity floor must be positive");
  if (spec.topology.nodes.empty() && spec.flow_count > 0)
    throw std::invalid_argument("topology has no nodes");

  Instance instance;
  instance.topology = spec.topology;

  std::mt19937_64 rng(spec.seed);
  const auto& nodes = instance.topology.nodes;
  for (int i = 0; i < spec.flow_count; ++i) {
    Flow flow;
    flow.id = i;
    flow.demand = next_real(rng, spec.demand_lo, spec.demand_hi);
    bool routed = false;
    for (int attempt = 0; attempt < 200 && !routed; ++attempt) {
      const std::string& src = nodes[next_index(rng, nodes.size())];
      const std::string& dst = nodes[next_index(rng, nodes.size())];
      if (src == dst) continue;
      flow.path = spec.routing == Routing::shortest_path
                      ? route_shortest(instance.topology, src, dst)
                      : route_biased(instance.topology, src, dst);
      routed = !flow.path.empty();
    }
    if (!routed)
      throw std::runtime_error(
          "instance generation failed: disconnected pair retries exhausted");
    instance.flows.push_back(std::move(flow));
  }

  std::unordered_map<int, std::size_t> slot;
  for (std::size_t li = 0; li < instance.topology.links.size(); ++li)
    slot[instance.topology.links[li].id] = li;

  auto demand_sums = [&] {
    std::vector<double> sums(instance.topology.links.size(), 0.0);
    for (const Flow& flow : instance.flows)
      for (int id : flow.path) sums[slot.at(id)] += flow.demand;
    return sums;
  };

  if (spec.flow_count > 0) {
    // Rescale demands so carried volume over total capacity hits the target
    // load. Capacity tracks demand on loaded links, so the reachable range
    // is (0, 0.8); the floor capacity of lightly used links provides the
    // slack that makes lower loads solvable.
    const std::vector<double> base = demand_sums();
    double lo = 1e-12, hi = 1e12;
    for (int iter = 0; iter < 200; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (network_load(mid, spec.capacity_floor, base) < spec.load)
        lo = mid;
      else
        hi = mid;
    }
    const double alpha = 0.5 * (lo + hi);
    for (Flow& flow : instance.flows) flow.demand *= alpha;
  }

  const std::vector<double> sums = demand_sums();
  for (std::size_t li = 0; li < instance.topology.links.size(); ++li)
    instance.topology.links[li].capacity =
        std::max(spec.capacity_floor, 1.25 * sums[li]);

  auto violations = validate_instance(instance);
  if (!violations.empty()) throw ValidationError(std::move(violations));
  return instance;
}

const char* to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::jfsrd:
      return "jfsrd";
    case Algorithm::fs_only:
      return "fs-only";
    case Algorithm::baseline:
      return "baseline";
    case Algorithm::pure_tcp:
      return "pure-tcp";
    case Algorithm::oracle:
      return "oracle";
  }
  return "?";
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "jfsrd") return Algorithm::jfsrd;
  if (name == "fs-only") return Algorithm::fs_only;
  if (name == "baseline") return Algorithm::baseline;
  if (name == "pure-tcp") return Algorithm::pure_tcp;
  if (name == "oracle") return Algorithm::oracle;
  throw std::invalid_argument("unknown algorithm \"" + name + "\"");
}

namespace {

Solution run_algorithm(const Instance& instance, Algorithm algorithm,
                       double oracle_delta) {
  switch (algorithm) {
    case Algorithm::jfsrd:
      return solve(instance);
    case Algorithm::fs_only:
      return make_solution(instance, flow_selection(instance).statuses);
    case Algorithm::baseline:
      return baseline(instance);
    case Algorithm::pure_tcp:
      return pure_tcp(instance);
    case Algorithm::oracle:
      return exact_oracle(instance, oracle_delta);
  }
  throw std::logic_error("unreachable");
}

void validate_solution(const Instance& instance, const Solution& solution) {
  if (!check_maxmin(instance, solution.statuses, solution.allocation))
    throw std::logic_error("solution fails the max-min check");
  for (const auto& [id, status] : solution.statuses) {
    if (!status.controlled) continue;
    const Flow* f = instance.find_flow(id);
    if (!f || status.rate < f->demand - kEps)
      throw std::logic_error("controlled rate below demand for flow " +
                             std::to_string(id));
  }
  const int unsat = static_cast<int>(
      unsatisfied_flows(instance, solution.allocation).size());
  if (unsat != solution.metrics.unsatisfied)
    throw std::logic_error("metrics disagree with the allocation");
}

}  // namespace

RunReport run_suite(const GenSpec& spec,
                    const std::vector<Algorithm>& algorithms, int samples,
                    double oracle_delta, int workers) {
  if (samples < 0) throw std::invalid_argument("negative sample count");
  const bool wants_oracle =
      std::find(algorithms.begin(), algorithms.end(), Algorithm::oracle) !=
      algorithms.end();
  if (wants_oracle &&
      (spec.flow_count > kOracleMaxFlows ||
       static_cast<int>(spec.topology.links.size()) > kOracleMaxLinks))
    throw SizeGuardError("oracle requested beyond its size guard");

  RunReport report;
  report.samples = samples;
  report.flow_count = spec.flow_count;
  report.rows.resize(static_cast<std::size_t>(samples) * algorithms.size());

  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min(workers, std::max(samples, 1)));

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto body = [&] {
    while (true) {
      const int sample = next.fetch_add(1);
      if (sample >= samples || failed.load()) return;
      try {
        GenSpec local = spec;
        local.seed = spec.seed + static_cast<std::uint64_t>(sample);
        Instance instance = generate(local);
        for (std::size_t ai = 0; ai < algorithms.size(); ++ai) {
          const auto t0 = std::chrono::steady_clock::now();
          Solution solution =
              run_algorithm(instance, algorithms[ai], oracle_delta);
          const auto t1 = std::chrono::steady_clock::now();
          validate_solution(instance, solution);
          RunRow& row = report.rows[sample * algorithms.size() + ai];
          row.sample = sample;
          row.algorithm = algorithms[ai];
          row.controlled = solution.metrics.controlled;
          row.unsatisfied = solution.metrics.unsatisfied;
          row.millis =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (failed.load()) std::rethrow_exception(error);

  for (Algorithm a : algorithms) report.aggregates[a] = {};
  if (samples > 0) {
    for (const RunRow& row : report.rows) {
      AlgorithmStats& s = report.aggregates[row.algorithm];
      s.mean_controlled += row.controlled;
      s.mean_unsatisfied += row.unsatisfied;
      s.mean_millis += row.millis;
    }
    for (auto& [a, s] : report.aggregates) {
      (void)a;
      s.mean_controlled /= samples;
      s.mean_unsatisfied /= samples;
      s.mean_millis /= samples;
    }
  }
  return report;
}

std::string to_csv(const RunReport& report) {
  std::string out = "sample,algorithm,controlled,unsatisfied,millis\n";
  char buf[64];
  for (const RunRow& row : report.rows) {
    std::snprintf(buf, sizeof buf, "%.3f", row.millis);
    out += std::to_string(row.sample);
    out += ',';
    out += to_string(row.algorithm);
    out += ',';
    out += std::to_string(row.controlled);
    out += ',';
    out += std::to_string(row.unsatisfied);
    out += ',';
    out += buf;
    out += '\n';
  }
  return out;
}

std::string to_json_summary(const RunReport& report, const GenSpec& spec) {
  nlohmann::ordered_json doc;
  doc["samples"] = report.samples;
  doc["flows"] = report.flow_count;
  doc["load"] = spec.load;
  doc["seed"] = spec.seed;
  doc["nodes"] = spec.topology.nodes.size();
  doc["links"] = spec.topology.links.size();
  nlohmann::ordered_json algs;
  for (const auto& [algorithm, stats] : report.aggregates) {
    nlohmann::ordered_json entry;
    entry["mean_controlled"] = stats.mean_controlled;
    entry["mean_unsatisfied"] = stats.mean_unsatisfied;
    entry["mean_millis"] = stats.mean_millis;
    algs[to_string(algorithm)] = std::move(entry);
  }
  doc["algorithms"] = std::move(algs);
  return doc.dump(2) + "\n";
}

DynamicReport run_dynamic(const GenSpec& spec, const std::vector<Event>& trace,
                          int cadence) {
  Instance instance = generate(spec);
  DynamicState state(std::move(instance));

  DynamicReport report;
  report.initial_controlled = state.solution().metrics.controlled;

  for (const Event& event : trace) {
    EventOutcome outcome = state.apply_event(event);
    DynamicRow row;
    row.t = event.t;
    switch (event.kind) {
      case Event::Kind::join:
        row.kind = "join";
        break;
      case Event::Kind::leave:
        row.kind = "leave";
        break;
      case Event::Kind::demand_increase:
        row.kind = "inc";
        break;
      case Event::Kind::demand_decrease:
        row.kind = "dec";
        break;
    }
    row.action = to_string(outcome.action);
    row.controlled = state.solution().metrics.controlled;
    row.unsatisfied = state.solution().metrics.unsatisfied;
    row.statuses_changed = outcome.statuses_changed;
    report.rows.push_back(std::move(row));

    if (outcome.action == EventOutcome::Action::rd_rerun) ++report.rd_reruns;
    if (outcome.action == EventOutcome::Action::full_solve)
      ++report.full_solves;
    if (state.bootstrapped())
      report.max_unsatisfied =
          std::max(report.max_unsatisfied, state.solution().metrics.unsatisfied);

    if (cadence > 0 && state.bootstrapped() &&
        state.events_since_recompute() >= cadence) {
      RecomputeRow rec;
      rec.after_event = event.t;
      rec.controlled_before = state.solution().metrics.controlled;
      state.periodic_recompute();
      rec.controlled_after = state.solution().metrics.controlled;
      report.recomputes.push_back(rec);
    }
  }
  report.final_controlled = state.solution().metrics.controlled;
  return report;
}

std::string to_json(const DynamicReport& report) {
  nlohmann::ordered_json doc;
  doc["events"] = nlohmann::ordered_json::array();
  for (const DynamicRow& row : report.rows) {
    nlohmann::ordered_json r;
    r["t"] = row.t;
    r["kind"] = row.kind;
    r["action"] = row.action;
    r["controlled"] = row.controlled;
    r["unsatisfied"] = row.unsatisfied;
    r["statuses_changed"] = row.statuses_changed;
    doc["events"].push_back(std::move(r));
  }
  doc["recomputes"] = nlohmann::ordered_json::array();
  for (const RecomputeRow& rec : report.recomputes) {
    nlohmann::ordered_json r;
    r["after_event"] = rec.after_event;
    r["controlled_before"] = rec.controlled_before;
    r["controlled_after"] = rec.controlled_after;
    doc["recomputes"].push_back(std::move(r));
  }
  nlohmann::ordered_json summary;
  summary["initial_controlled"] = report.initial_controlled;
  summary["final_controlled"] = report.final_controlled;
  summary["rd_reruns"] = report.rd_reruns;
  summary["full_solves"] = report.full_solves;
  summary["max_unsatisfied"] = report.max_unsatisfied;
  doc["summary"] = std::move(summary);
  return doc.dump(2) + "\n";
}

std::vector<Event> make_trace(const Instance& start, int n_events,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Instance sim = start;
  int next_id = 0;
  for (const Flow& f : sim.flows) next_id = std::max(next_id, f.id + 1);

  double demand_lo = std::numeric_limits<double>::infinity();
  double demand_hi = 0.0;
  for (const Flow& f : sim.flows) {
    demand_lo = std::min(demand_lo, f.demand);
    demand_hi = std::max(demand_hi, f.demand);
  }
  if (sim.flows.empty()) {
    demand_lo = 0.1;
    demand_hi = 1.0;
  }

  auto headroom = [&](const std::vector<int>& path) {
    std::unordered_map<int, double> sums;
    for (const Flow& f : sim.flows)
      for (int id : f.path) sums[id] += f.demand;
    double room = std::numeric_limits<double>::infinity();
    for (int id : path)
      room = std::min(room,
                      sim.topology.find_link(id)->capacity - sums[id]);
    return room;
  };

  std::vector<Event> trace;
  for (int t = 0; t < n_events; ++t) {
    bool emitted = false;
    for (int attempt = 0; attempt < 50 && !emitted; ++attempt) {
      const int kind = static_cast<int>(next_index(rng, 4));
      if (kind == 0) {  // join
        const auto& nodes = sim.topology.nodes;
        const std::string& src = nodes[next_index(rng, nodes.size())];
        const std::string& dst = nodes[next_index(rng, nodes.size())];
        if (src == dst) continue;
        std::vector<int> path = route_shortest(sim.topology, src, dst);
        if (path.empty()) continue;
        const double room = headroom(path);
        if (room <= kEps) continue;
        Flow flow;
        flow.id = next_id;
        flow.path = std::move(path);
        flow.demand =
            std::min(next_real(rng, demand_lo, demand_hi), 0.9 * room);
        if (flow.demand <= 0) continue;
        ++next_id;
        sim.flows.push_back(flow);
        trace.push_back(Event::make_join(t, std::move(flow)));
        emitted = true;
      } else if (kind == 1) {  // leave
        if (sim.flows.empty()) continue;
        const std::size_t at = next_index(rng, sim.flows.size());
        const int id = sim.flows[at].id;
        sim.flows.erase(sim.flows.begin() + at);
        trace.push_back(Event::make_leave(t, id));
        emitted = true;
      } else if (kind == 2) {  // demand increase
        if (sim.flows.empty()) continue;
        Flow& f = sim.flows[next_index(rng, sim.flows.size())];
        const double room = headroom(f.path);
        if (room <= 1e-6) continue;
        const double bump = next_real(rng, 0.1, 0.9) * room;
        if (bump <= 1e-6) continue;
        f.demand += bump;
        trace.push_back(Event::make_increase(t, f.id, f.demand));
        emitted = true;
      } else {  // demand decrease
        if (sim.flows.empty()) continue;
        Flow& f = sim.flows[next_index(rng, sim.flows.size())];
        const double next = f.demand * next_real(rng, 0.4, 0.9);
        if (next <= 0 || next >= f.demand - kEps) continue;
        f.demand = next;
        trace.push_back(Event::make_decrease(t, f.id, f.demand));
        emitted = true;
      }
    }
    if (!emitted)
      throw std::runtime_error("trace generation stalled at event " +
                               std::to_string(t));
  }
  return trace;
}

std::vector<Event> load_trace(const std::string& text) {
  std::vector<Event> out;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(parse_event_line(line));
    } catch (const std::exception& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " +
                       e.what());
    }
  }
  return out;
}

}  // namespace spfrcs
