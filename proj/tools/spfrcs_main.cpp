#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "spfrcs/bench.hpp"
#include "spfrcs/reference.hpp"

namespace {

using namespace spfrcs;

struct GenOptions {
  std::string topology = "claranet";
  int flows = 60;
  double load = 0.75;
  std::uint64_t seed = 0;
  std::string routing = "shortest";
  double floor = 1.0;
};

void add_gen_options(CLI::App* cmd, GenOptions& opt) {
  cmd->add_option("--topology", opt.topology,
                  "claranet | columbus | tiny | path to an instance/graphml "
                  "file (topology part only)");
  cmd->add_option("--flows", opt.flows, "number of flows to generate");
  cmd->add_option("--load", opt.load, "target network load, must be < 0.8");
  cmd->add_option("--seed", opt.seed, "RNG seed");
  cmd->add_option("--routing", opt.routing, "shortest | biased");
  cmd->add_option("--floor", opt.floor, "capacity floor for idle links");
}

Topology resolve_topology(const std::string& name) {
  if (name == "claranet") return claranet_scale();
  if (name == "columbus") return columbus_scale();
  if (name == "tiny") return tiny_scale();
  std::ifstream in(name, std::ios::binary);
  if (!in) throw ParseError("cannot open topology file " + name);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  if (text.find("<graphml") != std::string::npos ||
      text.find("<node") != std::string::npos)
    return import_graphml(text, 1.0);
  return load_instance(text).topology;
}

GenSpec to_spec(const GenOptions& opt) {
  GenSpec spec;
  spec.topology = resolve_topology(opt.topology);
  spec.flow_count = opt.flows;
  spec.load = opt.load;
  spec.seed = opt.seed;
  spec.capacity_floor = opt.floor;
  if (opt.routing == "shortest")
    spec.routing = Routing::shortest_path;
  else if (opt.routing == "biased")
    spec.routing = Routing::default_path_biased;
  else
    throw CLI::ValidationError("--routing", "expected shortest or biased");
  return spec;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string solution_json(const Instance& instance, const Solution& solution,
                          const std::string& algorithm) {
  nlohmann::ordered_json doc;
  doc["algorithm"] = algorithm;
  doc["metrics"] = {{"controlled", solution.metrics.controlled},
                    {"unsatisfied", solution.metrics.unsatisfied}};
  doc["flows"] = nlohmann::ordered_json::array();
  for (const Flow& flow : instance.flows) {
    nlohmann::ordered_json f;
    f["id"] = flow.id;
    const auto& status = solution.statuses.at(flow.id);
    f["controlled"] = status.controlled;
    if (status.controlled) f["pinned_rate"] = status.rate;
    f["rate"] = solution.allocation.rates.at(flow.id);
    if (auto it = solution.allocation.bottleneck.find(flow.id);
        it != solution.allocation.bottleneck.end())
      f["bottleneck"] = it->second;
    doc["flows"].push_back(std::move(f));
  }
  return doc.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"per-flow rate control toolkit"};
  app.require_subcommand(1);

  GenOptions gen_opt;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "generate an instance as JSON");
  add_gen_options(gen, gen_opt);
  gen->add_option("--out", gen_out, "output path (default: stdout)");

  std::string solve_instance_path;
  std::string solve_algorithm = "jfsrd";
  double solve_delta = 0.0;
  CLI::App* solve_cmd =
      app.add_subcommand("solve", "run one algorithm on one instance");
  solve_cmd->add_option("--instance", solve_instance_path, "instance JSON")
      ->required();
  solve_cmd->add_option(
      "--algorithm", solve_algorithm,
      "jfsrd | fs-only | baseline | pure-tcp | oracle");
  solve_cmd->add_option("--delta", solve_delta,
                        "oracle rate grid step (default: min demand / 4)");

  GenOptions suite_opt;
  std::string suite_algorithms = "jfsrd,baseline,pure-tcp";
  int suite_samples = 100;
  double suite_delta = 0.0;
  int suite_workers = 0;
  std::string suite_csv, suite_json;
  CLI::App* suite =
      app.add_subcommand("suite", "run algorithms over seeded samples");
  add_gen_options(suite, suite_opt);
  suite->add_option("--algorithms", suite_algorithms,
                    "comma-separated algorithm list");
  suite->add_option("--samples", suite_samples, "number of seeded instances");
  suite->add_option("--delta", suite_delta, "oracle rate grid step");
  suite->add_option("--workers", suite_workers,
                    "worker threads (default: hardware)");
  suite->add_option("--csv", suite_csv, "CSV output path (default: stdout)");
  suite->add_option("--json", suite_json, "also write a JSON summary here");

  GenOptions dyn_opt;
  dyn_opt.flows = 40;
  std::string dyn_trace;
  int dyn_events = 200;
  int dyn_cadence = 25;
  CLI::App* dynamic =
      app.add_subcommand("dynamic", "replay a churn trace and report");
  add_gen_options(dynamic, dyn_opt);
  dynamic->add_option("--trace", dyn_trace,
                      "JSON Lines trace file (default: synthesize one)");
  dynamic->add_option("--events", dyn_events,
                      "events to synthesize when no trace is given");
  dynamic->add_option("--cadence", dyn_cadence,
                      "full recompute every N events (0 disables)");

  std::string oracle_instance_path;
  double oracle_delta = 0.0;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "guarded exact solve of one instance");
  oracle_cmd->add_option("--instance", oracle_instance_path, "instance JSON")
      ->required();
  oracle_cmd->add_option("--delta", oracle_delta, "rate grid step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      write_or_print(gen_out, serialize(generate(to_spec(gen_opt))));
    } else if (solve_cmd->parsed()) {
      Instance instance = load_instance(slurp(solve_instance_path));
      Algorithm algorithm = algorithm_from_string(solve_algorithm);
      Solution solution;
      switch (algorithm) {
        case Algorithm::jfsrd:
          solution = spfrcs::solve(instance);
          break;
        case Algorithm::fs_only:
          solution = make_solution(instance, flow_selection(instance).statuses);
          break;
        case Algorithm::baseline:
          solution = baseline(instance);
          break;
        case Algorithm::pure_tcp:
          solution = pure_tcp(instance);
          break;
        case Algorithm::oracle:
          solution = exact_oracle(instance, solve_delta);
          break;
      }
      std::cout << solution_json(instance, solution, solve_algorithm);
    } else if (suite->parsed()) {
      std::vector<Algorithm> algorithms;
      std::stringstream ss(suite_algorithms);
      std::string token;
      while (std::getline(ss, token, ','))
        if (!token.empty()) algorithms.push_back(algorithm_from_string(token));
      if (algorithms.empty())
        throw std::invalid_argument("no algorithms selected");
      GenSpec spec = to_spec(suite_opt);
      RunReport report =
          run_suite(spec, algorithms, suite_samples, suite_delta, suite_workers);
      write_or_print(suite_csv, to_csv(report));
      if (!suite_json.empty())
        write_or_print(suite_json, to_json_summary(report, spec));
    } else if (dynamic->parsed()) {
      GenSpec spec = to_spec(dyn_opt);
      std::vector<Event> trace;
      if (dyn_trace.empty())
        trace = make_trace(generate(spec), dyn_events, spec.seed + 1);
      else
        trace = load_trace(slurp(dyn_trace));
      std::cout << to_json(run_dynamic(spec, trace, dyn_cadence));
    } else if (oracle_cmd->parsed()) {
      Instance instance = load_instance(slurp(oracle_instance_path));
      Solution solution = exact_oracle(instance, oracle_delta);
      std::cout << solution_json(instance, solution, "oracle");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
