// subrec command-line front end: generate synthetic collections, build
// recovery plans, run the recovery-probability experiment, and render the
// summary chart.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "subrec/chart.hpp"
#include "subrec/io.hpp"
#include "subrec/simulation.hpp"

namespace fs = std::filesystem;
using namespace subrec;
using nlohmann::json;

namespace {

struct GenFlags {
  GeneratorParams params;
  std::string out = "out";
};

void add_generator_flags(CLI::App& cmd, GeneratorParams& p) {
  cmd.add_option("--seed", p.seed, "master seed");
  cmd.add_option("--concepts", p.n_concepts, "taxonomy size");
  cmd.add_option("--depth", p.taxonomy_depth, "taxonomy depth bound");
  cmd.add_option("--services", p.n_services, "number of base services");
  cmd.add_option("--min-order", p.order_min, "minimum graph order");
  cmd.add_option("--max-order", p.order_max, "maximum graph order");
  cmd.add_option("--p-atomic-sub", p.p_atomic_substitute,
                 "probability a service has a same-interface substitute");
  cmd.add_option("--p-chain-sub", p.p_chain_substitute,
                 "probability a service has a 2-chain decomposition substitute");
  cmd.add_option("--epsilon", p.epsilon, "QoS closeness bound");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

int cmd_gen(const GenFlags& flags) {
  flags.params.validate();
  fs::create_directories(flags.out);
  Taxonomy taxonomy = generate_taxonomy(derive_seed(flags.params.seed, 1),
                                        flags.params.n_concepts, flags.params.taxonomy_depth);
  Registry registry = generate_registry(derive_seed(flags.params.seed, 2), taxonomy,
                                        flags.params);
  auto collection =
      generate_collection(derive_seed(flags.params.seed, 3), registry, taxonomy,
                          flags.params.n_graphs, flags.params.order_min, flags.params.order_max);

  std::string registry_path = flags.out + "/registry.json";
  std::string collection_path = flags.out + "/collection.json";
  io::write_file(registry_path, dump(io::registry_to_json(taxonomy, registry)));
  io::write_file(collection_path, dump(io::collection_to_json(collection)));

  json manifest = io::make_manifest("gen", io::params_to_json(flags.params), {},
                                    {registry_path, collection_path});
  io::write_file(flags.out + "/manifest.json", dump(manifest));

  std::cout << "wrote " << collection.size() << " graphs, " << registry.services().size()
            << " services to " << flags.out << "\n";
  return 0;
}

struct PlanFlags {
  std::string registry_path;
  std::string collection_path;
  BuildParams params;
  std::string out = "out";
};

int cmd_plan(const PlanFlags& flags) {
  json jr = json::parse(io::read_file(flags.registry_path));
  Taxonomy taxonomy = io::taxonomy_from_json(jr);
  Registry registry = Registry::build(io::services_from_json(jr), taxonomy);
  auto collection = io::collection_from_json(json::parse(io::read_file(flags.collection_path)));

  fs::create_directories(flags.out);
  json plans = json::array();
  for (const auto& graph : collection) {
    RecoveryPlan plan = build_plan(graph, registry, taxonomy, flags.params);
    std::size_t entries = 0;
    for (const auto& [node, list] : plan.entries) entries += list.size();
    std::cout << graph.id << ": " << entries << " entries\n";
    plans.push_back(io::plan_to_json(plan));
  }
  std::string plans_path = flags.out + "/plans.json";
  io::write_file(plans_path, dump(plans));

  json parameters{{"registry", flags.registry_path},
                  {"collection", flags.collection_path},
                  {"epsilon", flags.params.epsilon},
                  {"max_size", flags.params.max_size},
                  {"max_fragment_size", flags.params.max_fragment_size},
                  {"strict_exact", flags.params.strict_exact}};
  json manifest = io::make_manifest("plan", parameters,
                                    {flags.registry_path, flags.collection_path}, {plans_path});
  io::write_file(flags.out + "/manifest.json", dump(manifest));
  return 0;
}

struct SimulateFlags {
  GeneratorParams params;
  std::string strategies = "atomic,composite";
  std::size_t jobs = 1;
  std::string out = "out";
};

std::vector<Strategy> parse_strategies(const std::string& spec) {
  std::vector<Strategy> out;
  std::string item;
  std::istringstream ss(spec);
  while (std::getline(ss, item, ',')) {
    if (item == "atomic")
      out.push_back(Strategy::ATOMIC);
    else if (item == "composite")
      out.push_back(Strategy::COMPOSITE);
    else
      throw CLI::ValidationError("--strategies", "unknown strategy '" + item + "'");
  }
  if (out.empty()) throw CLI::ValidationError("--strategies", "no strategy selected");
  return out;
}

int cmd_simulate(const SimulateFlags& flags) {
  auto strategies = parse_strategies(flags.strategies);
  Report report = run_experiment(flags.params, flags.jobs, strategies);

  fs::create_directories(flags.out);
  std::string csv_path = flags.out + "/report.csv";
  std::string summary_path = flags.out + "/summary.json";
  io::write_file(csv_path, io::report_to_csv(report));
  io::write_file(summary_path, dump(io::summary_to_json(report)));

  json parameters = io::params_to_json(flags.params);
  parameters["strategies"] = flags.strategies;
  parameters["jobs"] = flags.jobs;
  json manifest = io::make_manifest("simulate", parameters, {}, {csv_path, summary_path});
  io::write_file(flags.out + "/manifest.json", dump(manifest));

  for (const auto& [s, sr] : report.strategies)
    std::cout << to_string(s) << " mean recovery probability: " << sr.mean << "\n";
  return 0;
}

struct ChartFlags {
  std::string summary_path;
  std::string out = "chart.svg";
  bool by_order = false;
};

int cmd_chart(const ChartFlags& flags) {
  json summary = json::parse(io::read_file(flags.summary_path));
  io::write_file(flags.out, chart::render_svg(summary, flags.by_order));
  json parameters{{"summary", flags.summary_path}, {"by_order", flags.by_order}};
  json manifest = io::make_manifest("chart", parameters, {flags.summary_path}, {flags.out});
  io::write_file(flags.out + ".manifest.json", dump(manifest));
  std::cout << "wrote " << flags.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"composite-service failure recovery by precomputed subgraph replacement"};
  app.require_subcommand(1);

  GenFlags gen;
  gen.params.n_graphs = 1000;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic registry and collection");
  add_generator_flags(*gen_cmd, gen.params);
  gen_cmd->add_option("--graphs", gen.params.n_graphs, "number of composite graphs");
  gen_cmd->add_option("-o,--out", gen.out, "output directory");

  PlanFlags plan;
  auto* plan_cmd = app.add_subcommand("plan", "build recovery plans for a collection");
  plan_cmd->add_option("--registry", plan.registry_path, "registry JSON")->required();
  plan_cmd->add_option("--collection", plan.collection_path, "collection JSON")->required();
  plan_cmd->add_option("--epsilon", plan.params.epsilon, "QoS closeness bound");
  plan_cmd->add_option("--max-size", plan.params.max_size, "composition size bound");
  plan_cmd->add_option("--max-fragment-size", plan.params.max_fragment_size,
                       "fragment size bound (0 = unbounded)");
  plan_cmd->add_flag("--strict-exact", plan.params.strict_exact, "accept EXACT matches only");
  plan_cmd->add_option("-o,--out", plan.out, "output directory");

  SimulateFlags sim;
  auto* sim_cmd = app.add_subcommand("simulate", "run the recovery-probability experiment");
  add_generator_flags(*sim_cmd, sim.params);
  sim_cmd->add_option("--graphs", sim.params.n_graphs, "graphs per trial");
  sim_cmd->add_option("--trials", sim.params.trials, "number of repetitions");
  sim_cmd->add_option("--max-size", sim.params.max_size, "composition size bound");
  sim_cmd->add_option("--max-fragment-size", sim.params.max_fragment_size,
                      "fragment size bound (0 = unbounded)");
  sim_cmd->add_flag("--strict-exact", sim.params.strict_exact, "accept EXACT matches only");
  sim_cmd->add_option("--strategies", sim.strategies, "comma list: atomic,composite");
  sim_cmd->add_option("--jobs", sim.jobs, "parallel trial workers");
  sim_cmd->add_option("-o,--out", sim.out, "output directory");

  ChartFlags chart_flags;
  auto* chart_cmd = app.add_subcommand("chart", "render the summary as an SVG bar chart");
  chart_cmd->add_option("--summary", chart_flags.summary_path, "summary JSON")->required();
  chart_cmd->add_flag("--by-order", chart_flags.by_order, "group bars by graph order");
  chart_cmd->add_option("-o,--out", chart_flags.out, "output SVG path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage error
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(gen);
    if (plan_cmd->parsed()) return cmd_plan(plan);
    if (sim_cmd->parsed()) return cmd_simulate(sim);
    if (chart_cmd->parsed()) return cmd_chart(chart_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
