#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <sstream>

#include "helpers.hpp"
#include "subrec/chart.hpp"
#include "subrec/io.hpp"
#include "subrec/simulation.hpp"

using namespace subrec;
using nlohmann::json;

namespace {

GeneratorParams small_params() {
  GeneratorParams p;
  p.n_services = 15;
  p.n_graphs = 8;
  p.trials = 2;
  return p;
}

}  // namespace

TEST_CASE("registry json round trip preserves taxonomy and services") {
  GeneratorParams params = small_params();
  Taxonomy t = generate_taxonomy(7, params.n_concepts, params.taxonomy_depth);
  Registry reg = generate_registry(8, t, params);

  json j = io::registry_to_json(t, reg);
  Taxonomy t2 = io::taxonomy_from_json(j);
  Registry reg2 = Registry::build(io::services_from_json(j), t2);

  CHECK(io::registry_to_json(t2, reg2).dump() == j.dump());
  CHECK(t2.size() == t.size());
  CHECK(reg2.services().size() == reg.services().size());
}

TEST_CASE("taxonomy_from_json resolves out-of-order parents and rejects cycles") {
  json j = {{"concepts", json::array({json{{"id", "child"}, {"parent", "root"}},
                                      json{{"id", "root"}}})},
            {"services", json::array()}};
  Taxonomy t = io::taxonomy_from_json(j);
  CHECK(t.size() == 2);
  CHECK(satisfies(t, "child", "root"));

  json bad = {{"concepts", json::array({json{{"id", "a"}, {"parent", "b"}},
                                        json{{"id", "b"}, {"parent", "a"}}})}};
  CHECK_THROWS_AS(io::taxonomy_from_json(bad), std::invalid_argument);
}

TEST_CASE("collection json round trip preserves graphs") {
  GeneratorParams params = small_params();
  Taxonomy t = generate_taxonomy(7, params.n_concepts, params.taxonomy_depth);
  Registry reg = generate_registry(8, t, params);
  auto graphs = generate_collection(9, reg, t, 20, 2, 6);

  json j = io::collection_to_json(graphs);
  auto back = io::collection_from_json(j);
  REQUIRE(back.size() == graphs.size());
  for (std::size_t i = 0; i < graphs.size(); ++i) {
    CHECK(back[i].id == graphs[i].id);
    CHECK(back[i].nodes == graphs[i].nodes);
    CHECK(back[i].edges == graphs[i].edges);
    CHECK(back[i].graph_inputs == graphs[i].graph_inputs);
    CHECK(back[i].graph_outputs == graphs[i].graph_outputs);
  }
  CHECK(io::collection_to_json(back).dump() == j.dump());
}

TEST_CASE("plan json round trip preserves entries, params and lookup results") {
  GeneratorParams params = small_params();
  Taxonomy t = generate_taxonomy(7, params.n_concepts, params.taxonomy_depth);
  Registry reg = generate_registry(8, t, params);
  auto graphs = generate_collection(9, reg, t, 6, 2, 5);

  BuildParams bp;
  bp.epsilon = 0.25;
  bp.max_size = 2;
  for (const auto& g : graphs) {
    RecoveryPlan plan = build_plan(g, reg, t, bp);
    json j = io::plan_to_json(plan);
    RecoveryPlan back = io::plan_from_json(j);
    CHECK(back.graph_id == plan.graph_id);
    CHECK(back.params.epsilon == plan.params.epsilon);
    CHECK(back.params.max_size == plan.params.max_size);
    CHECK(io::plan_to_json(back).dump() == j.dump());
    for (const auto& [node, entries] : plan.entries) {
      const auto& be = plan_lookup(back, node);
      REQUIRE(be.size() == entries.size());
      for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(be[i].fragment.node_set == entries[i].fragment.node_set);
        CHECK(be[i].replacement.graph.id == entries[i].replacement.graph.id);
        CHECK(be[i].degree == entries[i].degree);
        CHECK(be[i].distance == doctest::Approx(entries[i].distance));
      }
    }
  }
}

TEST_CASE("summary json matches the published schema") {
  auto report = run_experiment(small_params());
  json j = io::summary_to_json(report);
  json schema = json::parse(io::read_file(std::string(SUBREC_SCHEMA_DIR) +
                                          "/summary.schema.json"));

  for (const auto& key : schema.at("required")) CHECK(j.contains(key.get<std::string>()));
  for (const auto& key : schema.at("properties").at("config").at("required"))
    CHECK(j.at("config").contains(key.get<std::string>()));

  const auto& strat_schema =
      schema.at("properties").at("strategies").at("additionalProperties");
  REQUIRE(j.at("strategies").contains("atomic"));
  REQUIRE(j.at("strategies").contains("composite"));
  for (const auto& [name, js] : j.at("strategies").items()) {
    for (const auto& key : strat_schema.at("required")) CHECK(js.contains(key.get<std::string>()));
    for (const auto& [order, jo] : js.at("per_order").items()) {
      CHECK(jo.at("events").is_number_unsigned());
      CHECK(jo.at("recovered").is_number_unsigned());
      double p = jo.at("probability").get<double>();
      CHECK(p >= 0.0);
      CHECK(p <= 1.0);
    }
  }
  CHECK(j.at("tool_version").get<std::string>() == io::kToolVersion);
  CHECK(j.at("runtime_matchmaking_calls").get<std::uint64_t>() == 0);
}

TEST_CASE("csv report has the documented layout") {
  auto params = small_params();
  auto report = run_experiment(params);
  std::istringstream csv(io::report_to_csv(report));

  std::string line;
  REQUIRE(std::getline(csv, line));
  CHECK(line == "strategy,trial,order,events,recovered,probability");

  std::size_t rows = 0;
  std::string prev_strategy;
  while (std::getline(csv, line)) {
    ++rows;
    std::istringstream row(line);
    std::string strategy, trial, order, events, recovered, probability;
    REQUIRE(std::getline(row, strategy, ','));
    REQUIRE(std::getline(row, trial, ','));
    REQUIRE(std::getline(row, order, ','));
    REQUIRE(std::getline(row, events, ','));
    REQUIRE(std::getline(row, recovered, ','));
    REQUIRE(std::getline(row, probability, ','));
    CHECK((strategy == "atomic" || strategy == "composite"));
    CHECK(strategy >= prev_strategy);
    prev_strategy = strategy;
    CHECK(std::stoull(trial) < params.trials);
    CHECK(std::stoull(recovered) <= std::stoull(events));
    // fixed six decimals
    auto dot = probability.find('.');
    REQUIRE(dot != std::string::npos);
    CHECK(probability.size() - dot - 1 == 6);
    double p = std::stod(probability);
    double expect = std::stoull(events) == 0
                        ? 0.0
                        : static_cast<double>(std::stoull(recovered)) /
                              static_cast<double>(std::stoull(events));
    CHECK(p == doctest::Approx(expect).epsilon(1e-5));
  }
  CHECK(rows > 0);
}

TEST_CASE("file helpers and manifests") {
  CHECK(io::fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a64_hex("a") != io::fnv1a64_hex("b"));

  std::string path = "io_test_tmp.txt";
  io::write_file(path, "hello");
  CHECK(io::read_file(path) == "hello");

  json m = io::make_manifest("gen", json{{"seed", 1}}, {}, {path});
  CHECK(m.at("tool_version") == io::kToolVersion);
  CHECK(m.at("command") == "gen");
  CHECK(m.at("inputs").empty());
  REQUIRE(m.at("outputs").size() == 1);
  CHECK(m.at("outputs")[0].at("path") == path);
  CHECK(m.at("outputs")[0].at("fnv1a64") == io::fnv1a64_hex("hello"));
  std::remove(path.c_str());

  CHECK_THROWS_AS(io::read_file("does_not_exist_12345"), std::runtime_error);
}

TEST_CASE("svg chart renders bars for each strategy") {
  auto report = run_experiment(small_params());
  json summary = io::summary_to_json(report);

  std::string svg = chart::render_svg(summary, false);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("atomic") != std::string::npos);
  CHECK(svg.find("composite") != std::string::npos);
  CHECK(svg.find("Recovery Probability") != std::string::npos);

  std::string by_order = chart::render_svg(summary, true);
  CHECK(by_order.find("</svg>") != std::string::npos);
  // grouped mode must label every order present in the summary
  for (const auto& [order, jo] :
       summary.at("strategies").at("atomic").at("per_order").items())
    CHECK(by_order.find("order " + order + "<") != std::string::npos);

  CHECK_THROWS_AS(chart::render_svg(json{{"strategies", json::object()}}, false),
                  std::invalid_argument);
  json no_orders = summary;
  for (auto& [name, js] : no_orders.at("strategies").items()) js.erase("per_order");
  CHECK_THROWS_AS(chart::render_svg(no_orders, true), std::invalid_argument);
}
