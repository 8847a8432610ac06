#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "subrec/core.hpp"
#include "subrec/matchmaking.hpp"
#include "subrec/planner.hpp"
#include "subrec/simulation.hpp"

namespace subrec::io {

using nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";

// ---- registry file: taxonomy + services -------------------------------

inline json registry_to_json(const Taxonomy& taxonomy, const Registry& registry) {
  json concepts = json::array();
  for (const auto& [id, c] : taxonomy.concepts()) {
    json jc{{"id", id}};
    if (c.parent) jc["parent"] = *c.parent;
    concepts.push_back(std::move(jc));
  }
  json services = json::array();
  for (const auto& s : registry.services()) {
    services.push_back(json{{"id", s.id},
                            {"inputs", s.inputs},
                            {"outputs", s.outputs},
                            {"qos", {{"time_ms", s.qos.exec_time_ms}, {"cost", s.qos.cost}}}});
  }
  return json{{"concepts", std::move(concepts)}, {"services", std::move(services)}};
}

inline Taxonomy taxonomy_from_json(const json& j) {
  Taxonomy t;
  // concepts may be listed in any order; insert parents first
  std::vector<Concept> pending;
  for (const auto& jc : j.at("concepts")) {
    Concept c;
    c.id = jc.at("id").get<std::string>();
    if (jc.contains("parent")) c.parent = jc.at("parent").get<std::string>();
    pending.push_back(std::move(c));
  }
  while (!pending.empty()) {
    std::size_t before = pending.size();
    std::vector<Concept> next;
    for (auto& c : pending) {
      if (!c.parent || t.contains(*c.parent))
        t.add(std::move(c));
      else
        next.push_back(std::move(c));
    }
    if (next.size() == before)
      throw std::invalid_argument("registry file: unresolvable concept parents");
    pending = std::move(next);
  }
  return t;
}

inline std::vector<AtomicService> services_from_json(const json& j) {
  std::vector<AtomicService> out;
  for (const auto& js : j.at("services")) {
    AtomicService s;
    s.id = js.at("id").get<std::string>();
    for (const auto& c : js.at("inputs")) s.inputs.insert(c.get<std::string>());
    for (const auto& c : js.at("outputs")) s.outputs.insert(c.get<std::string>());
    s.qos.exec_time_ms = js.at("qos").at("time_ms").get<double>();
    s.qos.cost = js.at("qos").at("cost").get<double>();
    out.push_back(std::move(s));
  }
  return out;
}

// ---- collection file ---------------------------------------------------

inline json graph_to_json(const CompositeGraph& g) {
  json nodes = json::array();
  for (const auto& [n, sid] : g.nodes) nodes.push_back(json{{"node", n}, {"service", sid}});
  json edges = json::array();
  for (const auto& [a, b] : g.edges) edges.push_back(json::array({a, b}));
  return json{{"id", g.id},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)},
              {"inputs", g.graph_inputs},
              {"outputs", g.graph_outputs}};
}

inline CompositeGraph graph_from_json(const json& j) {
  CompositeGraph g;
  g.id = j.at("id").get<std::string>();
  for (const auto& jn : j.at("nodes"))
    g.nodes[jn.at("node").get<std::string>()] = jn.at("service").get<std::string>();
  for (const auto& je : j.at("edges"))
    g.edges.insert({je.at(0).get<std::string>(), je.at(1).get<std::string>()});
  for (const auto& c : j.at("inputs")) g.graph_inputs.insert(c.get<std::string>());
  for (const auto& c : j.at("outputs")) g.graph_outputs.insert(c.get<std::string>());
  return g;
}

inline json collection_to_json(const std::vector<CompositeGraph>& graphs) {
  json out = json::array();
  for (const auto& g : graphs) out.push_back(graph_to_json(g));
  return out;
}

inline std::vector<CompositeGraph> collection_from_json(const json& j) {
  std::vector<CompositeGraph> out;
  for (const auto& jg : j) out.push_back(graph_from_json(jg));
  return out;
}

// ---- plan file ----------------------------------------------------------

inline json plan_to_json(const RecoveryPlan& plan) {
  json nodes = json::object();
  for (const auto& [node, entries] : plan.entries) {
    json list = json::array();
    for (const auto& e : entries) {
      json jr = graph_to_json(e.replacement.graph);
      jr["qos"] = {{"time_ms", e.replacement.aggregate.exec_time_ms},
                   {"cost", e.replacement.aggregate.cost}};
      list.push_back(json{{"fragment", {{"anchor", e.fragment.anchor},
                                        {"nodes", e.fragment.node_set}}},
                          {"replacement", std::move(jr)},
                          {"degree", to_string(e.degree)},
                          {"distance", e.distance}});
    }
    nodes[node] = std::move(list);
  }
  return json{{"graph", plan.graph_id},
              {"params",
               {{"epsilon", plan.params.epsilon},
                {"max_size", plan.params.max_size},
                {"max_fragment_size", plan.params.max_fragment_size},
                {"strict_exact", plan.params.strict_exact}}},
              {"nodes", std::move(nodes)}};
}

inline MatchDegree degree_from_string(const std::string& s) {
  if (s == "EXACT") return MatchDegree::EXACT;
  if (s == "PLUGIN") return MatchDegree::PLUGIN;
  if (s == "FAIL") return MatchDegree::FAIL;
  throw std::invalid_argument("unknown match degree '" + s + "'");
}

inline RecoveryPlan plan_from_json(const json& j) {
  RecoveryPlan plan;
  plan.graph_id = j.at("graph").get<std::string>();
  const auto& jp = j.at("params");
  plan.params.epsilon = jp.at("epsilon").get<double>();
  plan.params.max_size = jp.at("max_size").get<std::size_t>();
  plan.params.max_fragment_size = jp.at("max_fragment_size").get<std::size_t>();
  plan.params.strict_exact = jp.at("strict_exact").get<bool>();
  for (const auto& [node, list] : j.at("nodes").items()) {
    auto& entries = plan.entries[node];
    for (const auto& je : list) {
      PlanEntry e;
      e.fragment.graph_id = plan.graph_id;
      e.fragment.anchor = je.at("fragment").at("anchor").get<std::string>();
      for (const auto& n : je.at("fragment").at("nodes"))
        e.fragment.node_set.insert(n.get<std::string>());
      e.replacement.graph = graph_from_json(je.at("replacement"));
      e.replacement.aggregate.exec_time_ms =
          je.at("replacement").at("qos").at("time_ms").get<double>();
      e.replacement.aggregate.cost = je.at("replacement").at("qos").at("cost").get<double>();
      e.degree = degree_from_string(je.at("degree").get<std::string>());
      e.distance = je.at("distance").get<double>();
      entries.push_back(std::move(e));
    }
  }
  return plan;
}

// ---- experiment report ---------------------------------------------------

inline json params_to_json(const GeneratorParams& p) {
  return json{{"seed", p.seed},
              {"n_concepts", p.n_concepts},
              {"taxonomy_depth", p.taxonomy_depth},
              {"n_services", p.n_services},
              {"n_graphs", p.n_graphs},
              {"order_min", p.order_min},
              {"order_max", p.order_max},
              {"p_atomic_substitute", p.p_atomic_substitute},
              {"p_chain_substitute", p.p_chain_substitute},
              {"epsilon", p.epsilon},
              {"max_size", p.max_size},
              {"max_fragment_size", p.max_fragment_size},
              {"strict_exact", p.strict_exact},
              {"trials", p.trials}};
}

inline json summary_to_json(const Report& report) {
  json strategies = json::object();
  for (const auto& [s, sr] : report.strategies) {
    json per_order = json::object();
    for (const auto& [order, oc] : sr.per_order) {
      per_order[std::to_string(order)] = {{"events", oc.events},
                                          {"recovered", oc.recovered},
                                          {"probability", sr.per_order_probability(order)}};
    }
    strategies[to_string(s)] = {{"mean", sr.mean},
                                {"stddev", sr.stddev},
                                {"pooled_probability", sr.pooled_probability},
                                {"per_trial", sr.per_trial},
                                {"per_order", std::move(per_order)}};
  }
  return json{{"tool_version", kToolVersion},
              {"config", params_to_json(report.config)},
              {"total_events", report.total_events},
              {"runtime_matchmaking_calls", report.runtime_matchmaking_calls},
              {"strategies", std::move(strategies)}};
}

// CSV schema (stable): strategy,trial,order,events,recovered,probability
// one row per (strategy, trial, order) stratum, strategies alphabetical,
// trials then orders ascending.
inline std::string report_to_csv(const Report& report) {
  std::ostringstream out;
  out << "strategy,trial,order,events,recovered,probability\n";
  char buf[32];
  for (const auto& [s, sr] : report.strategies) {
    for (std::size_t trial = 0; trial < report.trials.size(); ++trial) {
      const auto& counts = report.trials[trial].per_strategy.at(s);
      for (const auto& [order, oc] : counts.per_order) {
        double p = oc.events == 0
                       ? 0.0
                       : static_cast<double>(oc.recovered) / static_cast<double>(oc.events);
        std::snprintf(buf, sizeof buf, "%.6f", p);
        out << to_string(s) << ',' << trial << ',' << order << ',' << oc.events << ','
            << oc.recovered << ',' << buf << '\n';
      }
    }
  }
  return out.str();
}

// ---- files and manifests --------------------------------------------------

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

inline std::string fnv1a64_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Run manifest written beside every command's outputs: tool version, the
// full parameter echo, and content digests of the files involved.
inline json make_manifest(const std::string& command, const json& parameters,
                          const std::vector<std::string>& input_paths,
                          const std::vector<std::string>& output_paths) {
  json inputs = json::array();
  for (const auto& p : input_paths)
    inputs.push_back(json{{"path", p}, {"fnv1a64", fnv1a64_hex(read_file(p))}});
  json outputs = json::array();
  for (const auto& p : output_paths)
    outputs.push_back(json{{"path", p}, {"fnv1a64", fnv1a64_hex(read_file(p))}});
  return json{{"tool_version", kToolVersion},
              {"command", command},
              {"parameters", parameters},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)}};
}

}  // namespace subrec::io
