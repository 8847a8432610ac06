#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrec/core.hpp"
#include "subrec/fragmentation.hpp"
#include "subrec/matchmaking.hpp"
#include "subrec/planner.hpp"

namespace subrec {

enum class Strategy { ATOMIC, COMPOSITE };

inline const char* to_string(Strategy s) {
  return s == Strategy::ATOMIC ? "atomic" : "composite";
}

struct RecoveryOutcome {
  bool recovered = false;
  std::optional<CompositeGraph> graph;  // set iff recovered
  std::optional<PlanEntry> used;        // set iff recovered
};

namespace detail {

inline bool reachable(const std::map<NodeId, std::set<NodeId>>& succ, const NodeId& from,
                      const NodeId& to) {
  std::set<NodeId> seen{from};
  std::vector<NodeId> work{from};
  while (!work.empty()) {
    NodeId n = work.back();
    work.pop_back();
    if (n == to) return true;
    auto it = succ.find(n);
    if (it == succ.end()) continue;
    for (const auto& m : it->second)
      if (seen.insert(m).second) work.push_back(m);
  }
  return false;
}

}  // namespace detail

// Splice `replacement` in place of `fragment`: drop the fragment nodes
// and their edges, insert the replacement with freshened node ids, then
// rewire until every node input is fed again. Rewiring prefers producers
// that already fed the removed fragment, then replacement nodes, then the
// lexicographically smallest id; it never picks a producer that would
// close a cycle. A rewiring dead end is a candidate failure (nullopt),
// not an error.
inline std::optional<CompositeGraph> apply_replacement(const CompositeGraph& graph,
                                                       const Fragment& fragment,
                                                       const ReplacementGraph& replacement,
                                                       const Taxonomy& taxonomy,
                                                       const ServiceMap& services) {
  check_fragment(graph, fragment);
  Interface required = fragment_interface(graph, fragment, taxonomy, services);
  Interface offered =
      detail::composition_interface(replacement.graph, services, taxonomy);
  if (detail::match_degree_impl(required, offered, taxonomy) == MatchDegree::FAIL)
    throw std::invalid_argument("apply_replacement: replacement '" + replacement.graph.id +
                                "' does not match the fragment interface");

  // nodes that fed the removed fragment from outside
  std::set<NodeId> boundary_feeders;
  for (const auto& [a, b] : graph.edges)
    if (!fragment.node_set.count(a) && fragment.node_set.count(b)) boundary_feeders.insert(a);

  CompositeGraph result;
  result.id = graph.id;
  result.graph_inputs = graph.graph_inputs;
  result.graph_outputs = graph.graph_outputs;
  for (const auto& [n, sid] : graph.nodes)
    if (!fragment.node_set.count(n)) result.nodes[n] = sid;
  for (const auto& [a, b] : graph.edges)
    if (!fragment.node_set.count(a) && !fragment.node_set.count(b)) result.edges.insert({a, b});

  // freshen replacement node ids against every original id (removed ones
  // included, so a recovered graph can never reuse the failed node id)
  std::map<NodeId, NodeId> rename;
  std::set<NodeId> replacement_nodes;
  for (const auto& [n, sid] : replacement.graph.nodes) {
    NodeId fresh = n;
    int k = 0;
    while (graph.has_node(fresh) || result.has_node(fresh))
      fresh = n + "_r" + std::to_string(++k);
    rename[n] = fresh;
    result.nodes[fresh] = sid;
    replacement_nodes.insert(fresh);
  }
  for (const auto& [a, b] : replacement.graph.edges)
    result.edges.insert({rename.at(a), rename.at(b)});

  auto succ_sets = [&]() {
    std::map<NodeId, std::set<NodeId>> s;
    for (const auto& [a, b] : result.edges) s[a].insert(b);
    return s;
  };

  // rewire until every input is fed; edges only add ancestry, so the
  // satisfied set grows monotonically and the loop terminates
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [n, sid] : result.nodes) {
      ConceptSet upstream = result.graph_inputs;
      for (const auto& a : ancestors_of(result, n)) {
        const auto& svc = services.at(result.nodes.at(a));
        upstream.insert(svc.outputs.begin(), svc.outputs.end());
      }
      for (const auto& c : services.at(sid).inputs) {
        if (satisfied_by_any(taxonomy, upstream, c)) continue;
        auto succ = succ_sets();
        auto eligible = [&](const NodeId& p) {
          if (p == n) return false;
          if (!satisfied_by_any(taxonomy, services.at(result.nodes.at(p)).outputs, c))
            return false;
          return !detail::reachable(succ, n, p);
        };
        std::optional<NodeId> producer;
        for (const auto& p : boundary_feeders)
          if (result.has_node(p) && eligible(p) && (!producer || p < *producer)) producer = p;
        if (!producer)
          for (const auto& p : replacement_nodes)
            if (eligible(p) && (!producer || p < *producer)) producer = p;
        if (!producer)
          for (const auto& [p, psid] : result.nodes)
            if (eligible(p) && (!producer || p < *producer)) producer = p;
        if (!producer) return std::nullopt;  // splice dead end
        result.edges.insert({*producer, n});
        changed = true;
      }
    }
  }

  if (!validate_graph(result, services, taxonomy).empty()) return std::nullopt;
  return result;
}

// Run-time phase: walk the precomputed entries for the failed node and
// apply the first one that splices cleanly. ATOMIC considers only the
// singleton fragment with an order-1 replacement; COMPOSITE considers
// every entry whose fragment contains the failed node.
inline RecoveryOutcome recover(const CompositeGraph& graph, const NodeId& failed,
                               const RecoveryPlan& plan, Strategy strategy,
                               const Taxonomy& taxonomy, const ServiceMap& services) {
  if (!graph.has_node(failed))
    throw std::invalid_argument("recover: unknown node '" + failed + "'");
  if (plan.graph_id != graph.id)
    throw std::invalid_argument("recover: plan was built for graph '" + plan.graph_id +
                                "', not '" + graph.id + "'");

  for (const auto& entry : plan_lookup(plan, failed)) {
    if (!entry.fragment.node_set.count(failed)) continue;
    if (strategy == Strategy::ATOMIC) {
      if (entry.fragment.node_set.size() != 1) continue;
      if (entry.replacement.graph.order() != 1) continue;
    }
    if (auto g = apply_replacement(graph, entry.fragment, entry.replacement, taxonomy, services))
      return RecoveryOutcome{true, std::move(g), entry};
  }
  return RecoveryOutcome{};
}

}  // namespace subrec
