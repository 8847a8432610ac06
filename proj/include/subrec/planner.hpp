#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrec/core.hpp"
#include "subrec/fragmentation.hpp"
#include "subrec/matchmaking.hpp"

namespace subrec {

struct BuildParams {
  double epsilon = 0.2;
  std::size_t max_size = 3;           // composition template size bound
  std::size_t max_fragment_size = 0;  // 0 = unbounded
  bool strict_exact = false;
};

// One precomputed option: replace `fragment` with `replacement`.
struct PlanEntry {
  Fragment fragment;
  ReplacementGraph replacement;
  MatchDegree degree = MatchDegree::FAIL;
  double distance = 0.0;
};

// Design-time product: for every node, the ordered replacement options
// for every fragment anchored there. Immutable after build; lookups do no
// matchmaking.
struct RecoveryPlan {
  std::string graph_id;
  BuildParams params;
  std::map<NodeId, std::vector<PlanEntry>> entries;
};

namespace detail {

inline bool plan_entry_less(const PlanEntry& a, const PlanEntry& b) {
  if (a.fragment.node_set.size() != b.fragment.node_set.size())
    return a.fragment.node_set.size() < b.fragment.node_set.size();
  if (a.degree != b.degree) return degree_rank(a.degree) < degree_rank(b.degree);
  if (a.distance != b.distance) return a.distance < b.distance;
  if (a.replacement.graph.id != b.replacement.graph.id)
    return a.replacement.graph.id < b.replacement.graph.id;
  return a.fragment.node_set < b.fragment.node_set;
}

}  // namespace detail

inline RecoveryPlan build_plan(const CompositeGraph& graph, const Registry& registry,
                               const Taxonomy& taxonomy, const BuildParams& params) {
  if (auto v = validate_graph(graph, registry.service_map(), taxonomy); !v.empty())
    throw std::invalid_argument("build_plan: invalid graph '" + graph.id + "': " + v.front());

  RecoveryPlan plan;
  plan.graph_id = graph.id;
  plan.params = params;

  // the same node set is reachable from each of its members; search once
  std::map<NodeSet, std::vector<ScoredCandidate>> memo;

  for (const auto& [node, sid] : graph.nodes) {
    auto& list = plan.entries[node];
    for (auto& frag : enumerate_fragments(graph, node, params.max_fragment_size)) {
      auto it = memo.find(frag.node_set);
      if (it == memo.end()) {
        Interface iface = fragment_interface(graph, frag, taxonomy, registry.service_map());
        QoS target = aggregate_qos(fragment_induced_subgraph(graph, frag),
                                   registry.service_map());
        std::set<ServiceId> exclude;
        for (const auto& n : frag.node_set) exclude.insert(graph.nodes.at(n));
        auto found = search_replacement_candidates(iface, target, registry, taxonomy,
                                                   params.epsilon, params.max_size, exclude,
                                                   params.strict_exact);
        it = memo.emplace(frag.node_set, std::move(found)).first;
      }
      for (const auto& cand : it->second)
        list.push_back(PlanEntry{frag, cand.replacement, cand.degree, cand.distance});
    }
    std::sort(list.begin(), list.end(), detail::plan_entry_less);
  }
  return plan;
}

// Pure lookup; no enumeration, no registry search.
inline const std::vector<PlanEntry>& plan_lookup(const RecoveryPlan& plan, const NodeId& failed) {
  auto it = plan.entries.find(failed);
  if (it == plan.entries.end())
    throw std::invalid_argument("plan_lookup: node '" + failed + "' not in plan for graph '" +
                                plan.graph_id + "'");
  return it->second;
}

}  // namespace subrec
