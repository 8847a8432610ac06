#pragma once

// Independent brute-force oracles. These deliberately avoid the library's
// algorithms: connectivity by union-find, convexity by explicit path
// enumeration, composition search by plain loops over all sequences and
// subsets, longest path by exhaustive DFS.

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "subrec/core.hpp"
#include "subrec/matchmaking.hpp"

namespace subrec::oracle {

inline bool weakly_connected_union_find(const CompositeGraph& g, const NodeSet& set) {
  std::map<NodeId, NodeId> parent;
  for (const auto& n : set) parent[n] = n;
  std::function<NodeId(NodeId)> find = [&](NodeId n) {
    while (parent[n] != n) n = parent[n] = parent[parent[n]];
    return n;
  };
  for (const auto& [a, b] : g.edges)
    if (set.count(a) && set.count(b)) parent[find(a)] = find(b);
  std::set<NodeId> roots;
  for (const auto& n : set) roots.insert(find(n));
  return roots.size() == 1;
}

// every directed path between two members stays inside the set, checked
// by enumerating all simple paths
inline bool convex_by_paths(const CompositeGraph& g, const NodeSet& set) {
  auto succ = g.successors();
  bool ok = true;
  std::vector<NodeId> path;
  std::set<NodeId> on_path;
  std::function<void(const NodeId&, const NodeId&)> dfs = [&](const NodeId& cur,
                                                              const NodeId& target) {
    if (!ok) return;
    if (cur == target && path.size() > 1) {
      for (std::size_t i = 1; i + 1 < path.size(); ++i)
        if (!set.count(path[i])) ok = false;
      return;
    }
    for (const auto& next : succ[cur]) {
      if (on_path.count(next)) continue;
      path.push_back(next);
      on_path.insert(next);
      dfs(next, target);
      on_path.erase(next);
      path.pop_back();
    }
  };
  for (const auto& u : set) {
    for (const auto& v : set) {
      if (u == v) continue;
      path = {u};
      on_path = {u};
      dfs(u, v);
      if (!ok) return false;
    }
  }
  return true;
}

// all anchored, weakly connected, convex subsets of size <= max_size
// (0 = unbounded), by testing every one of the 2^order subsets
inline std::vector<NodeSet> brute_force_fragments(const CompositeGraph& g, const NodeId& anchor,
                                                  std::size_t max_size = 0) {
  std::vector<NodeId> ids;
  for (const auto& [n, s] : g.nodes) ids.push_back(n);
  std::vector<NodeSet> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << ids.size()); ++mask) {
    NodeSet set;
    for (std::size_t i = 0; i < ids.size(); ++i)
      if (mask & (std::size_t{1} << i)) set.insert(ids[i]);
    if (!set.count(anchor)) continue;
    if (max_size && set.size() > max_size) continue;
    if (!weakly_connected_union_find(g, set)) continue;
    if (!convex_by_paths(g, set)) continue;
    out.push_back(std::move(set));
  }
  std::sort(out.begin(), out.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// exhaustive longest path / summed cost, no topological sorting
inline QoS brute_force_aggregate(const CompositeGraph& g, const ServiceMap& services) {
  auto succ = g.successors();
  std::function<double(const NodeId&)> longest = [&](const NodeId& n) {
    double best = 0.0;
    for (const auto& m : succ[n]) best = std::max(best, longest(m));
    return best + services.at(g.nodes.at(n)).qos.exec_time_ms;
  };
  QoS total;
  for (const auto& [n, sid] : g.nodes) {
    total.exec_time_ms = std::max(total.exec_time_ms, longest(n));
    total.cost += services.at(sid).qos.cost;
  }
  return total;
}

// ---- composition-search oracle ---------------------------------------------

struct OracleCandidate {
  std::string canonical_id;
  QoS aggregate;
};

inline bool consumes_output_of(const AtomicService& later, const AtomicService& earlier,
                               const Taxonomy& taxonomy) {
  for (const auto& i : later.inputs)
    for (const auto& o : earlier.outputs)
      if (satisfies(taxonomy, o, i)) return true;
  return false;
}

inline bool provides_required_output(const AtomicService& s, const Interface& required,
                                     const Taxonomy& taxonomy) {
  for (const auto& o : s.outputs)
    for (const auto& r : required.provided_outputs)
      if (satisfies(taxonomy, o, r)) return true;
  return false;
}

// candidate interface per the template-family definition: unmet inputs
// against all earlier stages, union of all outputs
inline Interface sequence_interface(const std::vector<AtomicService>& stages,
                                    const Taxonomy& taxonomy, bool chained) {
  Interface iface;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    ConceptSet upstream;
    if (chained)
      for (std::size_t j = 0; j < i; ++j)
        upstream.insert(stages[j].outputs.begin(), stages[j].outputs.end());
    for (const auto& c : stages[i].inputs)
      if (!satisfied_by_any(taxonomy, upstream, c)) iface.required_inputs.insert(c);
    iface.provided_outputs.insert(stages[i].outputs.begin(), stages[i].outputs.end());
  }
  return iface;
}

// all matching candidates over the same template family, by plain
// enumeration of every service sequence and subset
inline std::set<std::string> brute_force_candidate_ids(
    const Interface& required, const QoS& target, const Registry& registry,
    const Taxonomy& taxonomy, double epsilon, std::size_t max_size,
    const std::set<ServiceId>& exclude, bool strict_exact = false) {
  std::vector<AtomicService> pool;
  for (const auto& s : registry.services())
    if (!exclude.count(s.id)) pool.push_back(s);

  std::set<std::string> ids;
  auto accept = [&](const std::string& id, const Interface& iface, const QoS& qos) {
    if (qos_distance(target, qos) > epsilon) return;
    MatchDegree d = detail::match_degree_impl(required, iface, taxonomy);
    if (d == MatchDegree::FAIL) return;
    if (strict_exact && d != MatchDegree::EXACT) return;
    ids.insert(id);
  };

  for (const auto& s : pool)
    accept("atomic:" + s.id, Interface{s.inputs, s.outputs}, s.qos);

  // chains: every permutation of every subset, consecutive consumption,
  // last stage provides a required output
  std::vector<AtomicService> seq;
  std::set<ServiceId> used;
  std::function<void()> chains = [&]() {
    if (seq.size() >= 2 && provides_required_output(seq.back(), required, taxonomy)) {
      QoS qos{0.0, 0.0};
      std::string id = "chain:";
      for (std::size_t i = 0; i < seq.size(); ++i) {
        qos.exec_time_ms += seq[i].qos.exec_time_ms;
        qos.cost += seq[i].qos.cost;
        if (i) id += ">";
        id += seq[i].id;
      }
      accept(id, sequence_interface(seq, taxonomy, true), qos);
    }
    if (seq.size() >= max_size) return;
    for (const auto& s : pool) {
      if (used.count(s.id)) continue;
      if (!seq.empty() && !consumes_output_of(s, seq.back(), taxonomy)) continue;
      seq.push_back(s);
      used.insert(s.id);
      chains();
      used.erase(s.id);
      seq.pop_back();
    }
  };
  chains();

  // bundles: every subset of size 2..max_size, each member providing a
  // required output
  std::vector<AtomicService> subset;
  std::function<void(std::size_t)> bundles = [&](std::size_t from) {
    if (subset.size() >= 2) {
      bool all_provide = true;
      for (const auto& s : subset)
        if (!provides_required_output(s, required, taxonomy)) all_provide = false;
      if (all_provide) {
        QoS qos{0.0, 0.0};
        std::vector<ServiceId> names;
        for (const auto& s : subset) {
          qos.exec_time_ms = std::max(qos.exec_time_ms, s.qos.exec_time_ms);
          qos.cost += s.qos.cost;
          names.push_back(s.id);
        }
        std::sort(names.begin(), names.end());
        std::string id = "par:";
        for (std::size_t i = 0; i < names.size(); ++i) id += (i ? "+" : "") + names[i];
        accept(id, sequence_interface(subset, taxonomy, false), qos);
      }
    }
    if (subset.size() >= max_size) return;
    for (std::size_t i = from; i < pool.size(); ++i) {
      subset.push_back(pool[i]);
      bundles(i + 1);
      subset.pop_back();
    }
  };
  bundles(0);

  return ids;
}

}  // namespace subrec::oracle
