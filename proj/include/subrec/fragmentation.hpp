#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrec/core.hpp"

namespace subrec {

// true iff no directed path between two members of `node_set` passes
// through a non-member. Equivalent test: no outside node is both
// reachable from the set and able to reach it.
inline bool is_convex(const CompositeGraph& g, const NodeSet& node_set) {
  if (node_set.empty()) throw std::invalid_argument("is_convex: empty node set");
  for (const auto& n : node_set)
    if (!g.has_node(n)) throw std::invalid_argument("is_convex: unknown node '" + n + "'");
  NodeSet below = descendants_of(g, node_set);
  NodeSet above = ancestors_of(g, node_set);
  for (const auto& x : below) {
    if (node_set.count(x)) continue;
    if (above.count(x)) return false;
  }
  return true;
}

inline bool is_weakly_connected(const CompositeGraph& g, const NodeSet& node_set) {
  if (node_set.empty()) return false;
  // undirected adjacency restricted to the set
  std::map<NodeId, std::vector<NodeId>> adj;
  for (const auto& n : node_set) adj[n];
  for (const auto& [a, b] : g.edges) {
    if (node_set.count(a) && node_set.count(b)) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
  }
  NodeSet seen{*node_set.begin()};
  std::vector<NodeId> work{*node_set.begin()};
  while (!work.empty()) {
    NodeId n = work.back();
    work.pop_back();
    for (const auto& m : adj[n])
      if (seen.insert(m).second) work.push_back(m);
  }
  return seen.size() == node_set.size();
}

// All convex, weakly connected node subsets containing `anchor`, of size
// <= max_size (0 = unbounded). Grown level by level from the singleton by
// adding weakly adjacent nodes; non-convex intermediates stay in the
// frontier because their supersets can be convex again. Result order:
// size ascending, then lexicographic node ids.
inline std::vector<Fragment> enumerate_fragments(const CompositeGraph& g, const NodeId& anchor,
                                                 std::size_t max_size = 0) {
  if (!g.has_node(anchor))
    throw std::invalid_argument("enumerate_fragments: unknown anchor '" + anchor + "'");
  std::size_t bound = max_size == 0 ? g.order() : std::min(max_size, g.order());

  // undirected neighbours
  std::map<NodeId, NodeSet> nbr;
  for (const auto& [a, b] : g.edges) {
    nbr[a].insert(b);
    nbr[b].insert(a);
  }

  std::set<NodeSet> frontier{NodeSet{anchor}};
  std::set<NodeSet> seen = frontier;
  std::vector<NodeSet> accepted;
  while (!frontier.empty()) {
    std::set<NodeSet> next;
    for (const auto& s : frontier) {
      if (is_convex(g, s)) accepted.push_back(s);
      if (s.size() >= bound) continue;
      for (const auto& n : s) {
        auto it = nbr.find(n);
        if (it == nbr.end()) continue;
        for (const auto& m : it->second) {
          if (s.count(m)) continue;
          NodeSet grown = s;
          grown.insert(m);
          if (seen.insert(grown).second) next.insert(grown);
        }
      }
    }
    frontier = std::move(next);
  }

  std::sort(accepted.begin(), accepted.end(), [](const NodeSet& a, const NodeSet& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });

  std::vector<Fragment> out;
  out.reserve(accepted.size());
  for (auto& s : accepted) out.push_back(Fragment{g.id, std::move(s), anchor});
  return out;
}

inline void check_fragment(const CompositeGraph& g, const Fragment& f) {
  if (f.graph_id != g.id)
    throw std::invalid_argument("fragment: graph id mismatch ('" + f.graph_id + "' vs '" +
                                g.id + "')");
  if (f.node_set.empty()) throw std::invalid_argument("fragment: empty node set");
  if (!f.node_set.count(f.anchor))
    throw std::invalid_argument("fragment: anchor '" + f.anchor + "' not in node set");
  for (const auto& n : f.node_set)
    if (!g.has_node(n)) throw std::invalid_argument("fragment: unknown node '" + n + "'");
  if (!is_weakly_connected(g, f.node_set))
    throw std::invalid_argument("fragment: node set not weakly connected");
  if (!is_convex(g, f.node_set))
    throw std::invalid_argument("fragment: node set not convex");
}

// Subgraph induced by the fragment's nodes; graph inputs/outputs are left
// empty (callers aggregate QoS over structure only).
inline CompositeGraph fragment_induced_subgraph(const CompositeGraph& g, const Fragment& f) {
  CompositeGraph sub;
  sub.id = g.id + "/" + f.anchor;
  for (const auto& n : f.node_set) sub.nodes[n] = g.nodes.at(n);
  for (const auto& [a, b] : g.edges)
    if (f.node_set.count(a) && f.node_set.count(b)) sub.edges.insert({a, b});
  return sub;
}

// The fragment's externally visible interface.
//   required_inputs: node inputs not covered by outputs of fragment-
//   internal ancestors.
//   provided_outputs: node outputs consumed (via subsumption) by some
//   node outside the fragment, or declared as graph outputs. Outputs used
//   only inside the fragment are dropped.
inline Interface fragment_interface(const CompositeGraph& g, const Fragment& f,
                                    const Taxonomy& taxonomy, const ServiceMap& services) {
  check_fragment(g, f);
  CompositeGraph sub = fragment_induced_subgraph(g, f);

  Interface iface;
  for (const auto& n : f.node_set) {
    ConceptSet internal_upstream;
    for (const auto& a : ancestors_of(sub, n)) {
      const auto& svc = services.at(g.nodes.at(a));
      internal_upstream.insert(svc.outputs.begin(), svc.outputs.end());
    }
    for (const auto& c : services.at(g.nodes.at(n)).inputs)
      if (!satisfied_by_any(taxonomy, internal_upstream, c)) iface.required_inputs.insert(c);
  }

  for (const auto& n : f.node_set) {
    for (const auto& o : services.at(g.nodes.at(n)).outputs) {
      bool visible = g.graph_outputs.count(o) != 0;
      for (auto it = g.nodes.begin(); !visible && it != g.nodes.end(); ++it) {
        if (f.node_set.count(it->first)) continue;
        for (const auto& c : services.at(it->second).inputs)
          if (satisfies(taxonomy, o, c)) {
            visible = true;
            break;
          }
      }
      if (visible) iface.provided_outputs.insert(o);
    }
  }
  return iface;
}

}  // namespace subrec
