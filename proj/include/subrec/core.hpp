#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace subrec {

using ConceptId = std::string;
using ServiceId = std::string;
using NodeId = std::string;
using ConceptSet = std::set<ConceptId>;
using NodeSet = std::set<NodeId>;

// One node of the concept forest. Roots carry no parent.
struct Concept {
  ConceptId id;
  std::optional<ConceptId> parent;
};

// Rooted concept forest giving subsumption semantics for service
// interfaces. Parents must exist before their children, so chains are
// finite by construction.
class Taxonomy {
 public:
  void add(Concept c) {
    if (concepts_.count(c.id))
      throw std::invalid_argument("taxonomy: duplicate concept id '" + c.id + "'");
    if (c.parent && !concepts_.count(*c.parent))
      throw std::invalid_argument("taxonomy: unknown parent '" + *c.parent + "' for '" +
                                  c.id + "'");
    concepts_.emplace(c.id, std::move(c));
  }

  bool contains(const ConceptId& id) const { return concepts_.count(id) != 0; }

  const Concept& at(const ConceptId& id) const {
    auto it = concepts_.find(id);
    if (it == concepts_.end())
      throw std::invalid_argument("taxonomy: unknown concept id '" + id + "'");
    return it->second;
  }

  const std::map<ConceptId, Concept>& concepts() const { return concepts_; }

  std::size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }

  // Number of concepts on the chain from the root down to id, inclusive.
  int depth(const ConceptId& id) const {
    int d = 1;
    const Concept* c = &at(id);
    while (c->parent) {
      c = &at(*c->parent);
      ++d;
    }
    return d;
  }

 private:
  std::map<ConceptId, Concept> concepts_;
};

// true iff `available` equals `required` or is one of its descendants:
// a more specific concept satisfies a more general requirement.
inline bool satisfies(const Taxonomy& taxonomy, const ConceptId& available,
                      const ConceptId& required) {
  if (!taxonomy.contains(required))
    throw std::invalid_argument("satisfies: unknown concept id '" + required + "'");
  const Concept* c = &taxonomy.at(available);
  for (;;) {
    if (c->id == required) return true;
    if (!c->parent) return false;
    c = &taxonomy.at(*c->parent);
  }
}

inline bool satisfied_by_any(const Taxonomy& taxonomy, const ConceptSet& available,
                             const ConceptId& required) {
  for (const auto& a : available)
    if (satisfies(taxonomy, a, required)) return true;
  return false;
}

struct QoS {
  double exec_time_ms = 0.0;
  double cost = 0.0;
};

struct AtomicService {
  ServiceId id;
  ConceptSet inputs;   // may be empty (pure producer)
  ConceptSet outputs;  // never empty
  QoS qos;
};

using ServiceMap = std::map<ServiceId, AtomicService>;

// Acyclic digraph of service invocations. Edges are dependencies: the
// tail must complete before the head. Dataflow is recomputed from node
// interfaces, never stored per edge.
struct CompositeGraph {
  std::string id;
  std::map<NodeId, ServiceId> nodes;
  std::set<std::pair<NodeId, NodeId>> edges;
  ConceptSet graph_inputs;
  ConceptSet graph_outputs;

  std::size_t order() const { return nodes.size(); }
  bool has_node(const NodeId& n) const { return nodes.count(n) != 0; }

  std::map<NodeId, std::vector<NodeId>> successors() const {
    std::map<NodeId, std::vector<NodeId>> succ;
    for (const auto& [n, s] : nodes) succ[n];
    for (const auto& [a, b] : edges) succ[a].push_back(b);
    return succ;
  }

  std::map<NodeId, std::vector<NodeId>> predecessors() const {
    std::map<NodeId, std::vector<NodeId>> pred;
    for (const auto& [n, s] : nodes) pred[n];
    for (const auto& [a, b] : edges) pred[b].push_back(a);
    return pred;
  }
};

// Kahn topological order; nullopt when the edge set has a cycle.
// Deterministic: ready nodes are consumed in id order.
inline std::optional<std::vector<NodeId>> topological_order(const CompositeGraph& g) {
  std::map<NodeId, int> indeg;
  for (const auto& [n, s] : g.nodes) indeg[n] = 0;
  for (const auto& [a, b] : g.edges) {
    if (indeg.count(a) && indeg.count(b)) ++indeg[b];
  }
  std::set<NodeId> ready;
  for (const auto& [n, d] : indeg)
    if (d == 0) ready.insert(n);
  auto succ = g.successors();
  std::vector<NodeId> order;
  while (!ready.empty()) {
    NodeId n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    for (const auto& m : succ[n])
      if (indeg.count(m) && --indeg[m] == 0) ready.insert(m);
  }
  if (order.size() != g.nodes.size()) return std::nullopt;
  return order;
}

namespace detail {

inline NodeSet closure(const std::map<NodeId, std::vector<NodeId>>& adj, const NodeSet& from) {
  NodeSet seen = from;
  std::deque<NodeId> work(from.begin(), from.end());
  while (!work.empty()) {
    NodeId n = work.front();
    work.pop_front();
    auto it = adj.find(n);
    if (it == adj.end()) continue;
    for (const auto& m : it->second)
      if (seen.insert(m).second) work.push_back(m);
  }
  return seen;
}

}  // namespace detail

// Nodes reachable from `from` via directed edges, excluding `from` itself
// unless reachable through a path.
inline NodeSet descendants_of(const CompositeGraph& g, const NodeSet& from) {
  auto all = detail::closure(g.successors(), from);
  for (const auto& n : from) all.erase(n);
  return all;
}

inline NodeSet ancestors_of(const CompositeGraph& g, const NodeSet& from) {
  auto all = detail::closure(g.predecessors(), from);
  for (const auto& n : from) all.erase(n);
  return all;
}

inline NodeSet ancestors_of(const CompositeGraph& g, const NodeId& node) {
  return ancestors_of(g, NodeSet{node});
}

// Convex, weakly connected node subset of a composite graph, anchored at
// the (potentially) failed node.
struct Fragment {
  std::string graph_id;
  NodeSet node_set;
  NodeId anchor;
};

// Externally visible interface of a fragment or of a replacement graph.
struct Interface {
  ConceptSet required_inputs;
  ConceptSet provided_outputs;

  bool operator==(const Interface&) const = default;
};

// Diagnostics for every violated CompositeGraph invariant. Empty result
// means the graph is valid against the given services and taxonomy.
inline std::vector<std::string> validate_graph(const CompositeGraph& g,
                                               const ServiceMap& services,
                                               const Taxonomy& taxonomy) {
  std::vector<std::string> violations;
  if (g.nodes.empty()) violations.push_back("graph '" + g.id + "': order is 0");

  for (const auto& [a, b] : g.edges) {
    if (!g.has_node(a) || !g.has_node(b))
      violations.push_back("dangling edge (" + a + "," + b + ")");
  }

  bool services_ok = true;
  for (const auto& [n, sid] : g.nodes) {
    if (!services.count(sid)) {
      violations.push_back("node '" + n + "': unknown service '" + sid + "'");
      services_ok = false;
    }
  }

  auto topo = topological_order(g);
  if (!topo) {
    violations.push_back("graph '" + g.id + "': cycle in dependency edges");
    return violations;  // dataflow undefined on cyclic graphs
  }
  if (!services_ok) return violations;

  auto concept_known = [&](const ConceptId& c) { return taxonomy.contains(c); };

  // dataflow closure: every node input must be satisfied by the graph
  // inputs or by an ancestor's outputs
  for (const auto& [n, sid] : g.nodes) {
    ConceptSet upstream = g.graph_inputs;
    for (const auto& a : ancestors_of(g, n)) {
      const auto& svc = services.at(g.nodes.at(a));
      upstream.insert(svc.outputs.begin(), svc.outputs.end());
    }
    for (const auto& c : services.at(sid).inputs) {
      if (!concept_known(c)) {
        violations.push_back("node '" + n + "': unknown input concept '" + c + "'");
        continue;
      }
      bool ok = false;
      for (const auto& u : upstream)
        if (concept_known(u) && satisfies(taxonomy, u, c)) {
          ok = true;
          break;
        }
      if (!ok) violations.push_back("node '" + n + "': dataflow gap on input '" + c + "'");
    }
  }

  // declared graph outputs must be produced (node outputs or passthrough
  // graph inputs, up to subsumption)
  ConceptSet produced = g.graph_inputs;
  for (const auto& [n, sid] : g.nodes) {
    const auto& svc = services.at(sid);
    produced.insert(svc.outputs.begin(), svc.outputs.end());
  }
  for (const auto& c : g.graph_outputs) {
    if (!concept_known(c)) {
      violations.push_back("graph output '" + c + "': unknown concept");
      continue;
    }
    bool ok = false;
    for (const auto& p : produced)
      if (concept_known(p) && satisfies(taxonomy, p, c)) {
        ok = true;
        break;
      }
    if (!ok) violations.push_back("graph output '" + c + "': produced nowhere");
  }

  return violations;
}

}  // namespace subrec
