#pragma once

#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subrec/core.hpp"
#include "subrec/matchmaking.hpp"

namespace subrec::test {

inline Taxonomy make_taxonomy(
    std::initializer_list<std::pair<std::string, std::optional<std::string>>> concepts) {
  Taxonomy t;
  for (const auto& [id, parent] : concepts) t.add(Concept{id, parent});
  return t;
}

inline AtomicService svc(std::string id, ConceptSet inputs, ConceptSet outputs,
                         double time_ms = 100.0, double cost = 10.0) {
  return AtomicService{std::move(id), std::move(inputs), std::move(outputs), QoS{time_ms, cost}};
}

inline ServiceMap service_map(const std::vector<AtomicService>& services) {
  ServiceMap m;
  for (const auto& s : services) m[s.id] = s;
  return m;
}

inline CompositeGraph make_graph(
    std::string id, std::initializer_list<std::pair<std::string, std::string>> nodes,
    std::initializer_list<std::pair<std::string, std::string>> edges, ConceptSet inputs = {},
    ConceptSet outputs = {}) {
  CompositeGraph g;
  g.id = std::move(id);
  for (const auto& [n, s] : nodes) g.nodes[n] = s;
  for (const auto& e : edges) g.edges.insert(e);
  g.graph_inputs = std::move(inputs);
  g.graph_outputs = std::move(outputs);
  return g;
}

}  // namespace subrec::test
