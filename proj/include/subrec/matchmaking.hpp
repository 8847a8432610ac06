#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "subrec/core.hpp"
#include "subrec/fragmentation.hpp"

namespace subrec {

enum class MatchDegree { EXACT, PLUGIN, FAIL };

inline const char* to_string(MatchDegree d) {
  switch (d) {
    case MatchDegree::EXACT: return "EXACT";
    case MatchDegree::PLUGIN: return "PLUGIN";
    default: return "FAIL";
  }
}

// Counts calls into the matchmaking entry points. The run-time phase
// (plan_lookup / recover) must never move this counter. Per-thread, so
// parallel trials can measure their own deltas.
inline std::uint64_t& matchmaking_calls() {
  thread_local std::uint64_t counter = 0;
  return counter;
}

namespace detail {

// uncounted core of match_degree; also used by the splice precondition
// check so that run-time recovery stays off the matchmaking counter
inline MatchDegree match_degree_impl(const Interface& required, const Interface& candidate,
                                     const Taxonomy& taxonomy) {
  if (required.required_inputs == candidate.required_inputs &&
      required.provided_outputs == candidate.provided_outputs)
    return MatchDegree::EXACT;
  // plug-in: the candidate demands no more than the environment supplies
  for (const auto& ci : candidate.required_inputs)
    if (!satisfied_by_any(taxonomy, required.required_inputs, ci)) return MatchDegree::FAIL;
  // ... and provides no less than what is required of it
  for (const auto& ro : required.provided_outputs)
    if (!satisfied_by_any(taxonomy, candidate.provided_outputs, ro)) return MatchDegree::FAIL;
  return MatchDegree::PLUGIN;
}

}  // namespace detail

inline MatchDegree match_degree(const Interface& required, const Interface& candidate,
                                const Taxonomy& taxonomy) {
  ++matchmaking_calls();
  return detail::match_degree_impl(required, candidate, taxonomy);
}

// Relative Chebyshev distance to the target QoS. A zero target component
// matches only a zero candidate component; anything else gets the largest
// representable distance.
inline double qos_distance(const QoS& target, const QoS& candidate) {
  auto component = [](double t, double c) {
    if (t == 0.0) return c == 0.0 ? 0.0 : std::numeric_limits<double>::max();
    return std::abs(c - t) / t;
  };
  return std::max(component(target.exec_time_ms, candidate.exec_time_ms),
                  component(target.cost, candidate.cost));
}

// Critical-path execution time (parallel branches overlap) and summed
// cost over all nodes.
inline QoS aggregate_qos(const CompositeGraph& g, const ServiceMap& services) {
  auto topo = topological_order(g);
  if (!topo) throw std::invalid_argument("aggregate_qos: graph '" + g.id + "' is cyclic");
  auto pred = g.predecessors();
  std::map<NodeId, double> finish;
  QoS total;
  for (const auto& n : *topo) {
    auto it = services.find(g.nodes.at(n));
    if (it == services.end())
      throw std::invalid_argument("aggregate_qos: unknown service '" + g.nodes.at(n) + "'");
    double start = 0.0;
    for (const auto& p : pred[n]) start = std::max(start, finish[p]);
    finish[n] = start + it->second.qos.exec_time_ms;
    total.exec_time_ms = std::max(total.exec_time_ms, finish[n]);
    total.cost += it->second.qos.cost;
  }
  return total;
}

// Pool of available atomic services with subsumption-aware indexes.
class Registry {
 public:
  static Registry build(std::vector<AtomicService> services, const Taxonomy& taxonomy) {
    Registry r;
    std::sort(services.begin(), services.end(),
              [](const AtomicService& a, const AtomicService& b) { return a.id < b.id; });
    for (auto& s : services) {
      if (s.outputs.empty())
        throw std::invalid_argument("registry: service '" + s.id + "' has no outputs");
      for (const auto& c : s.inputs) taxonomy.at(c);
      for (const auto& c : s.outputs) taxonomy.at(c);
      if (!r.by_id_.emplace(s.id, s).second)
        throw std::invalid_argument("registry: duplicate service id '" + s.id + "'");
    }
    r.services_ = std::move(services);
    for (const auto& s : r.services_) {
      for (const auto& o : s.outputs) {
        // s produces something satisfying o and every ancestor of o
        const Concept* c = &taxonomy.at(o);
        for (;;) {
          auto& ids = r.output_index_[c->id];
          if (ids.empty() || ids.back() != s.id) ids.push_back(s.id);
          if (!c->parent) break;
          c = &taxonomy.at(*c->parent);
        }
      }
      for (const auto& i : s.inputs) {
        auto& ids = r.input_index_[i];
        if (ids.empty() || ids.back() != s.id) ids.push_back(s.id);
      }
    }
    return r;
  }

  const std::vector<AtomicService>& services() const { return services_; }
  const ServiceMap& service_map() const { return by_id_; }
  bool empty() const { return services_.empty(); }

  const AtomicService& at(const ServiceId& id) const {
    auto it = by_id_.find(id);
    if (it == by_id_.end())
      throw std::invalid_argument("registry: unknown service id '" + id + "'");
    return it->second;
  }

  // services producing a concept that satisfies `concept_id`
  const std::vector<ServiceId>& producers_of(const ConceptId& concept_id) const {
    static const std::vector<ServiceId> none;
    auto it = output_index_.find(concept_id);
    return it == output_index_.end() ? none : it->second;
  }

  // services demanding exactly `concept_id` as an input
  const std::vector<ServiceId>& consumers_of_input(const ConceptId& concept_id) const {
    static const std::vector<ServiceId> none;
    auto it = input_index_.find(concept_id);
    return it == input_index_.end() ? none : it->second;
  }

  const std::map<ConceptId, std::vector<ServiceId>>& output_index() const {
    return output_index_;
  }

 private:
  std::vector<AtomicService> services_;   // sorted by id
  ServiceMap by_id_;
  std::map<ConceptId, std::vector<ServiceId>> output_index_;
  std::map<ConceptId, std::vector<ServiceId>> input_index_;
};

// Internal structure of a composed replacement plus its aggregate QoS.
struct ReplacementGraph {
  CompositeGraph graph;
  QoS aggregate;
};

struct ScoredCandidate {
  ReplacementGraph replacement;
  MatchDegree degree = MatchDegree::FAIL;
  double distance = 0.0;
};

namespace detail {

inline Interface service_interface(const AtomicService& s) {
  return Interface{s.inputs, s.outputs};
}

inline int degree_rank(MatchDegree d) { return d == MatchDegree::EXACT ? 0 : 1; }

// Interface a composed candidate presents to its environment: unmet node
// inputs on one side, the union of all node outputs on the other (a
// replacement may expose more than was asked for).
inline Interface composition_interface(const CompositeGraph& g, const ServiceMap& services,
                                       const Taxonomy& taxonomy) {
  Interface iface;
  for (const auto& [n, sid] : g.nodes) {
    ConceptSet upstream;
    for (const auto& a : ancestors_of(g, n)) {
      const auto& svc = services.at(g.nodes.at(a));
      upstream.insert(svc.outputs.begin(), svc.outputs.end());
    }
    const auto& svc = services.at(sid);
    for (const auto& c : svc.inputs)
      if (!satisfied_by_any(taxonomy, upstream, c)) iface.required_inputs.insert(c);
    iface.provided_outputs.insert(svc.outputs.begin(), svc.outputs.end());
  }
  return iface;
}

inline CompositeGraph chain_graph(const std::vector<ServiceId>& ids, const Registry& registry) {
  CompositeGraph g;
  g.id = "chain:";
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) g.id += ">";
    g.id += ids[i];
    g.nodes[ids[i]] = ids[i];
    if (i) g.edges.insert({ids[i - 1], ids[i]});
  }
  (void)registry;
  return g;
}

inline CompositeGraph bundle_graph(const std::set<ServiceId>& ids) {
  CompositeGraph g;
  g.id = "par:";
  bool first = true;
  for (const auto& id : ids) {
    if (!first) g.id += "+";
    first = false;
    g.id += id;
    g.nodes[id] = id;
  }
  return g;
}

inline CompositeGraph atomic_graph(const ServiceId& id) {
  CompositeGraph g;
  g.id = "atomic:" + id;
  g.nodes[id] = id;
  return g;
}

}  // namespace detail

// All non-excluded registry services whose interface matches `required`
// (EXACT or PLUGIN; EXACT only when strict_exact) within `epsilon` of the
// target QoS. Ordered by match degree, then distance, then id.
inline std::vector<AtomicService> find_atomic_replacements(
    const Interface& required, const QoS& target_qos, const Registry& registry,
    const Taxonomy& taxonomy, double epsilon, const std::set<ServiceId>& exclude,
    bool strict_exact = false) {
  ++matchmaking_calls();

  // candidates must provide every required output, so the producers of
  // any one required output already cover the field
  std::vector<ServiceId> pool;
  if (required.provided_outputs.empty()) {
    for (const auto& s : registry.services()) pool.push_back(s.id);
  } else {
    pool = registry.producers_of(*required.provided_outputs.begin());
  }

  struct Scored {
    MatchDegree degree;
    double distance;
    ServiceId id;
  };
  std::vector<Scored> hits;
  for (const auto& id : pool) {
    if (exclude.count(id)) continue;
    const auto& s = registry.at(id);
    MatchDegree d = detail::match_degree_impl(required, detail::service_interface(s), taxonomy);
    if (d == MatchDegree::FAIL) continue;
    if (strict_exact && d != MatchDegree::EXACT) continue;
    double dist = qos_distance(target_qos, s.qos);
    if (dist > epsilon) continue;
    hits.push_back({d, dist, id});
  }
  std::sort(hits.begin(), hits.end(), [](const Scored& a, const Scored& b) {
    if (a.degree != b.degree) return detail::degree_rank(a.degree) < detail::degree_rank(b.degree);
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.id < b.id;
  });
  std::vector<AtomicService> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back(registry.at(h.id));
  return out;
}

// Scored candidate search over the composition template family:
//   - singletons (identical to find_atomic_replacements),
//   - chains c1 -> ... -> ck (k <= max_size): distinct services, every
//     node after the first consumes an output of its predecessor, and the
//     last node provides at least one required output,
//   - parallel bundles of 2..max_size distinct services, each providing
//     at least one required output.
// Ordered by graph order, degree, distance, canonical id.
inline std::vector<ScoredCandidate> search_replacement_candidates(
    const Interface& required, const QoS& target_qos, const Registry& registry,
    const Taxonomy& taxonomy, double epsilon, std::size_t max_size,
    const std::set<ServiceId>& exclude, bool strict_exact = false) {
  if (max_size < 1)
    throw std::invalid_argument("search_replacement_candidates: max_size must be >= 1");
  ++matchmaking_calls();

  const ServiceMap& services = registry.service_map();
  std::vector<ScoredCandidate> out;

  // size-1 candidates
  for (const auto& s : find_atomic_replacements(required, target_qos, registry, taxonomy,
                                                epsilon, exclude, strict_exact)) {
    ScoredCandidate c;
    c.replacement.graph = detail::atomic_graph(s.id);
    c.replacement.graph.graph_inputs = s.inputs;
    c.replacement.graph.graph_outputs = s.outputs;
    c.replacement.aggregate = s.qos;
    c.degree = detail::match_degree_impl(required, detail::service_interface(s), taxonomy);
    c.distance = qos_distance(target_qos, s.qos);
    out.push_back(std::move(c));
  }

  // providers of required outputs, deduplicated
  std::set<ServiceId> providers;
  for (const auto& o : required.provided_outputs)
    for (const auto& id : registry.producers_of(o))
      if (!exclude.count(id)) providers.insert(id);

  // multi-node aggregates are computed arithmetically (a chain's critical
  // path is the sum of its stages, a bundle's the slowest member) so that
  // candidates over the QoS envelope are discarded before any graph is
  // built; aggregate_qos over the built graph agrees by construction
  auto score = [&](CompositeGraph g, const QoS& aggregate) -> void {
    ScoredCandidate c;
    c.replacement.aggregate = aggregate;
    c.distance = qos_distance(target_qos, aggregate);
    if (c.distance > epsilon) return;
    Interface iface = detail::composition_interface(g, services, taxonomy);
    c.degree = detail::match_degree_impl(required, iface, taxonomy);
    if (c.degree == MatchDegree::FAIL) return;
    if (strict_exact && c.degree != MatchDegree::EXACT) return;
    g.graph_inputs = iface.required_inputs;
    g.graph_outputs = iface.provided_outputs;
    c.replacement.graph = std::move(g);
    out.push_back(std::move(c));
  };

  // both aggregate components only grow as a composition is extended, so
  // a partial composition past either upper bound can never come back
  // inside the envelope; undershoot can, so only the ceiling is pruned
  auto over_budget = [&](double t, double cost) -> bool {
    if (target_qos.exec_time_ms == 0.0 ? t > 0.0
                                       : t > target_qos.exec_time_ms * (1.0 + epsilon))
      return true;
    return target_qos.cost == 0.0 ? cost > 0.0 : cost > target_qos.cost * (1.0 + epsilon);
  };

  if (max_size >= 2) {
    // chains, enumerated backwards from each provider
    std::map<std::vector<ServiceId>, QoS> chains;
    for (const auto& last : providers) {
      const auto& tail = registry.at(last);
      if (over_budget(tail.qos.exec_time_ms, tail.qos.cost)) continue;
      std::vector<ServiceId> walk{last};  // reversed: walk[0] is the chain tail
      std::set<ServiceId> used{last};
      QoS sum = tail.qos;
      auto extend = [&](auto&& self) -> void {
        if (walk.size() >= 2) chains.emplace(std::vector<ServiceId>(walk.rbegin(), walk.rend()), sum);
        if (walk.size() >= max_size) return;
        // predecessors: services feeding some input of the walk's head
        std::set<ServiceId> feeders;
        for (const auto& in : registry.at(walk.back()).inputs)
          for (const auto& id : registry.producers_of(in))
            if (!exclude.count(id) && !used.count(id)) feeders.insert(id);
        for (const auto& f : feeders) {
          const QoS& q = registry.at(f).qos;
          if (over_budget(sum.exec_time_ms + q.exec_time_ms, sum.cost + q.cost)) continue;
          walk.push_back(f);
          used.insert(f);
          sum.exec_time_ms += q.exec_time_ms;
          sum.cost += q.cost;
          self(self);
          sum.exec_time_ms -= q.exec_time_ms;
          sum.cost -= q.cost;
          used.erase(f);
          walk.pop_back();
        }
      };
      extend(extend);
    }
    for (const auto& [chain, qos] : chains) score(detail::chain_graph(chain, registry), qos);

    // parallel bundles over the provider pool
    std::vector<ServiceId> pv(providers.begin(), providers.end());
    std::vector<ServiceId> pick;
    auto bundles = [&](auto&& self, std::size_t from, QoS agg) -> void {
      if (pick.size() >= 2) score(detail::bundle_graph({pick.begin(), pick.end()}), agg);
      if (pick.size() >= max_size) return;
      for (std::size_t i = from; i < pv.size(); ++i) {
        const QoS& q = registry.at(pv[i]).qos;
        QoS next{std::max(agg.exec_time_ms, q.exec_time_ms), agg.cost + q.cost};
        if (over_budget(next.exec_time_ms, next.cost)) continue;
        pick.push_back(pv[i]);
        self(self, i + 1, next);
        pick.pop_back();
      }
    };
    bundles(bundles, 0, QoS{0.0, 0.0});
  }

  std::sort(out.begin(), out.end(), [](const ScoredCandidate& a, const ScoredCandidate& b) {
    if (a.replacement.graph.order() != b.replacement.graph.order())
      return a.replacement.graph.order() < b.replacement.graph.order();
    if (a.degree != b.degree) return detail::degree_rank(a.degree) < detail::degree_rank(b.degree);
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.replacement.graph.id < b.replacement.graph.id;
  });
  return out;
}

inline std::vector<ReplacementGraph> find_replacement_graphs(
    const Interface& required, const QoS& target_qos, const Registry& registry,
    const Taxonomy& taxonomy, double epsilon, std::size_t max_size,
    const std::set<ServiceId>& exclude, bool strict_exact = false) {
  auto scored = search_replacement_candidates(required, target_qos, registry, taxonomy, epsilon,
                                              max_size, exclude, strict_exact);
  std::vector<ReplacementGraph> out;
  out.reserve(scored.size());
  for (auto& c : scored) out.push_back(std::move(c.replacement));
  return out;
}

}  // namespace subrec
