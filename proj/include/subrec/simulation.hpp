#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "subrec/core.hpp"
#include "subrec/matchmaking.hpp"
#include "subrec/planner.hpp"
#include "subrec/recovery.hpp"
#include "subrec/rng.hpp"

namespace subrec {

struct GenerationExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GeneratorParams {
  std::uint64_t seed = 42;
  std::size_t n_concepts = 30;
  int taxonomy_depth = 4;
  std::size_t n_services = 50;
  std::size_t n_graphs = 200;  // desk scale; full runs use 1000
  std::size_t order_min = 2;
  std::size_t order_max = 6;
  double p_atomic_substitute = 0.4;
  double p_chain_substitute = 0.4;
  double epsilon = 0.2;
  std::size_t max_size = 3;
  std::size_t max_fragment_size = 0;
  bool strict_exact = false;
  std::size_t trials = 100;

  void validate() const {
    if (order_min < 1 || order_min > order_max)
      throw std::invalid_argument("params: need 1 <= order_min <= order_max");
    for (double p : {p_atomic_substitute, p_chain_substitute})
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("params: probability out of [0,1]");
    if (trials < 1) throw std::invalid_argument("params: trials must be >= 1");
    if (epsilon < 0.0) throw std::invalid_argument("params: epsilon must be >= 0");
    if (max_size < 1) throw std::invalid_argument("params: max_size must be >= 1");
  }
};

namespace detail {

inline std::string padded_id(const char* prefix, std::size_t i, std::size_t total) {
  std::size_t width = 1;
  for (std::size_t t = total; t >= 10; t /= 10) ++width;
  std::string digits = std::to_string(i);
  return std::string(prefix) + std::string(width > digits.size() ? width - digits.size() : 0, '0') +
         digits;
}

}  // namespace detail

// Deterministic concept forest: n_concepts nodes, parent chains no longer
// than max_depth.
inline Taxonomy generate_taxonomy(std::uint64_t seed, std::size_t n_concepts, int max_depth) {
  if (n_concepts < 1) throw std::invalid_argument("generate_taxonomy: n_concepts must be >= 1");
  if (max_depth < 1) throw std::invalid_argument("generate_taxonomy: depth must be >= 1");
  Rng rng(seed);
  Taxonomy t;
  std::vector<ConceptId> eligible_parents;  // depth < max_depth
  for (std::size_t i = 0; i < n_concepts; ++i) {
    ConceptId id = detail::padded_id("c", i, n_concepts);
    bool root = i == 0 || eligible_parents.empty() || rng.next_bool(0.15);
    std::optional<ConceptId> parent;
    if (!root) parent = eligible_parents[rng.next_index(eligible_parents.size())];
    t.add(Concept{id, parent});
    if (t.depth(id) < max_depth) eligible_parents.push_back(id);
  }
  return t;
}

// Synthetic OWLS-TC-like pool. Every base service gets its own fresh
// output concept (attached under a random pool concept), so one service
// can substitute another only when the generator planted the substitute:
// with p_atomic_substitute a same-interface near-QoS twin, with
// p_chain_substitute a two-stage decomposition through a fresh
// intermediate concept whose combined QoS equals the original exactly.
// Fresh concepts are appended to the taxonomy.
inline Registry generate_registry(std::uint64_t seed, Taxonomy& taxonomy,
                                  const GeneratorParams& params) {
  if (taxonomy.empty()) throw std::invalid_argument("generate_registry: empty taxonomy");
  Rng rng(seed);
  std::vector<ConceptId> pool;
  for (const auto& [id, c] : taxonomy.concepts()) pool.push_back(id);

  std::vector<AtomicService> services;
  std::vector<AtomicService> base;
  for (std::size_t i = 0; i < params.n_services; ++i) {
    AtomicService s;
    s.id = detail::padded_id("s", i, params.n_services);

    std::size_t n_inputs = 1 + (rng.next_bool(0.35) ? 1 : 0);
    for (std::size_t k = 0; k < n_inputs; ++k) {
      if (!base.empty() && rng.next_bool(0.5)) {
        const auto& feeder = base[rng.next_index(base.size())];
        s.inputs.insert(*feeder.outputs.begin());
      } else {
        s.inputs.insert(pool[rng.next_index(pool.size())]);
      }
    }

    ConceptId out = "o_" + s.id;
    taxonomy.add(Concept{out, pool[rng.next_index(pool.size())]});
    s.outputs.insert(out);
    if (rng.next_bool(0.3)) {
      ConceptId out2 = "o_" + s.id + "b";
      taxonomy.add(Concept{out2, pool[rng.next_index(pool.size())]});
      s.outputs.insert(out2);
    }

    s.qos.exec_time_ms = rng.next_real(20.0, 200.0);
    s.qos.cost = rng.next_real(1.0, 20.0);
    base.push_back(s);
    services.push_back(std::move(s));
  }

  for (const auto& b : base) {
    if (rng.next_bool(params.p_atomic_substitute)) {
      AtomicService sub = b;
      sub.id = b.id + "a";
      double half = params.epsilon / 2.0;
      sub.qos.exec_time_ms = b.qos.exec_time_ms * (1.0 + rng.next_real(-half, half));
      sub.qos.cost = b.qos.cost * (1.0 + rng.next_real(-half, half));
      services.push_back(std::move(sub));
    }
    if (rng.next_bool(params.p_chain_substitute)) {
      ConceptId mid = "m_" + b.id;
      taxonomy.add(Concept{mid, std::nullopt});
      double ut = rng.next_real(0.3, 0.7);
      double uc = rng.next_real(0.3, 0.7);
      AtomicService first{b.id + "x", b.inputs, {mid},
                          QoS{b.qos.exec_time_ms * ut, b.qos.cost * uc}};
      AtomicService second{b.id + "y", {mid}, b.outputs,
                           QoS{b.qos.exec_time_ms - first.qos.exec_time_ms,
                               b.qos.cost - first.qos.cost}};
      services.push_back(std::move(first));
      services.push_back(std::move(second));
    }
  }

  return Registry::build(std::move(services), taxonomy);
}

// n_graphs composite graphs, orders uniform in [order_min, order_max],
// mixing chain, parallel, and chain-of-parallel shapes. Service choice is
// biased towards consumers of the previous layer's outputs so real
// dataflow chains occur; inputs no upstream node covers become graph
// inputs, outputs no other node consumes become graph outputs.
inline std::vector<CompositeGraph> generate_collection(std::uint64_t seed,
                                                       const Registry& registry,
                                                       const Taxonomy& taxonomy,
                                                       std::size_t n_graphs,
                                                       std::size_t order_min,
                                                       std::size_t order_max) {
  if (order_min < 1 || order_min > order_max)
    throw std::invalid_argument("generate_collection: bad order range");
  if (n_graphs > 0 && registry.empty())
    throw GenerationExhausted("generate_collection: empty registry");
  Rng rng(seed);
  const auto& services = registry.services();

  std::vector<CompositeGraph> out;
  out.reserve(n_graphs);
  for (std::size_t gi = 0; gi < n_graphs; ++gi) {
    CompositeGraph g;
    g.id = detail::padded_id("g", gi, n_graphs == 0 ? 1 : n_graphs);
    std::size_t order = static_cast<std::size_t>(rng.next_int(order_min, order_max));

    std::vector<std::size_t> layers;
    switch (rng.next_index(3)) {
      case 0:  // chain
        layers.assign(order, 1);
        break;
      case 1:  // parallel
        layers.assign(1, order);
        break;
      default:  // chain of parallel stages
        for (std::size_t left = order; left > 0;) {
          std::size_t w = static_cast<std::size_t>(rng.next_int(1, std::min<std::size_t>(3, left)));
          layers.push_back(w);
          left -= w;
        }
        break;
    }

    std::vector<std::vector<NodeId>> layer_nodes;
    std::size_t next_node = 0;
    for (std::size_t w : layers) {
      layer_nodes.emplace_back();
      for (std::size_t k = 0; k < w; ++k)
        layer_nodes.back().push_back(detail::padded_id("n", next_node++, order));
    }
    for (std::size_t li = 0; li + 1 < layer_nodes.size(); ++li)
      for (const auto& a : layer_nodes[li])
        for (const auto& b : layer_nodes[li + 1]) g.edges.insert({a, b});

    for (std::size_t li = 0; li < layer_nodes.size(); ++li) {
      // consumers of the previous layer's outputs, for dataflow bias
      std::set<ServiceId> fed;
      if (li > 0) {
        for (const auto& p : layer_nodes[li - 1]) {
          for (const auto& o : registry.at(g.nodes.at(p)).outputs) {
            const Concept* c = &taxonomy.at(o);
            for (;;) {
              for (const auto& sid : registry.consumers_of_input(c->id)) fed.insert(sid);
              if (!c->parent) break;
              c = &taxonomy.at(*c->parent);
            }
          }
        }
      }
      std::vector<ServiceId> fed_list(fed.begin(), fed.end());
      for (const auto& n : layer_nodes[li]) {
        if (!fed_list.empty() && rng.next_bool(0.7))
          g.nodes[n] = fed_list[rng.next_index(fed_list.size())];
        else
          g.nodes[n] = services[rng.next_index(services.size())].id;
      }
    }

    auto topo = topological_order(g);
    for (const auto& n : *topo) {
      ConceptSet upstream = g.graph_inputs;
      for (const auto& a : ancestors_of(g, n)) {
        const auto& svc = registry.at(g.nodes.at(a));
        upstream.insert(svc.outputs.begin(), svc.outputs.end());
      }
      for (const auto& c : registry.at(g.nodes.at(n)).inputs)
        if (!satisfied_by_any(taxonomy, upstream, c)) g.graph_inputs.insert(c);
    }

    for (const auto& [n, sid] : g.nodes) {
      for (const auto& o : registry.at(sid).outputs) {
        bool consumed = false;
        for (const auto& [m, msid] : g.nodes) {
          if (m == n) continue;
          for (const auto& c : registry.at(msid).inputs)
            if (satisfies(taxonomy, o, c)) {
              consumed = true;
              break;
            }
          if (consumed) break;
        }
        if (!consumed) g.graph_outputs.insert(o);
      }
    }
    if (g.graph_outputs.empty()) {
      const auto& last = layer_nodes.back().back();
      const auto& svc = registry.at(g.nodes.at(last));
      g.graph_outputs.insert(svc.outputs.begin(), svc.outputs.end());
    }

    out.push_back(std::move(g));
  }
  return out;
}

struct OrderCounts {
  std::uint64_t events = 0;
  std::uint64_t recovered = 0;
};

struct StrategyCounts {
  std::uint64_t events = 0;
  std::uint64_t recovered = 0;
  std::map<std::size_t, OrderCounts> per_order;

  double probability() const {
    return events == 0 ? 0.0 : static_cast<double>(recovered) / static_cast<double>(events);
  }
};

struct TrialStats {
  std::map<Strategy, StrategyCounts> per_strategy;
  std::uint64_t total_events = 0;  // sum of graph orders
  std::uint64_t runtime_matchmaking_calls = 0;
};

// One repetition of the experiment: regenerate taxonomy, registry and
// collection from the trial seed, build a plan per graph, fail every
// constituent once, and recover under each strategy.
inline TrialStats run_trial(std::uint64_t trial_seed, const GeneratorParams& params,
                            const std::vector<Strategy>& strategies = {Strategy::ATOMIC,
                                                                       Strategy::COMPOSITE}) {
  params.validate();
  Taxonomy taxonomy = generate_taxonomy(derive_seed(trial_seed, 1), params.n_concepts,
                                        params.taxonomy_depth);
  Registry registry = generate_registry(derive_seed(trial_seed, 2), taxonomy, params);
  auto collection = generate_collection(derive_seed(trial_seed, 3), registry, taxonomy,
                                        params.n_graphs, params.order_min, params.order_max);

  BuildParams bp{params.epsilon, params.max_size, params.max_fragment_size, params.strict_exact};
  TrialStats stats;
  for (Strategy s : strategies) stats.per_strategy[s];

  for (const auto& graph : collection) {
    RecoveryPlan plan = build_plan(graph, registry, taxonomy, bp);
    std::uint64_t before = matchmaking_calls();
    for (const auto& [node, sid] : graph.nodes) {
      ++stats.total_events;
      for (Strategy s : strategies) {
        auto& counts = stats.per_strategy[s];
        ++counts.events;
        ++counts.per_order[graph.order()].events;
        RecoveryOutcome outcome =
            recover(graph, node, plan, s, taxonomy, registry.service_map());
        if (outcome.recovered) {
          ++counts.recovered;
          ++counts.per_order[graph.order()].recovered;
        }
      }
    }
    stats.runtime_matchmaking_calls += matchmaking_calls() - before;
  }
  return stats;
}

struct StrategyReport {
  std::vector<double> per_trial;  // recovery probability per trial
  double mean = 0.0;
  double stddev = 0.0;              // sample standard deviation over trials
  double pooled_probability = 0.0;  // recovered / events pooled over trials
  std::map<std::size_t, OrderCounts> per_order;  // pooled

  double per_order_probability(std::size_t order) const {
    auto it = per_order.find(order);
    if (it == per_order.end() || it->second.events == 0) return 0.0;
    return static_cast<double>(it->second.recovered) / static_cast<double>(it->second.events);
  }
};

struct Report {
  GeneratorParams config;
  std::uint64_t total_events = 0;
  std::uint64_t runtime_matchmaking_calls = 0;
  std::map<Strategy, StrategyReport> strategies;
  std::vector<TrialStats> trials;  // in trial-index order
};

// Full experiment: `params.trials` independent repetitions, seeds derived
// from the master seed. Trials may run on several threads; aggregation is
// in trial-index order so the report is identical for any job count.
inline Report run_experiment(const GeneratorParams& params, std::size_t jobs = 1,
                             const std::vector<Strategy>& strategies = {Strategy::ATOMIC,
                                                                        Strategy::COMPOSITE}) {
  params.validate();
  std::vector<TrialStats> results(params.trials);
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&](std::atomic<std::size_t>& next) {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= params.trials) return;
      try {
        results[i] = run_trial(derive_seed(params.seed, i), params, strategies);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  std::atomic<std::size_t> next{0};
  if (jobs <= 1) {
    worker(next);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back([&] { worker(next); });
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  Report report;
  report.config = params;
  for (const auto& t : results) {
    report.total_events += t.total_events;
    report.runtime_matchmaking_calls += t.runtime_matchmaking_calls;
    for (const auto& [s, counts] : t.per_strategy) {
      auto& sr = report.strategies[s];
      sr.per_trial.push_back(counts.probability());
      for (const auto& [order, oc] : counts.per_order) {
        sr.per_order[order].events += oc.events;
        sr.per_order[order].recovered += oc.recovered;
      }
    }
  }
  for (auto& [s, sr] : report.strategies) {
    double sum = 0.0;
    for (double p : sr.per_trial) sum += p;
    sr.mean = sr.per_trial.empty() ? 0.0 : sum / static_cast<double>(sr.per_trial.size());
    double ss = 0.0;
    for (double p : sr.per_trial) ss += (p - sr.mean) * (p - sr.mean);
    sr.stddev = sr.per_trial.size() > 1
                    ? std::sqrt(ss / static_cast<double>(sr.per_trial.size() - 1))
                    : 0.0;
    std::uint64_t ev = 0, rec = 0;
    for (const auto& [order, oc] : sr.per_order) {
      ev += oc.events;
      rec += oc.recovered;
    }
    sr.pooled_probability = ev == 0 ? 0.0 : static_cast<double>(rec) / static_cast<double>(ev);
  }
  report.trials = std::move(results);
  return report;
}

}  // namespace subrec
