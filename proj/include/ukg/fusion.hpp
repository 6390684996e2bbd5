#pragma once

/// \file fusion.hpp
/// Composition rules over the uncertain knowledge graph.
///
/// Rule 1 generalizes two agreeing values of the same (subject, predicate) to
/// their least common ancestor and reinforces the certainty. Rule 2 resolves
/// two disagreeing values in favour of the stronger one and weakens it by the
/// other. Rule 3 promotes the high-certainty part of a subject's triples to
/// facts. All three are pure: they read a graph snapshot and return deltas.
///
/// Two triples are only ever combined when their mention closures are
/// disjoint, so no piece of evidence is counted twice.

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ukg/graph.hpp"

namespace ukg {

enum class ConsistentAggregator { max, avg, min, noisy_or };
enum class InconsistentAggregator { min, difference, discount };

std::string_view to_string(ConsistentAggregator a);
std::string_view to_string(InconsistentAggregator a);
ConsistentAggregator parse_consistent_aggregator(std::string_view s);
InconsistentAggregator parse_inconsistent_aggregator(std::string_view s);

struct AggregatorKind {
  ConsistentAggregator consistent = ConsistentAggregator::noisy_or;
  InconsistentAggregator inconsistent = InconsistentAggregator::discount;

  friend bool operator==(const AggregatorKind&, const AggregatorKind&) = default;
};

/// Combines two certainties of agreeing statements. noisy-or is 1-(1-p1)(1-p2).
Certainty aggreg_consistent(Certainty p1, Certainty p2, ConsistentAggregator kind);

/// n-ary form over a whole evidence set; avg is the arithmetic mean.
Certainty aggreg_consistent(std::span<const double> certainties, ConsistentAggregator kind);

/// Weakens the winner p1 by the loser p2. Callers order the arguments so p1 >= p2.
Certainty aggreg_inconsistent(Certainty p1, Certainty p2, InconsistentAggregator kind);

struct FactThreshold {
  Certainty pi{0.9};
};

struct FusionParams {
  AggregatorKind aggregators;
  std::map<std::string, int> tau;  // per predicate; falls back to Predicate::tau
  double conflict_floor = 0.0;     // Rule 2 needs the weaker certainty above this

  int tau_for(const Predicate& pred) const;
};

/// Concept distance between two values of a predicate's codomain. Scalars and
/// entities are at distance 0 when equal and infinitely far (nullopt) otherwise.
std::optional<int> value_distance(const Schema& schema, const Predicate& pred, const Value& a, const Value& b);

/// LCA in the codomain tree; for scalars only defined on equal values.
Value value_lca(const Schema& schema, const Predicate& pred, const Value& a, const Value& b);

/// True when `general` is an ancestor-or-equal of `specific`.
bool subsumes(const Schema& schema, const Predicate& pred, const Value& general, const Value& specific);

/// Whether two values of a predicate count as contradicting (distance > tau).
bool values_conflict(const Schema& schema, const Predicate& pred, int tau, const Value& a, const Value& b);

struct GroupKey {
  EntityId subject;
  std::string predicate;

  friend auto operator<=>(const GroupKey&, const GroupKey&) = default;
};

/// Memoized mention closures over one graph snapshot.
class EvidenceIndex {
 public:
  explicit EvidenceIndex(const Graph& graph) : graph_(&graph) {}

  /// Mention ids reachable from `id`, sorted by IdLess.
  const std::vector<TripleId>& mentions(const TripleId& id);
  bool disjoint(const TripleId& a, const TripleId& b);
  /// true when every mention of `inner` is also a mention of `outer`.
  bool contains(const TripleId& outer, const TripleId& inner);

 private:
  const Graph* graph_;
  std::map<TripleId, std::vector<TripleId>, IdLess> cache_;
};

/// Aggregate of the certainties of all mentions under `id`.
Certainty aggregate_evidence(const Graph& graph, EvidenceIndex& index, const TripleId& id,
                             ConsistentAggregator kind);

struct Rule1Delta {
  EntityId subject;
  std::string predicate;
  Value object;  // LCA of the two inputs
  TripleId first;
  TripleId second;
  Certainty certainty;  // aggreg_consistent of the two inputs

  friend bool operator==(const Rule1Delta&, const Rule1Delta&) = default;
};

struct Rule2Delta {
  EntityId subject;
  std::string predicate;
  Value object;  // the winner's value
  TripleId winner;
  TripleId loser;
  Certainty certainty;  // aggreg_inconsistent(winner, loser)

  friend bool operator==(const Rule2Delta&, const Rule2Delta&) = default;
};

/// Every pair of distinct triples sharing subject and predicate, with disjoint
/// evidence and distance <= tau, that is not already covered by an existing
/// derived triple for the LCA. Triples produced by Rule 2 do not take part.
/// With `focus`, at least one member of each pair must be in it.
std::vector<Rule1Delta> apply_rule1(const Graph& graph, const FusionParams& params,
                                    const std::set<TripleId, IdLess>* focus = nullptr);

/// For each (subject, predicate) group, the first conflicting pair of current
/// triples in (certainty desc, value asc, id) order. The first element wins;
/// equal certainties therefore go to the lexicographically smaller value.
std::vector<Rule2Delta> apply_rule2(const Graph& graph, const FusionParams& params);

/// Triples not absorbed into another derived triple of their group.
std::vector<TripleId> current_triples(const Graph& graph);

struct FactBuild {
  EntityId subject;
  std::vector<TripleId> omega;       // current triples of the subject
  std::vector<TripleId> omega_plus;  // those with certainty > pi
  Certainty composite_certainty;     // weakest member of omega

  friend bool operator==(const FactBuild&, const FactBuild&) = default;
};

/// Rule 3, per subject: Ω = current triples, Ω⁺ = strictly above pi.
std::vector<FactBuild> build_facts(const Graph& graph, FactThreshold pi);

}  // namespace ukg
