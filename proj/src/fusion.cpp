#include "ukg/fusion.hpp"

#include <algorithm>
#include <numeric>

namespace ukg {

std::string_view to_string(ConsistentAggregator a) {
  switch (a) {
    case ConsistentAggregator::max: return "max";
    case ConsistentAggregator::avg: return "avg";
    case ConsistentAggregator::min: return "min";
    case ConsistentAggregator::noisy_or: return "noisy-or";
  }
  return "noisy-or";
}

std::string_view to_string(InconsistentAggregator a) {
  switch (a) {
    case InconsistentAggregator::min: return "min";
    case InconsistentAggregator::difference: return "difference";
    case InconsistentAggregator::discount: return "discount";
  }
  return "discount";
}

ConsistentAggregator parse_consistent_aggregator(std::string_view s) {
  if (s == "max") return ConsistentAggregator::max;
  if (s == "avg") return ConsistentAggregator::avg;
  if (s == "min") return ConsistentAggregator::min;
  if (s == "noisy-or") return ConsistentAggregator::noisy_or;
  throw Error(ErrorCode::parse_error, "unknown consistent aggregator '" + std::string(s) + "'");
}

InconsistentAggregator parse_inconsistent_aggregator(std::string_view s) {
  if (s == "min") return InconsistentAggregator::min;
  if (s == "difference") return InconsistentAggregator::difference;
  if (s == "discount") return InconsistentAggregator::discount;
  throw Error(ErrorCode::parse_error, "unknown inconsistent aggregator '" + std::string(s) + "'");
}

Certainty aggreg_consistent(Certainty p1, Certainty p2, ConsistentAggregator kind) {
  const double a = p1.value();
  const double b = p2.value();
  switch (kind) {
    case ConsistentAggregator::max: return Certainty(std::max(a, b));
    case ConsistentAggregator::avg: return Certainty(std::clamp((a + b) / 2.0, std::min(a, b), std::max(a, b)));
    case ConsistentAggregator::min: return Certainty(std::min(a, b));
    case ConsistentAggregator::noisy_or: return Certainty(1.0 - (1.0 - a) * (1.0 - b));
  }
  return p1;
}

Certainty aggreg_consistent(std::span<const double> certainties, ConsistentAggregator kind) {
  if (certainties.empty()) throw Error(ErrorCode::invariant_violation, "aggregating an empty evidence set");
  switch (kind) {
    case ConsistentAggregator::max:
      return Certainty(*std::max_element(certainties.begin(), certainties.end()));
    case ConsistentAggregator::min:
      return Certainty(*std::min_element(certainties.begin(), certainties.end()));
    case ConsistentAggregator::avg: {
      const double sum = std::accumulate(certainties.begin(), certainties.end(), 0.0);
      return Certainty(std::clamp(sum / static_cast<double>(certainties.size()), 0.0, 1.0));
    }
    case ConsistentAggregator::noisy_or: {
      double miss = 1.0;
      for (double p : certainties) miss *= (1.0 - p);
      return Certainty(1.0 - miss);
    }
  }
  return Certainty(certainties.front());
}

Certainty aggreg_inconsistent(Certainty p1, Certainty p2, InconsistentAggregator kind) {
  const double a = p1.value();
  const double b = p2.value();
  switch (kind) {
    case InconsistentAggregator::min: return Certainty(std::min(a, b));
    case InconsistentAggregator::difference: return Certainty(std::max(0.0, a - b));
    case InconsistentAggregator::discount: return Certainty(a * (1.0 - b));
  }
  return p1;
}

int FusionParams::tau_for(const Predicate& pred) const {
  auto it = tau.find(pred.name);
  return it == tau.end() ? pred.tau : it->second;
}

std::optional<int> value_distance(const Schema& schema, const Predicate& pred, const Value& a, const Value& b) {
  if (const Taxonomy* tree = schema.codomain_tree(pred)) return tree->concept_distance(a.str(), b.str());
  if (a == b) return 0;
  return std::nullopt;
}

Value value_lca(const Schema& schema, const Predicate& pred, const Value& a, const Value& b) {
  if (const Taxonomy* tree = schema.codomain_tree(pred)) return Value::node(tree->lca(a.str(), b.str()));
  if (a == b) return a;
  throw Error(ErrorCode::invariant_violation,
              "no common generalization of '" + a.to_string() + "' and '" + b.to_string() + "'");
}

bool subsumes(const Schema& schema, const Predicate& pred, const Value& general, const Value& specific) {
  if (const Taxonomy* tree = schema.codomain_tree(pred)) {
    return tree->is_ancestor_or_equal(general.str(), specific.str());
  }
  return general == specific;
}

bool values_conflict(const Schema& schema, const Predicate& pred, int tau, const Value& a, const Value& b) {
  const auto d = value_distance(schema, pred, a, b);
  return !d || *d > tau;
}

const std::vector<TripleId>& EvidenceIndex::mentions(const TripleId& id) {
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  const UncertainTriple& t = graph_->triple(id);
  std::vector<TripleId> out;
  if (t.kind == DatumKind::mention) {
    out.push_back(t.id);
  } else {
    for (const auto& p : t.provenance) {
      const auto& sub = mentions(p);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    out = normalize_ids(std::move(out));
  }
  return cache_.emplace(id, std::move(out)).first->second;
}

bool EvidenceIndex::disjoint(const TripleId& a, const TripleId& b) {
  const auto& ma = mentions(a);
  const auto& mb = mentions(b);
  auto i = ma.begin();
  auto j = mb.begin();
  const IdLess less;
  while (i != ma.end() && j != mb.end()) {
    if (less(*i, *j)) {
      ++i;
    } else if (less(*j, *i)) {
      ++j;
    } else {
      return false;
    }
  }
  return true;
}

bool EvidenceIndex::contains(const TripleId& outer, const TripleId& inner) {
  const auto& mo = mentions(outer);
  const auto& mi = mentions(inner);
  return std::includes(mo.begin(), mo.end(), mi.begin(), mi.end(), IdLess{});
}

Certainty aggregate_evidence(const Graph& graph, EvidenceIndex& index, const TripleId& id,
                             ConsistentAggregator kind) {
  std::vector<double> values;
  for (const auto& m : index.mentions(id)) values.push_back(graph.triple(m).certainty.value());
  return aggreg_consistent(values, kind);
}

namespace {

using Groups = std::map<GroupKey, std::vector<const UncertainTriple*>>;

Groups group_triples(const Graph& graph) {
  Groups groups;
  for (const auto& [id, t] : graph.triples()) groups[GroupKey{t.subject, t.predicate}].push_back(&t);
  return groups;
}

bool lists(const std::vector<TripleId>& ids, const TripleId& id) {
  return std::binary_search(ids.begin(), ids.end(), id, IdLess{});
}

// Live members of one group: not absorbed by another derived triple.
std::vector<const UncertainTriple*> live_members(const std::vector<const UncertainTriple*>& members,
                                                 EvidenceIndex& index) {
  std::vector<const UncertainTriple*> live;
  for (const auto* x : members) {
    bool superseded = false;
    for (const auto* y : members) {
      if (y == x || y->kind == DatumKind::mention) continue;
      if (!index.contains(y->id, x->id)) continue;
      const bool strictly = index.mentions(x->id).size() < index.mentions(y->id).size();
      if (strictly || x->kind == DatumKind::mention || lists(y->provenance, x->id)) {
        superseded = true;
        break;
      }
    }
    if (!superseded) live.push_back(x);
  }
  return live;
}

}  // namespace

std::vector<Rule1Delta> apply_rule1(const Graph& graph, const FusionParams& params,
                                    const std::set<TripleId, IdLess>* focus) {
  const Schema& schema = graph.schema();
  EvidenceIndex index(graph);
  std::vector<Rule1Delta> out;

  for (const auto& [key, members] : group_triples(graph)) {
    const Predicate& pred = schema.predicate(key.predicate);
    const int tau = params.tau_for(pred);

    std::map<Value, std::vector<const UncertainTriple*>> derived_at;
    std::vector<const UncertainTriple*> eligible;
    for (const auto* t : members) {
      if (t->kind != DatumKind::mention) derived_at[t->object].push_back(t);
      if (t->derivation != Derivation::inconsistent) eligible.push_back(t);
    }

    for (std::size_t i = 0; i < eligible.size(); ++i) {
      for (std::size_t j = i + 1; j < eligible.size(); ++j) {
        const UncertainTriple& a = *eligible[i];
        const UncertainTriple& b = *eligible[j];
        if (focus && !focus->count(a.id) && !focus->count(b.id)) continue;
        const auto d = value_distance(schema, pred, a.object, b.object);
        if (!d || *d > tau) continue;
        if (!index.disjoint(a.id, b.id)) continue;
        Value lca = value_lca(schema, pred, a.object, b.object);
        if (auto it = derived_at.find(lca); it != derived_at.end()) {
          const bool covered = std::any_of(it->second.begin(), it->second.end(), [&](const UncertainTriple* k) {
            return index.contains(k->id, a.id) && index.contains(k->id, b.id);
          });
          if (covered) continue;
        }
        out.push_back(Rule1Delta{key.subject, key.predicate, std::move(lca), a.id, b.id,
                                 aggreg_consistent(a.certainty, b.certainty, params.aggregators.consistent)});
      }
    }
  }
  return out;
}

std::vector<Rule2Delta> apply_rule2(const Graph& graph, const FusionParams& params) {
  const Schema& schema = graph.schema();
  EvidenceIndex index(graph);
  std::vector<Rule2Delta> out;

  for (const auto& [key, members] : group_triples(graph)) {
    const Predicate& pred = schema.predicate(key.predicate);
    const int tau = params.tau_for(pred);
    auto live = live_members(members, index);
    std::sort(live.begin(), live.end(), [](const UncertainTriple* a, const UncertainTriple* b) {
      if (a->certainty != b->certainty) return a->certainty > b->certainty;
      const std::string va = a->object.to_string();
      const std::string vb = b->object.to_string();
      if (va != vb) return va < vb;
      return IdLess{}(a->id, b->id);
    });

    bool fired = false;
    for (std::size_t i = 0; i < live.size() && !fired; ++i) {
      for (std::size_t j = i + 1; j < live.size() && !fired; ++j) {
        const UncertainTriple& w = *live[i];
        const UncertainTriple& l = *live[j];
        if (!(l.certainty.value() > params.conflict_floor)) continue;
        if (!values_conflict(schema, pred, tau, w.object, l.object)) continue;
        if (!index.disjoint(w.id, l.id)) continue;
        out.push_back(Rule2Delta{key.subject, key.predicate, w.object, w.id, l.id,
                                 aggreg_inconsistent(w.certainty, l.certainty, params.aggregators.inconsistent)});
        fired = true;
      }
    }
  }
  return out;
}

std::vector<TripleId> current_triples(const Graph& graph) {
  EvidenceIndex index(graph);
  std::vector<TripleId> out;
  for (const auto& [key, members] : group_triples(graph)) {
    for (const auto* t : live_members(members, index)) out.push_back(t->id);
  }
  return normalize_ids(std::move(out));
}

std::vector<FactBuild> build_facts(const Graph& graph, FactThreshold pi) {
  std::map<EntityId, FactBuild, IdLess> by_subject;
  for (const auto& id : current_triples(graph)) {
    const UncertainTriple& t = graph.triple(id);
    FactBuild& b = by_subject[t.subject];
    if (b.omega.empty()) {
      b.subject = t.subject;
      b.composite_certainty = t.certainty;
    }
    b.omega.push_back(id);
    b.composite_certainty = std::min(b.composite_certainty, t.certainty);
    if (t.certainty.value() > pi.pi.value()) b.omega_plus.push_back(id);
  }
  std::vector<FactBuild> out;
  out.reserve(by_subject.size());
  for (auto& [_, b] : by_subject) out.push_back(std::move(b));
  return out;
}

}  // namespace ukg
