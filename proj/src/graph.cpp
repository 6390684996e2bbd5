#include "ukg/graph.hpp"

#include <algorithm>

namespace ukg {

void Schema::add_taxonomy(Taxonomy tax) {
  if (tax.name().empty()) throw Error(ErrorCode::invalid_taxonomy, "taxonomy without a name");
  if (tax.empty()) throw Error(ErrorCode::invalid_taxonomy, "taxonomy '" + tax.name() + "' is empty");
  const std::string name = tax.name();
  if (!taxonomies_.emplace(name, std::move(tax)).second) {
    throw Error(ErrorCode::duplicate, "taxonomy '" + name + "' already declared");
  }
}

void Schema::add_predicate(Predicate pred) {
  if (pred.name.empty()) throw Error(ErrorCode::invariant_violation, "predicate without a name");
  if (pred.tau < 0) throw Error(ErrorCode::invariant_violation, "tau of '" + pred.name + "' is negative");
  if (pred.domain == DomainKind::taxonomy && !find_taxonomy(pred.taxonomy)) {
    throw Error(ErrorCode::integrity_violation,
                "predicate '" + pred.name + "' refers to unknown taxonomy '" + pred.taxonomy + "'");
  }
  if (pred.domain != DomainKind::taxonomy) pred.taxonomy.clear();
  const std::string name = pred.name;
  if (!predicates_.emplace(name, std::move(pred)).second) {
    throw Error(ErrorCode::duplicate, "predicate '" + name + "' already declared");
  }
}

const Predicate& Schema::predicate(const std::string& name) const {
  if (const auto* p = find_predicate(name)) return *p;
  throw Error(ErrorCode::unknown_predicate, "predicate '" + name + "' is not declared");
}

const Predicate* Schema::find_predicate(const std::string& name) const {
  auto it = predicates_.find(name);
  return it == predicates_.end() ? nullptr : &it->second;
}

const Taxonomy& Schema::taxonomy(const std::string& name) const {
  if (const auto* t = find_taxonomy(name)) return *t;
  throw Error(ErrorCode::unknown_id, "taxonomy '" + name + "' is not declared");
}

const Taxonomy* Schema::find_taxonomy(const std::string& name) const {
  auto it = taxonomies_.find(name);
  return it == taxonomies_.end() ? nullptr : &it->second;
}

const Taxonomy* Schema::codomain_tree(const Predicate& pred) const {
  if (pred.domain != DomainKind::taxonomy) return nullptr;
  return &taxonomy(pred.taxonomy);
}

void Schema::check_value(const Predicate& pred, const Value& value) const {
  auto mismatch = [&](const std::string& why) {
    throw Error(ErrorCode::domain_mismatch,
                "value '" + value.to_string() + "' for '" + pred.name + "': " + why);
  };
  switch (pred.domain) {
    case DomainKind::taxonomy:
      if (value.kind() != ValueKind::node) mismatch("expected a node of '" + pred.taxonomy + "'");
      if (!taxonomy(pred.taxonomy).contains(value.str())) mismatch("not in taxonomy '" + pred.taxonomy + "'");
      break;
    case DomainKind::entity:
      if (value.kind() != ValueKind::entity || value.str().empty()) mismatch("expected an entity");
      break;
    case DomainKind::text:
      if (value.kind() != ValueKind::text) mismatch("expected text");
      break;
    case DomainKind::integer:
      if (value.kind() != ValueKind::integer) mismatch("expected an integer");
      break;
    case DomainKind::year:
      if (value.kind() != ValueKind::year) mismatch("expected a year");
      break;
  }
}

std::vector<TripleId> normalize_ids(std::vector<TripleId> ids) {
  std::sort(ids.begin(), ids.end(), IdLess{});
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

TripleId Graph::reserve_id() { return "t" + std::to_string(next_id_++); }

UncertainTriple Graph::new_triple(TripleDraft draft, std::optional<TripleId> id) {
  if (draft.subject.empty()) throw Error(ErrorCode::invariant_violation, "triple without subject");
  const Predicate& pred = schema_.predicate(draft.predicate);
  schema_.check_value(pred, draft.object);
  const Certainty certainty(draft.certainty);

  if (draft.kind == DatumKind::mention) {
    if (!draft.provenance.empty()) {
      throw Error(ErrorCode::invariant_violation, "a mention cannot have provenance");
    }
    if (!draft.source || draft.source->empty()) {
      throw Error(ErrorCode::invariant_violation, "a mention must be linked to a source");
    }
    if (draft.credibility && !(*draft.credibility >= 0.0 && *draft.credibility <= 1.0)) {
      throw Error(ErrorCode::credibility_out_of_range, "credibility outside [0,1]");
    }
  } else {
    if (draft.provenance.empty()) {
      throw Error(ErrorCode::invariant_violation,
                  std::string(to_string(draft.kind)) + " requires non-empty provenance");
    }
    if (draft.source) {
      throw Error(ErrorCode::invariant_violation, "only mentions carry a source");
    }
    draft.credibility.reset();
    if (draft.derivation == Derivation::captured) draft.derivation = Derivation::consistent;
  }

  UncertainTriple t;
  t.id = id ? std::move(*id) : reserve_id();
  t.subject = std::move(draft.subject);
  t.predicate = std::move(draft.predicate);
  t.object = std::move(draft.object);
  t.certainty = certainty;
  t.kind = draft.kind;
  t.derivation = draft.kind == DatumKind::mention ? Derivation::captured : draft.derivation;
  t.provenance = normalize_ids(std::move(draft.provenance));
  t.source = std::move(draft.source);
  t.credibility = draft.credibility;
  return t;
}

const UncertainTriple& Graph::insert(UncertainTriple triple) {
  if (triples_.count(triple.id)) throw Error(ErrorCode::duplicate, "triple '" + triple.id + "' exists");
  for (const auto& p : triple.provenance) {
    if (p == triple.id) throw Error(ErrorCode::invariant_violation, "triple '" + p + "' derives from itself");
    if (!triples_.count(p)) {
      throw Error(ErrorCode::integrity_violation, "provenance id '" + p + "' of '" + triple.id + "' is unknown");
    }
  }
  if (!entities_.count(triple.subject)) entities_.emplace(triple.subject, triple.subject);
  if (triple.object.kind() == ValueKind::entity && !entities_.count(triple.object.str())) {
    entities_.emplace(triple.object.str(), triple.object.str());
  }
  auto [it, _] = triples_.emplace(triple.id, std::move(triple));
  return it->second;
}

UncertainTriple& Graph::mutable_triple(const TripleId& id) {
  auto it = triples_.find(id);
  if (it == triples_.end()) throw Error(ErrorCode::unknown_id, "no triple '" + id + "'");
  return it->second;
}

void Graph::erase(const TripleId& id) {
  if (triples_.erase(id) == 0) throw Error(ErrorCode::unknown_id, "no triple '" + id + "'");
}

const UncertainTriple& Graph::triple(const TripleId& id) const {
  if (const auto* t = find(id)) return *t;
  throw Error(ErrorCode::unknown_id, "no triple '" + id + "'");
}

const UncertainTriple* Graph::find(const TripleId& id) const {
  auto it = triples_.find(id);
  return it == triples_.end() ? nullptr : &it->second;
}

std::size_t Graph::count(DatumKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(triples_.begin(), triples_.end(), [&](const auto& kv) { return kv.second.kind == kind; }));
}

ProvenanceClosure Graph::provenance_closure(const TripleId& id) const {
  ProvenanceClosure out;
  std::set<TripleId, IdLess> visited;
  std::vector<TripleId> stack{id};
  triple(id);  // unknown-id check on the root
  while (!stack.empty()) {
    TripleId cur = std::move(stack.back());
    stack.pop_back();
    if (!visited.insert(cur).second) continue;
    const UncertainTriple& t = triple(cur);
    if (t.kind == DatumKind::mention) {
      out.mentions.insert(t.id);
      if (t.source) out.sources.insert(*t.source);
      continue;
    }
    for (const auto& p : t.provenance) stack.push_back(p);
  }
  return out;
}

void Graph::set_entity(const EntityId& id, const std::string& label) {
  if (id.empty()) throw Error(ErrorCode::invariant_violation, "entity id must be non-empty");
  entities_[id] = label.empty() ? id : label;
}

std::string Graph::label(const EntityId& id) const {
  auto it = entities_.find(id);
  return it == entities_.end() ? id : it->second;
}

}  // namespace ukg
