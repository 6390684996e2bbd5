#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ukg/model.hpp"
#include "ukg/taxonomy.hpp"

namespace ukg {

/// Declared predicates and the taxonomies their codomains refer to.
class Schema {
 public:
  void add_taxonomy(Taxonomy tax);
  void add_predicate(Predicate pred);

  const Predicate& predicate(const std::string& name) const;
  const Predicate* find_predicate(const std::string& name) const;
  const Taxonomy& taxonomy(const std::string& name) const;
  const Taxonomy* find_taxonomy(const std::string& name) const;

  /// Taxonomy backing the predicate's codomain, or null for scalar/entity domains.
  const Taxonomy* codomain_tree(const Predicate& pred) const;

  /// Throws domain-mismatch unless `value` belongs to the predicate's codomain.
  void check_value(const Predicate& pred, const Value& value) const;

  const std::map<std::string, Predicate>& predicates() const noexcept { return predicates_; }
  const std::map<std::string, Taxonomy>& taxonomies() const noexcept { return taxonomies_; }

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::map<std::string, Predicate> predicates_;
  std::map<std::string, Taxonomy> taxonomies_;
};

/// Everything needed to build a triple except its id.
struct TripleDraft {
  EntityId subject;
  std::string predicate;
  Value object;
  double certainty = 0.0;
  DatumKind kind = DatumKind::mention;
  Derivation derivation = Derivation::captured;
  std::vector<TripleId> provenance;
  std::optional<SourceId> source;
  std::optional<double> credibility;
};

struct ProvenanceClosure {
  std::set<TripleId, IdLess> mentions;
  std::set<SourceId> sources;

  friend bool operator==(const ProvenanceClosure&, const ProvenanceClosure&) = default;
};

using TripleMap = std::map<TripleId, UncertainTriple, IdLess>;

/// The uncertain knowledge graph: schema, entity labels and weighted triples.
class Graph {
 public:
  Graph() = default;
  explicit Graph(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const noexcept { return schema_; }
  Schema& schema() noexcept { return schema_; }

  /// Validates a draft against the kind/provenance/source invariants and the
  /// predicate's codomain, then assigns `id` or a fresh one. Does not insert.
  UncertainTriple new_triple(TripleDraft draft, std::optional<TripleId> id = std::nullopt);

  /// Inserts a triple whose provenance ids must already be present.
  const UncertainTriple& insert(UncertainTriple triple);
  const UncertainTriple& add(TripleDraft draft) { return insert(new_triple(std::move(draft))); }

  /// Replaces certainty/kind/provenance of an existing triple.
  UncertainTriple& mutable_triple(const TripleId& id);
  void erase(const TripleId& id);

  const UncertainTriple& triple(const TripleId& id) const;
  const UncertainTriple* find(const TripleId& id) const;
  const TripleMap& triples() const noexcept { return triples_; }
  std::size_t size() const noexcept { return triples_.size(); }
  std::size_t count(DatumKind kind) const;

  /// Mentions reachable through provenance edges, and their sources.
  ProvenanceClosure provenance_closure(const TripleId& id) const;

  void set_entity(const EntityId& id, const std::string& label);
  const std::map<EntityId, std::string>& entities() const noexcept { return entities_; }
  std::string label(const EntityId& id) const;

  std::uint64_t next_id() const noexcept { return next_id_; }
  void set_next_id(std::uint64_t n) { next_id_ = n; }
  TripleId reserve_id();

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  Schema schema_;
  std::map<EntityId, std::string> entities_;
  TripleMap triples_;
  std::uint64_t next_id_ = 1;
};

/// Sorted, duplicate-free id list.
std::vector<TripleId> normalize_ids(std::vector<TripleId> ids);

}  // namespace ukg
