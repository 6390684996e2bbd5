#pragma once

/// \file model.hpp
/// Domain types shared by every module: certainties, typed object values,
/// predicates, sources, weighted triples, hypotheses and composite factoids.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ukg/error.hpp"

namespace ukg {

using TripleId = std::string;
using SourceId = std::string;
using EntityId = std::string;

/// Orders identifiers such as "t2" < "t10" (digit runs compare numerically).
struct IdLess {
  bool operator()(const std::string& a, const std::string& b) const;
};

/// A confidence score that is in [0,1] by construction.
class Certainty {
 public:
  constexpr Certainty() = default;
  explicit Certainty(double value);

  double value() const noexcept { return value_; }

  friend auto operator<=>(const Certainty&, const Certainty&) = default;

 private:
  double value_ = 0.0;
};

enum class DatumKind { mention, factoid, fact };

/// How a triple came to be. Mentions are captured; everything else is derived.
enum class Derivation {
  captured,      // read from a source
  consistent,    // generalized from agreeing evidence
  inconsistent,  // conflict resolution kept the stronger value
  promoted,      // a single mention lifted to a fact
};

enum class ValueKind { entity, node, text, integer, year };

/// Object of a triple: an entity reference, a taxonomy node, or a scalar.
class Value {
 public:
  Value() = default;

  static Value entity(std::string id) { return Value(ValueKind::entity, std::move(id), 0); }
  static Value node(std::string label) { return Value(ValueKind::node, std::move(label), 0); }
  static Value text(std::string s) { return Value(ValueKind::text, std::move(s), 0); }
  static Value integer(std::int64_t n) { return Value(ValueKind::integer, {}, n); }
  static Value year(std::int64_t y) { return Value(ValueKind::year, {}, y); }

  ValueKind kind() const noexcept { return kind_; }
  bool is_numeric() const noexcept { return kind_ == ValueKind::integer || kind_ == ValueKind::year; }
  const std::string& str() const noexcept { return text_; }
  std::int64_t number() const noexcept { return number_; }

  /// Display form; also the lexicographic key used for deterministic tie-breaks.
  std::string to_string() const;

  friend auto operator<=>(const Value&, const Value&) = default;

 private:
  Value(ValueKind kind, std::string text, std::int64_t number)
      : kind_(kind), text_(std::move(text)), number_(number) {}

  ValueKind kind_ = ValueKind::text;
  std::string text_;
  std::int64_t number_ = 0;
};

std::string_view to_string(DatumKind kind);
std::string_view to_string(Derivation d);
std::string_view to_string(ValueKind kind);
DatumKind parse_datum_kind(std::string_view s);
Derivation parse_derivation(std::string_view s);
ValueKind parse_value_kind(std::string_view s);

enum class DomainKind { taxonomy, entity, text, integer, year };

std::string_view to_string(DomainKind kind);
DomainKind parse_domain_kind(std::string_view s);

struct Predicate {
  std::string name;
  DomainKind domain = DomainKind::entity;
  std::string taxonomy;  // set iff domain == taxonomy
  int tau = 0;

  friend bool operator==(const Predicate&, const Predicate&) = default;
};

struct Source {
  SourceId id;
  std::string name;
  std::string category;
  Certainty reliability;

  friend bool operator==(const Source&, const Source&) = default;
};

struct Entity {
  EntityId id;
  std::string label;

  friend bool operator==(const Entity&, const Entity&) = default;
};

/// The weighted triple, the unit of the uncertain knowledge graph.
///
/// kind == mention  => provenance empty, source present, credibility present.
/// kind != mention  => provenance non-empty, no source.
struct UncertainTriple {
  TripleId id;
  EntityId subject;
  std::string predicate;
  Value object;
  Certainty certainty;
  DatumKind kind = DatumKind::mention;
  Derivation derivation = Derivation::captured;
  std::vector<TripleId> provenance;  // sorted by IdLess
  std::optional<SourceId> source;
  std::optional<double> credibility;

  friend bool operator==(const UncertainTriple&, const UncertainTriple&) = default;
};

/// Subject or object slot of a pattern: either "?name" or a constant.
struct Term {
  std::optional<std::string> variable;
  Value constant;

  static Term var(std::string name) { return Term{std::move(name), {}}; }
  static Term of(Value v) { return Term{std::nullopt, std::move(v)}; }
  bool is_variable() const noexcept { return variable.has_value(); }

  friend bool operator==(const Term&, const Term&) = default;
};

struct TriplePattern {
  Term subject;
  std::string predicate;
  Term object;

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

enum class VerdictStatus { untested, confirmed, infirmed, undetermined };

std::string_view to_string(VerdictStatus s);
VerdictStatus parse_verdict_status(std::string_view s);

struct Hypothesis {
  std::string id;
  std::vector<TriplePattern> patterns;
  Certainty threshold{0.9};
  VerdictStatus verdict = VerdictStatus::untested;

  friend bool operator==(const Hypothesis&, const Hypothesis&) = default;
};

/// All current triples of one subject (Ω); its high-certainty part becomes facts.
struct CompositeFactoid {
  std::string id;
  EntityId subject;
  std::vector<TripleId> members;
  Certainty certainty;

  friend bool operator==(const CompositeFactoid&, const CompositeFactoid&) = default;
};

}  // namespace ukg
