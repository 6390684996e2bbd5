#pragma once

/// \file pipeline.hpp
/// The five process phases over one knowledge state: capture, factoid
/// association, fact establishment, hypothesis test and feedback propagation.
///
/// A pipeline call owns the state exclusively for its duration. Read-only
/// operations (decompose, match_patterns, test_hypothesis) take const state
/// and can run concurrently on a snapshot.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ukg/fusion.hpp"
#include "ukg/graph.hpp"
#include "ukg/similarity.hpp"

namespace ukg {

struct FusionConfig {
  AggregatorKind aggregators;
  double pi = 0.9;
  std::map<std::string, int> tau;
  double conflict_floor = 0.0;
  SimilarityConfig similarity;
  double alpha = 0.1;
  double theta = 0.9;  // default hypothesis threshold
  double auto_fact_reliability = 1.0;
  int max_iterations = 1000;
  double epsilon = 1e-9;

  void validate() const;
  FusionParams params() const;

  friend bool operator==(const FusionConfig&, const FusionConfig&) = default;
};

struct AuditEntry {
  std::uint64_t seq = 0;
  std::string at;     // UTC, ISO-8601
  std::string event;  // capture | merge | promote | demote | retract | reliability | propagate
  std::string target;
  std::optional<double> before;
  std::optional<double> after;
  std::string note;

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

struct Binding {
  std::map<std::string, Value> vars;
  double score = 0.0;  // weakest matched certainty
  std::vector<TripleId> triples;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct Verdict {
  std::string id;
  std::string hypothesis_id;
  VerdictStatus status = VerdictStatus::undetermined;
  double theta = 0.0;
  std::vector<Binding> bindings;  // best first
  std::vector<TripleId> supporting;
  std::vector<TripleId> contradicting;
  std::vector<SourceId> sources;  // closure of supporting (confirmed) or contradicting (infirmed)
  std::vector<std::string> warnings;
  bool applied = false;

  std::optional<double> best_score() const;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Everything a pipeline run reads and writes; the unit of persistence.
struct GraphState {
  Graph graph;
  std::map<SourceId, Source, IdLess> sources;
  std::map<std::string, Hypothesis, IdLess> hypotheses;
  std::map<std::string, Verdict, IdLess> verdicts;
  std::map<std::string, CompositeFactoid, IdLess> composites;
  std::map<EntityId, EntityId, IdLess> aliases;  // merged id -> canonical id
  std::vector<AuditEntry> audit;
  std::uint64_t next_hypothesis = 1;
  std::uint64_t next_verdict = 1;

  const Source& source(const SourceId& id) const;
  const Source& add_source(Source source);
  void log(std::string event, std::string target, std::optional<double> before = std::nullopt,
           std::optional<double> after = std::nullopt, std::string note = {});

  friend bool operator==(const GraphState&, const GraphState&) = default;
};

/// Untyped object as found in an input file; typed against the predicate.
using RawObject = std::variant<std::string, std::int64_t>;

Value coerce_value(const Schema& schema, const Predicate& pred, const RawObject& raw);

struct Statement {
  EntityId subject;
  std::string predicate;
  RawObject object;
  double credibility = 1.0;
  std::optional<std::string> subject_label;
  std::optional<std::string> object_label;

  friend bool operator==(const Statement&, const Statement&) = default;
};

struct CaptureReport {
  std::vector<TripleId> mentions;
  std::vector<TripleId> facts;  // promoted straight from a very reliable source
};

/// Mention certainty = reliability(source) x credibility(statement).
CaptureReport capture(GraphState& state, const SourceId& source, const std::vector<Statement>& statements,
                      const FusionConfig& config);

struct AssociateReport {
  std::vector<TripleId> created;
  std::vector<TripleId> updated;
  std::vector<TripleId> retracted;
  std::vector<std::pair<EntityId, EntityId>> merges;
  int iterations = 0;
};

/// Resolves entities, then rebuilds the derived layer from the
/// mentions: Rule 1 to its fixpoint, then Rule 2 one conflict at a time, until
/// neither rule changes anything. Existing facts seed the rebuild so they keep
/// their identity; derived triples keep their id as long as their
/// (subject, predicate, object) is derived again.
AssociateReport associate(GraphState& state, const FusionConfig& config);

struct ProvenanceNode {
  TripleId id;
  DatumKind kind = DatumKind::mention;
  Derivation derivation = Derivation::captured;
  EntityId subject;
  std::string predicate;
  Value object;
  double certainty = 0.0;
  std::optional<SourceId> source;
  std::vector<ProvenanceNode> children;

  std::size_t depth() const;
  std::size_t leaf_count() const;
};

/// Backward chaining: the provenance tree of a triple down to its mentions.
ProvenanceNode decompose(const Graph& graph, const TripleId& id);

struct EstablishReport {
  std::vector<TripleId> promoted;
  std::vector<TripleId> demoted;
  std::vector<TripleId> facts;
  std::vector<std::string> composites;
};

/// Applies Rule 3 and demotes facts whose certainty fell to <= pi.
EstablishReport establish(GraphState& state, const FusionConfig& config);

/// Registers a hypothesis; assigns "h<N>" when the id is empty.
const Hypothesis& add_hypothesis(GraphState& state, Hypothesis hypothesis, std::vector<std::string>* warnings = nullptr);

/// Conjunctive matching over current triples. Entity constants go through `aliases`.
std::vector<Binding> match_patterns(const Graph& graph, const std::vector<TriplePattern>& patterns,
                                    const std::map<EntityId, EntityId, IdLess>* aliases = nullptr);

/// Pure: computes a verdict without recording it.
Verdict test_hypothesis(const GraphState& state, const Hypothesis& hypothesis, const FusionConfig& config);

/// Stores a verdict under a fresh "v<N>" id and updates its hypothesis.
const Verdict& record_verdict(GraphState& state, Verdict verdict);

struct ReliabilityChange {
  SourceId source;
  double before = 0.0;
  double after = 0.0;
};

struct CertaintyChange {
  TripleId triple;
  double before = 0.0;
  double after = 0.0;
};

struct FeedbackReport {
  std::string verdict_id;
  VerdictStatus status = VerdictStatus::undetermined;
  std::vector<ReliabilityChange> reliabilities;
  std::vector<CertaintyChange> certainties;
  std::vector<TripleId> demoted;
  std::vector<TripleId> promoted;
};

/// Confirmed: r += alpha(1-r) for the supporting sources.
/// Infirmed: r *= (1-alpha) for the contradicting sources. Mention certainties
/// are then recomputed and association and establishment re-run.
FeedbackReport propagate_feedback(GraphState& state, const std::string& verdict_id, const FusionConfig& config);

}  // namespace ukg
