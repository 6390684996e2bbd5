#include "ukg/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <functional>
#include <set>
#include <tuple>

namespace ukg {

namespace {

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void check_unit(double v, const char* what) {
  if (!(v >= 0.0 && v <= 1.0)) throw Error(ErrorCode::invariant_violation, std::string(what) + " outside [0,1]");
}

}  // namespace

void FusionConfig::validate() const {
  check_unit(pi, "pi");
  check_unit(theta, "theta");
  check_unit(auto_fact_reliability, "auto_fact_reliability");
  check_unit(conflict_floor, "conflict_floor");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::invariant_violation, "alpha outside (0,1)");
  for (const auto& [name, t] : tau) {
    if (t < 0) throw Error(ErrorCode::invariant_violation, "tau of '" + name + "' is negative");
  }
  if (max_iterations <= 0) throw Error(ErrorCode::invariant_violation, "max_iterations must be positive");
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::invariant_violation, "epsilon must be >= 0");
  similarity.validate();
}

FusionParams FusionConfig::params() const { return FusionParams{aggregators, tau, conflict_floor}; }

std::optional<double> Verdict::best_score() const {
  if (bindings.empty()) return std::nullopt;
  return bindings.front().score;
}

const Source& GraphState::source(const SourceId& id) const {
  auto it = sources.find(id);
  if (it == sources.end()) throw Error(ErrorCode::unknown_source, "source '" + id + "' is not registered");
  return it->second;
}

const Source& GraphState::add_source(Source src) {
  if (src.id.empty()) throw Error(ErrorCode::invariant_violation, "source id must be non-empty");
  if (sources.count(src.id)) throw Error(ErrorCode::duplicate, "source '" + src.id + "' already registered");
  const SourceId id = src.id;
  return sources.emplace(id, std::move(src)).first->second;
}

void GraphState::log(std::string event, std::string target, std::optional<double> before,
                     std::optional<double> after, std::string note) {
  AuditEntry e;
  e.seq = audit.empty() ? 1 : audit.back().seq + 1;
  e.at = utc_now();
  e.event = std::move(event);
  e.target = std::move(target);
  e.before = before;
  e.after = after;
  e.note = std::move(note);
  audit.push_back(std::move(e));
}

Value coerce_value(const Schema& schema, const Predicate& pred, const RawObject& raw) {
  auto mismatch = [&](const std::string& shown) -> Error {
    return Error(ErrorCode::domain_mismatch, "value '" + shown + "' does not fit predicate '" + pred.name + "'");
  };
  auto as_number = [&]() -> std::int64_t {
    if (const auto* n = std::get_if<std::int64_t>(&raw)) return *n;
    const std::string& s = std::get<std::string>(raw);
    std::int64_t n = 0;
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    if (ec != std::errc{} || end != s.data() + s.size() || s.empty()) throw mismatch(s);
    return n;
  };
  auto as_text = [&]() -> std::string {
    if (const auto* n = std::get_if<std::int64_t>(&raw)) return std::to_string(*n);
    return std::get<std::string>(raw);
  };

  Value v;
  switch (pred.domain) {
    case DomainKind::taxonomy: v = Value::node(as_text()); break;
    case DomainKind::entity:
      if (std::holds_alternative<std::int64_t>(raw)) throw mismatch(as_text());
      v = Value::entity(std::get<std::string>(raw));
      break;
    case DomainKind::text: v = Value::text(as_text()); break;
    case DomainKind::integer: v = Value::integer(as_number()); break;
    case DomainKind::year: v = Value::year(as_number()); break;
  }
  schema.check_value(pred, v);
  return v;
}

// ---------------------------------------------------------------- capture

CaptureReport capture(GraphState& state, const SourceId& source_id, const std::vector<Statement>& statements,
                      const FusionConfig& config) {
  config.validate();
  const Source& src = state.source(source_id);
  Graph& g = state.graph;

  // Validate everything first so a bad line leaves the state untouched.
  std::vector<TripleDraft> drafts;
  drafts.reserve(statements.size());
  for (const auto& st : statements) {
    if (!(st.credibility >= 0.0 && st.credibility <= 1.0)) {
      throw Error(ErrorCode::credibility_out_of_range,
                  "credibility " + std::to_string(st.credibility) + " for '" + st.subject + "'");
    }
    if (st.subject.empty()) throw Error(ErrorCode::invariant_violation, "statement without subject");
    const Predicate& pred = g.schema().predicate(st.predicate);
    TripleDraft d;
    d.subject = st.subject;
    d.predicate = st.predicate;
    d.object = coerce_value(g.schema(), pred, st.object);
    d.certainty = src.reliability.value() * st.credibility;
    d.kind = DatumKind::mention;
    d.source = source_id;
    d.credibility = st.credibility;
    drafts.push_back(std::move(d));
  }

  const bool trusted = src.reliability.value() >= config.auto_fact_reliability;
  CaptureReport report;
  for (std::size_t i = 0; i < drafts.size(); ++i) {
    const Statement& st = statements[i];
    if (st.subject_label) g.set_entity(st.subject, *st.subject_label);
    if (st.object_label && drafts[i].object.kind() == ValueKind::entity) {
      g.set_entity(drafts[i].object.str(), *st.object_label);
    }
    const UncertainTriple& m = g.add(drafts[i]);
    report.mentions.push_back(m.id);
    if (trusted && m.certainty.value() > config.pi) {
      TripleDraft f;
      f.subject = m.subject;
      f.predicate = m.predicate;
      f.object = m.object;
      f.certainty = m.certainty.value();
      f.kind = DatumKind::fact;
      f.derivation = Derivation::promoted;
      f.provenance = {m.id};
      const TripleId mid = m.id;
      const UncertainTriple& fact = g.add(std::move(f));
      report.facts.push_back(fact.id);
      state.log("promote", fact.id, std::nullopt, fact.certainty.value(), "captured from " + source_id + " via " + mid);
    }
  }
  state.log("capture", source_id, std::nullopt, std::nullopt, std::to_string(report.mentions.size()) + " mentions");
  return report;
}

// ---------------------------------------------------------------- associate

namespace {

using Key = std::tuple<EntityId, std::string, Value>;

Key key_of(const UncertainTriple& t) { return Key{t.subject, t.predicate, t.object}; }

struct Prior {
  TripleId id;
  DatumKind kind;
  double certainty;
  Derivation derivation;
};

EntityId canonical(const std::map<EntityId, EntityId, IdLess>& aliases, EntityId id) {
  for (int guard = 0; guard < 1000; ++guard) {
    auto it = aliases.find(id);
    if (it == aliases.end() || it->second == id) return id;
    id = it->second;
  }
  return id;
}

// Applies entity merges to the alias table and rewrites every triple.
std::vector<std::pair<EntityId, EntityId>> apply_merges(GraphState& state, const MergeMap& merges) {
  std::vector<std::pair<EntityId, EntityId>> fresh;
  for (const auto& [from, to] : merges) {
    if (from == to) continue;
    auto it = state.aliases.find(from);
    if (it != state.aliases.end() && it->second == to) continue;
    state.aliases[from] = to;
    fresh.emplace_back(from, to);
  }
  for (auto& [from, to] : state.aliases) to = canonical(state.aliases, to);
  for (const auto& [from, to] : fresh) {
    state.log("merge", from, std::nullopt, std::nullopt,
              "into " + to + " ('" + state.graph.label(from) + "' ~ '" + state.graph.label(to) + "')");
  }
  if (state.aliases.empty()) return fresh;

  std::vector<TripleId> ids;
  for (const auto& [id, _] : state.graph.triples()) ids.push_back(id);
  for (const auto& id : ids) {
    UncertainTriple& t = state.graph.mutable_triple(id);
    t.subject = canonical(state.aliases, t.subject);
    if (t.object.kind() == ValueKind::entity) t.object = Value::entity(canonical(state.aliases, t.object.str()));
  }
  return fresh;
}

class Rebuild {
 public:
  Rebuild(Graph& work, const FusionConfig& config, const std::map<Key, Prior>& prior)
      : work_(work), config_(config), prior_(prior) {}

  void seed(const Key& key, const Prior& p, std::vector<TripleId>& retracted, GraphState& state) {
    const auto& [subject, predicate, object] = key;
    const Predicate& pred = work_.schema().predicate(predicate);
    std::vector<TripleId> leaves;
    for (const auto& [id, t] : work_.triples()) {
      if (t.kind != DatumKind::mention || t.subject != subject || t.predicate != predicate) continue;
      if (subsumes(work_.schema(), pred, object, t.object)) leaves.push_back(id);
    }
    if (leaves.empty()) {
      retracted.push_back(p.id);
      state.log("retract", p.id, p.certainty, std::nullopt, "no supporting mention left");
      return;
    }
    TripleDraft d;
    d.subject = subject;
    d.predicate = predicate;
    d.object = object;
    d.certainty = 0.0;
    d.kind = DatumKind::fact;
    d.derivation = leaves.size() == 1 ? Derivation::promoted : Derivation::consistent;
    d.provenance = std::move(leaves);
    const UncertainTriple& t = work_.insert(work_.new_triple(std::move(d), p.id));
    keys_[key] = t.id;
    refresh(t.id);
  }

  /// Rule 1 to fixpoint, then single Rule 2 steps, until quiet.
  int run() {
    const FusionParams params = config_.params();
    std::set<TripleId, IdLess> focus;
    bool first = true;
    int iterations = 0;
    while (true) {
      if (++iterations > config_.max_iterations) {
        throw Error(ErrorCode::non_termination,
                    "association did not reach a fixpoint within " + std::to_string(config_.max_iterations) +
                        " iterations");
      }
      const auto r1 = apply_rule1(work_, params, first ? nullptr : &focus);
      first = false;
      std::set<TripleId, IdLess> touched;
      for (const auto& delta : r1) touched.insert(merge(delta));
      if (!touched.empty()) {
        focus = settle();
        if (!focus.empty()) continue;
      }
      const auto r2 = apply_rule2(work_, params);
      if (r2.empty()) break;
      focus.clear();
      for (const auto& delta : r2) focus.insert(resolve(delta));
      settle();
    }
    return iterations;
  }

 private:
  TripleId id_for(const Key& key, DatumKind& kind) {
    if (auto it = prior_.find(key); it != prior_.end() && !work_.find(it->second.id)) {
      kind = it->second.kind;
      return it->second.id;
    }
    kind = DatumKind::factoid;
    return work_.reserve_id();
  }

  TripleId merge(const Rule1Delta& delta) {
    const Key key{delta.subject, delta.predicate, delta.object};
    if (auto it = keys_.find(key); it != keys_.end()) {
      UncertainTriple& t = work_.mutable_triple(it->second);
      if (delta.first != t.id) t.provenance.push_back(delta.first);
      if (delta.second != t.id) t.provenance.push_back(delta.second);
      t.provenance = normalize_ids(std::move(t.provenance));
      if (t.derivation == Derivation::promoted && t.provenance.size() > 1) t.derivation = Derivation::consistent;
      return t.id;
    }
    DatumKind kind;
    TripleId id = id_for(key, kind);
    TripleDraft d;
    d.subject = delta.subject;
    d.predicate = delta.predicate;
    d.object = delta.object;
    d.certainty = delta.certainty.value();
    d.kind = kind;
    d.derivation = Derivation::consistent;
    d.provenance = {delta.first, delta.second};
    const UncertainTriple& t = work_.insert(work_.new_triple(std::move(d), std::move(id)));
    keys_[key] = t.id;
    return t.id;
  }

  TripleId resolve(const Rule2Delta& delta) {
    const UncertainTriple& w = work_.triple(delta.winner);
    const Key key{delta.subject, delta.predicate, delta.object};
    TripleId target;
    if (w.kind != DatumKind::mention) {
      target = w.id;
    } else if (auto it = keys_.find(key); it != keys_.end()) {
      target = it->second;
    }
    if (!target.empty()) {
      UncertainTriple& t = work_.mutable_triple(target);
      t.certainty = delta.certainty;
      if (delta.winner != t.id) t.provenance.push_back(delta.winner);
      t.provenance.push_back(delta.loser);
      t.provenance = normalize_ids(std::move(t.provenance));
      t.derivation = Derivation::inconsistent;
      return t.id;
    }
    DatumKind kind;
    TripleId id = id_for(key, kind);
    TripleDraft d;
    d.subject = delta.subject;
    d.predicate = delta.predicate;
    d.object = delta.object;
    d.certainty = delta.certainty.value();
    d.kind = kind;
    d.derivation = Derivation::inconsistent;
    d.provenance = {delta.winner, delta.loser};
    const UncertainTriple& t = work_.insert(work_.new_triple(std::move(d), std::move(id)));
    keys_[key] = t.id;
    return t.id;
  }

  // Recomputes closures and consistent certainties of all derived triples.
  // Returns those whose evidence or certainty moved.
  std::set<TripleId, IdLess> settle() {
    EvidenceIndex index(work_);
    std::set<TripleId, IdLess> moved;
    for (const auto& [key, id] : keys_) {
      const auto& closure = index.mentions(id);
      UncertainTriple& t = work_.mutable_triple(id);
      bool changed = false;
      auto it = closures_.find(id);
      if (it == closures_.end() || it->second != closure) {
        closures_[id] = closure;
        changed = true;
      }
      if (t.derivation != Derivation::inconsistent) {
        const double c = aggregate_evidence(work_, index, id, config_.aggregators.consistent).value();
        if (std::abs(c - t.certainty.value()) > config_.epsilon) changed = true;
        t.certainty = Certainty(c);
      }
      if (changed) moved.insert(id);
    }
    return moved;
  }

  void refresh(const TripleId& id) {
    EvidenceIndex index(work_);
    UncertainTriple& t = work_.mutable_triple(id);
    t.certainty = aggregate_evidence(work_, index, id, config_.aggregators.consistent);
    closures_[id] = index.mentions(id);
  }

  Graph& work_;
  const FusionConfig& config_;
  const std::map<Key, Prior>& prior_;
  std::map<Key, TripleId> keys_;
  std::map<TripleId, std::vector<TripleId>, IdLess> closures_;
};

}  // namespace

AssociateReport associate(GraphState& state, const FusionConfig& config) {
  config.validate();
  AssociateReport report;

  report.merges = apply_merges(state, resolve_entities(state.graph, config.similarity));

  // The previous derived layer, keyed by proposition. After a merge two
  // triples may share a key; the smaller id survives.
  std::map<Key, Prior> prior;
  std::vector<TripleId> duplicates;
  for (const auto& [id, t] : state.graph.triples()) {
    if (t.kind == DatumKind::mention) continue;
    auto [it, inserted] = prior.emplace(key_of(t), Prior{id, t.kind, t.certainty.value(), t.derivation});
    if (!inserted) {
      if (t.kind == DatumKind::fact) it->second.kind = DatumKind::fact;
      duplicates.push_back(id);
    }
  }

  Graph work = state.graph;
  for (const auto& [key, p] : prior) work.erase(p.id);
  for (const auto& id : duplicates) work.erase(id);
  for (const auto& id : duplicates) {
    const auto& t = state.graph.triple(id);
    if (t.kind == DatumKind::fact) {
      state.log("retract", id, t.certainty.value(), std::nullopt, "same proposition as another triple after merge");
    }
    report.retracted.push_back(id);
  }

  Rebuild rebuild(work, config, prior);
  for (const auto& [key, p] : prior) {
    if (p.kind == DatumKind::fact) rebuild.seed(key, p, report.retracted, state);
  }
  report.iterations = rebuild.run();

  for (const auto& [key, p] : prior) {
    const UncertainTriple* now = work.find(p.id);
    if (!now) {
      if (p.kind == DatumKind::fact &&
          std::find(report.retracted.begin(), report.retracted.end(), p.id) == report.retracted.end()) {
        state.log("retract", p.id, p.certainty, std::nullopt, "no longer derived");
        report.retracted.push_back(p.id);
      } else if (p.kind != DatumKind::fact) {
        report.retracted.push_back(p.id);
      }
      continue;
    }
    if (std::abs(now->certainty.value() - p.certainty) > config.epsilon || now->derivation != p.derivation) {
      report.updated.push_back(p.id);
    }
  }
  for (const auto& [id, t] : work.triples()) {
    if (t.kind == DatumKind::mention) continue;
    if (!prior.count(key_of(t)) || prior.at(key_of(t)).id != id) report.created.push_back(id);
  }
  report.created = normalize_ids(std::move(report.created));
  report.updated = normalize_ids(std::move(report.updated));
  report.retracted = normalize_ids(std::move(report.retracted));

  state.graph = std::move(work);
  for (auto it = state.composites.begin(); it != state.composites.end();) {
    const bool stale = std::any_of(it->second.members.begin(), it->second.members.end(),
                                   [&](const TripleId& m) { return !state.graph.find(m); });
    it = stale ? state.composites.erase(it) : std::next(it);
  }
  return report;
}

// ---------------------------------------------------------------- decompose

std::size_t ProvenanceNode::depth() const {
  std::size_t d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

std::size_t ProvenanceNode::leaf_count() const {
  if (children.empty()) return 1;
  std::size_t n = 0;
  for (const auto& c : children) n += c.leaf_count();
  return n;
}

ProvenanceNode decompose(const Graph& graph, const TripleId& id) {
  const UncertainTriple& t = graph.triple(id);
  ProvenanceNode node;
  node.id = t.id;
  node.kind = t.kind;
  node.derivation = t.derivation;
  node.subject = t.subject;
  node.predicate = t.predicate;
  node.object = t.object;
  node.certainty = t.certainty.value();
  node.source = t.source;
  for (const auto& p : t.provenance) node.children.push_back(decompose(graph, p));
  return node;
}

// ---------------------------------------------------------------- establish

EstablishReport establish(GraphState& state, const FusionConfig& config) {
  config.validate();
  Graph& g = state.graph;
  const FactThreshold pi{Certainty(config.pi)};
  EstablishReport report;

  std::map<TripleId, TripleId, IdLess> lifted;  // mention -> its new fact
  const auto builds = build_facts(g, pi);
  for (const auto& b : builds) {
    for (const auto& id : b.omega_plus) {
      const UncertainTriple& t = g.triple(id);
      if (t.kind == DatumKind::fact) continue;
      if (t.kind == DatumKind::factoid) {
        g.mutable_triple(id).kind = DatumKind::fact;
        report.promoted.push_back(id);
        state.log("promote", id, std::nullopt, t.certainty.value(), "factoid above pi");
        continue;
      }
      TripleDraft d;
      d.subject = t.subject;
      d.predicate = t.predicate;
      d.object = t.object;
      d.certainty = t.certainty.value();
      d.kind = DatumKind::fact;
      d.derivation = Derivation::promoted;
      d.provenance = {id};
      const UncertainTriple& f = g.add(std::move(d));
      lifted[id] = f.id;
      report.promoted.push_back(f.id);
      state.log("promote", f.id, std::nullopt, f.certainty.value(), "mention " + id + " above pi");
    }
  }

  for (const auto& [id, t] : g.triples()) {
    if (t.kind != DatumKind::fact || t.certainty.value() > config.pi) continue;
    report.demoted.push_back(id);
  }
  for (const auto& id : report.demoted) {
    UncertainTriple& t = g.mutable_triple(id);
    t.kind = DatumKind::factoid;
    state.log("demote", id, t.certainty.value(), t.certainty.value(), "certainty <= pi");
  }

  state.composites.clear();
  for (const auto& b : builds) {
    if (b.omega.size() < 2) continue;
    CompositeFactoid c;
    c.id = "omega:" + b.subject;
    c.subject = b.subject;
    for (const auto& m : b.omega) {
      auto it = lifted.find(m);
      c.members.push_back(it == lifted.end() ? m : it->second);
    }
    c.members = normalize_ids(std::move(c.members));
    c.certainty = b.composite_certainty;
    report.composites.push_back(c.id);
    state.composites.emplace(c.id, std::move(c));
  }

  for (const auto& [id, t] : g.triples()) {
    if (t.kind == DatumKind::fact) report.facts.push_back(id);
  }
  report.promoted = normalize_ids(std::move(report.promoted));
  return report;
}

// ---------------------------------------------------------------- hypotheses

const Hypothesis& add_hypothesis(GraphState& state, Hypothesis h, std::vector<std::string>* warnings) {
  if (h.patterns.empty()) throw Error(ErrorCode::invariant_violation, "a hypothesis needs at least one pattern");
  const Schema& schema = state.graph.schema();
  for (const auto& p : h.patterns) {
    const Predicate& pred = schema.predicate(p.predicate);
    if (!p.subject.is_variable() && p.subject.constant.kind() != ValueKind::entity) {
      throw Error(ErrorCode::domain_mismatch, "pattern subject must be an entity or a variable");
    }
    if (!p.object.is_variable()) schema.check_value(pred, p.object.constant);
  }
  if (h.patterns.size() == 1 && warnings) {
    warnings->push_back("hypothesis has a single pattern; it should relate two or more facts or factoids");
  }
  if (h.id.empty()) {
    do {
      h.id = "h" + std::to_string(state.next_hypothesis++);
    } while (state.hypotheses.count(h.id));
  } else if (state.hypotheses.count(h.id)) {
    throw Error(ErrorCode::duplicate, "hypothesis '" + h.id + "' already exists");
  }
  const std::string id = h.id;
  return state.hypotheses.emplace(id, std::move(h)).first->second;
}

namespace {

Value resolve_constant(const Value& v, const std::map<EntityId, EntityId, IdLess>* aliases) {
  if (!aliases || v.kind() != ValueKind::entity) return v;
  return Value::entity(canonical(*aliases, v.str()));
}

bool unify(const Term& term, const Value& value, std::map<std::string, Value>& vars,
           const std::map<EntityId, EntityId, IdLess>* aliases) {
  if (!term.is_variable()) return resolve_constant(term.constant, aliases) == value;
  auto [it, inserted] = vars.emplace(*term.variable, value);
  return inserted || it->second == value;
}

std::optional<Value> substitute(const Term& term, const std::map<std::string, Value>& vars,
                                const std::map<EntityId, EntityId, IdLess>* aliases) {
  if (!term.is_variable()) return resolve_constant(term.constant, aliases);
  auto it = vars.find(*term.variable);
  if (it == vars.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::vector<Binding> match_patterns(const Graph& graph, const std::vector<TriplePattern>& patterns,
                                    const std::map<EntityId, EntityId, IdLess>* aliases) {
  std::map<std::string, std::vector<const UncertainTriple*>> by_predicate;
  for (const auto& p : patterns) graph.schema().predicate(p.predicate);
  for (const auto& id : current_triples(graph)) {
    const UncertainTriple& t = graph.triple(id);
    by_predicate[t.predicate].push_back(&t);
  }

  std::vector<Binding> out;
  std::function<void(std::size_t, const Binding&)> step = [&](std::size_t k, const Binding& cur) {
    if (k == patterns.size()) {
      out.push_back(cur);
      return;
    }
    const TriplePattern& pat = patterns[k];
    auto it = by_predicate.find(pat.predicate);
    if (it == by_predicate.end()) return;
    for (const UncertainTriple* t : it->second) {
      Binding next = cur;
      if (!unify(pat.subject, Value::entity(t->subject), next.vars, aliases)) continue;
      if (!unify(pat.object, t->object, next.vars, aliases)) continue;
      next.score = k == 0 ? t->certainty.value() : std::min(next.score, t->certainty.value());
      next.triples.push_back(t->id);
      step(k + 1, next);
    }
  };
  if (!patterns.empty()) step(0, Binding{});

  std::stable_sort(out.begin(), out.end(), [](const Binding& a, const Binding& b) {
    if (a.score != b.score) return a.score > b.score;
    return std::lexicographical_compare(a.triples.begin(), a.triples.end(), b.triples.begin(), b.triples.end(),
                                        IdLess{});
  });
  return out;
}

Verdict test_hypothesis(const GraphState& state, const Hypothesis& h, const FusionConfig& config) {
  if (h.patterns.empty()) throw Error(ErrorCode::invariant_violation, "a hypothesis needs at least one pattern");
  const Graph& g = state.graph;
  const Schema& schema = g.schema();
  const FusionParams params = config.params();
  const double theta = h.threshold.value();

  Verdict v;
  v.hypothesis_id = h.id;
  v.theta = theta;
  if (h.patterns.size() == 1) {
    v.warnings.push_back("hypothesis has a single pattern; it should relate two or more facts or factoids");
  }
  v.bindings = match_patterns(g, h.patterns, &state.aliases);

  std::vector<TripleId> supporting;
  for (const auto& b : v.bindings) {
    if (b.score >= theta) supporting.insert(supporting.end(), b.triples.begin(), b.triples.end());
  }

  std::set<SourceId> sources;
  if (!supporting.empty()) {
    v.status = VerdictStatus::confirmed;
    v.supporting = normalize_ids(std::move(supporting));
    for (const auto& id : v.supporting) {
      const auto closure = g.provenance_closure(id);
      sources.insert(closure.sources.begin(), closure.sources.end());
    }
  } else {
    const auto live = current_triples(g);
    std::vector<TripleId> contradicting;
    for (std::size_t k = 0; k < h.patterns.size(); ++k) {
      const TriplePattern& pat = h.patterns[k];
      const Predicate& pred = schema.predicate(pat.predicate);
      const int tau = params.tau_for(pred);

      std::vector<TriplePattern> others;
      for (std::size_t j = 0; j < h.patterns.size(); ++j) {
        if (j != k) others.push_back(h.patterns[j]);
      }
      std::vector<Binding> contexts =
          others.empty() ? std::vector<Binding>{Binding{}} : match_patterns(g, others, &state.aliases);

      for (const auto& ctx : contexts) {
        const auto s = substitute(pat.subject, ctx.vars, &state.aliases);
        const auto o = substitute(pat.object, ctx.vars, &state.aliases);
        if (!s || !o || s->kind() != ValueKind::entity) continue;
        for (const auto& id : live) {
          const UncertainTriple& t = g.triple(id);
          if (t.subject != s->str() || t.predicate != pat.predicate) continue;
          if (t.certainty.value() < theta) continue;
          if (values_conflict(schema, pred, tau, t.object, *o)) contradicting.push_back(id);
        }
      }
    }
    if (!contradicting.empty()) {
      v.status = VerdictStatus::infirmed;
      v.contradicting = normalize_ids(std::move(contradicting));
      for (const auto& id : v.contradicting) {
        const auto closure = g.provenance_closure(id);
        sources.insert(closure.sources.begin(), closure.sources.end());
      }
    } else {
      v.status = VerdictStatus::undetermined;
    }
  }
  v.sources.assign(sources.begin(), sources.end());
  return v;
}

const Verdict& record_verdict(GraphState& state, Verdict verdict) {
  do {
    verdict.id = "v" + std::to_string(state.next_verdict++);
  } while (state.verdicts.count(verdict.id));
  if (auto it = state.hypotheses.find(verdict.hypothesis_id); it != state.hypotheses.end()) {
    it->second.verdict = verdict.status;
  }
  const std::string id = verdict.id;
  return state.verdicts.emplace(id, std::move(verdict)).first->second;
}

// ---------------------------------------------------------------- feedback

FeedbackReport propagate_feedback(GraphState& state, const std::string& verdict_id, const FusionConfig& config) {
  config.validate();
  auto vit = state.verdicts.find(verdict_id);
  if (vit == state.verdicts.end()) throw Error(ErrorCode::unknown_id, "no verdict '" + verdict_id + "'");
  Verdict& verdict = vit->second;
  if (verdict.applied) throw Error(ErrorCode::already_applied, "verdict '" + verdict_id + "' was already propagated");
  if (verdict.status != VerdictStatus::confirmed && verdict.status != VerdictStatus::infirmed) {
    throw Error(ErrorCode::verdict_undetermined,
                "verdict '" + verdict_id + "' is " + std::string(to_string(verdict.status)) + "; nothing to propagate");
  }

  FeedbackReport report;
  report.verdict_id = verdict_id;
  report.status = verdict.status;

  std::map<TripleId, double, IdLess> before;
  for (const auto& [id, t] : state.graph.triples()) before[id] = t.certainty.value();

  const bool confirmed = verdict.status == VerdictStatus::confirmed;
  for (const auto& sid : verdict.sources) {
    auto it = state.sources.find(sid);
    if (it == state.sources.end()) throw Error(ErrorCode::integrity_violation, "verdict names unknown source " + sid);
    const double r = it->second.reliability.value();
    const double next = confirmed ? r + config.alpha * (1.0 - r) : r * (1.0 - config.alpha);
    it->second.reliability = Certainty(std::clamp(next, 0.0, 1.0));
    report.reliabilities.push_back(ReliabilityChange{sid, r, it->second.reliability.value()});
    state.log("reliability", sid, r, it->second.reliability.value(), "verdict " + verdict_id);
  }

  std::vector<TripleId> mentions;
  for (const auto& [id, t] : state.graph.triples()) {
    if (t.kind == DatumKind::mention && t.credibility && t.source) mentions.push_back(id);
  }
  for (const auto& id : mentions) {
    UncertainTriple& t = state.graph.mutable_triple(id);
    t.certainty = Certainty(state.source(*t.source).reliability.value() * *t.credibility);
  }

  associate(state, config);
  const EstablishReport est = establish(state, config);
  report.demoted = est.demoted;
  report.promoted = est.promoted;

  for (const auto& [id, t] : state.graph.triples()) {
    auto it = before.find(id);
    if (it == before.end()) continue;
    if (std::abs(it->second - t.certainty.value()) > config.epsilon) {
      report.certainties.push_back(CertaintyChange{id, it->second, t.certainty.value()});
    }
  }

  verdict.applied = true;
  state.log("propagate", verdict_id, std::nullopt, std::nullopt,
            std::string(to_string(verdict.status)) + ", " + std::to_string(report.reliabilities.size()) + " sources");
  return report;
}

}  // namespace ukg
