#include "ukg/codec.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace ukg {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::parse_error, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object()) bad("expected an object");
  auto it = j.find(key);
  if (it == j.end()) bad(std::string("missing field '") + key + "'");
  return *it;
}

std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) bad(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

double num(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number()) bad(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

std::int64_t integer(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer()) bad(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::vector<std::string> strings(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) bad(std::string("field '") + key + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) bad(std::string("field '") + key + "' must hold strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

template <typename T>
std::optional<T> optional_field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

json ids(const std::vector<std::string>& v) { return json(v); }

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json raw_term(const Term& t) {
  if (t.is_variable()) return "?" + *t.variable;
  const Value& v = t.constant;
  if (v.is_numeric()) return v.number();
  return v.str();
}

Term term_from_json(const json& j, const Schema& schema, const Predicate& pred, bool subject) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s.size() > 1 && s[0] == '?') return Term::var(s.substr(1));
    if (subject) return Term::of(Value::entity(s));
    return Term::of(coerce_value(schema, pred, s));
  }
  if (j.is_number_integer() && !subject) return Term::of(coerce_value(schema, pred, j.get<std::int64_t>()));
  bad("pattern terms must be strings or integers");
}

SimilarityFunction similarity_fn_from_json(const json& j) {
  SimilarityFunction fn;
  if (j.is_string()) {
    fn.kind = parse_similarity_kind(j.get<std::string>());
    return fn;
  }
  fn.kind = parse_similarity_kind(str(j, "function"));
  if (auto w = optional_field<double>(j, "window")) fn.window = *w;
  return fn;
}

json to_json(const SimilarityFunction& fn) {
  if (fn.kind != SimilarityKind::numeric_proximity) return std::string(to_string(fn.kind));
  return json{{"function", std::string(to_string(fn.kind))}, {"window", fn.window}};
}

}  // namespace

json to_json(const Value& v) {
  json j{{"type", std::string(to_string(v.kind()))}};
  if (v.is_numeric()) {
    j["value"] = v.number();
  } else {
    j["value"] = v.str();
  }
  return j;
}

Value value_from_json(const json& j) {
  const ValueKind kind = parse_value_kind(str(j, "type"));
  switch (kind) {
    case ValueKind::entity: return Value::entity(str(j, "value"));
    case ValueKind::node: return Value::node(str(j, "value"));
    case ValueKind::text: return Value::text(str(j, "value"));
    case ValueKind::integer: return Value::integer(integer(j, "value"));
    case ValueKind::year: return Value::year(integer(j, "value"));
  }
  bad("unknown value type");
}

json to_json(const UncertainTriple& t) {
  json j{{"id", t.id},
         {"s", t.subject},
         {"p", t.predicate},
         {"o", to_json(t.object)},
         {"certainty", t.certainty.value()},
         {"kind", std::string(to_string(t.kind))},
         {"derivation", std::string(to_string(t.derivation))},
         {"provenance", ids(t.provenance)}};
  if (t.source) j["source"] = *t.source;
  if (t.credibility) j["credibility"] = *t.credibility;
  return j;
}

UncertainTriple triple_from_json(const json& j) {
  UncertainTriple t;
  t.id = str(j, "id");
  t.subject = str(j, "s");
  t.predicate = str(j, "p");
  t.object = value_from_json(field(j, "o"));
  const double c = num(j, "certainty");
  if (!(c >= 0.0 && c <= 1.0)) bad("certainty of '" + t.id + "' outside [0,1]");
  t.certainty = Certainty(c);
  t.kind = parse_datum_kind(str(j, "kind"));
  t.derivation = parse_derivation(str(j, "derivation"));
  t.provenance = strings(j, "provenance");
  t.source = optional_field<std::string>(j, "source");
  t.credibility = optional_field<double>(j, "credibility");
  return t;
}

json to_json(const Source& s) {
  return json{{"id", s.id}, {"name", s.name}, {"category", s.category}, {"reliability", s.reliability.value()}};
}

Source source_from_json(const json& j) {
  Source s;
  s.id = str(j, "id");
  s.name = optional_field<std::string>(j, "name").value_or(s.id);
  s.category = optional_field<std::string>(j, "category").value_or("");
  const double r = num(j, "reliability");
  if (!(r >= 0.0 && r <= 1.0)) throw Error(ErrorCode::invariant_violation, "reliability outside [0,1]");
  s.reliability = Certainty(r);
  return s;
}

json to_json(const Predicate& p) {
  json j{{"name", p.name}, {"domain", std::string(to_string(p.domain))}, {"tau", p.tau}};
  if (p.domain == DomainKind::taxonomy) j["taxonomy"] = p.taxonomy;
  return j;
}

Predicate predicate_from_json(const json& j) {
  Predicate p;
  p.name = str(j, "name");
  p.domain = parse_domain_kind(str(j, "domain"));
  if (p.domain == DomainKind::taxonomy) p.taxonomy = str(j, "taxonomy");
  p.tau = static_cast<int>(optional_field<std::int64_t>(j, "tau").value_or(0));
  return p;
}

json to_json(const Taxonomy& t) {
  json edges = json::array();
  for (const auto& [parent, child] : t.edges()) edges.push_back(json::array({parent, child}));
  return json{{"name", t.name()}, {"root", t.root()}, {"edges", edges}};
}

Taxonomy taxonomy_from_json(const json& j) {
  std::vector<std::pair<std::string, std::string>> edges;
  const json& e = field(j, "edges");
  if (!e.is_array()) bad("taxonomy edges must be an array");
  for (const auto& pair : e) {
    if (!pair.is_array() || pair.size() != 2 || !pair[0].is_string() || !pair[1].is_string()) {
      bad("taxonomy edges must be [parent, child] string pairs");
    }
    edges.emplace_back(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  return Taxonomy::from_edges(str(j, "name"), str(j, "root"), edges);
}

json to_json(const Hypothesis& h) {
  json patterns = json::array();
  for (const auto& p : h.patterns) {
    patterns.push_back(json{{"s", raw_term(p.subject)}, {"p", p.predicate}, {"o", raw_term(p.object)}});
  }
  return json{{"id", h.id},
              {"theta", h.threshold.value()},
              {"verdict", std::string(to_string(h.verdict))},
              {"patterns", patterns}};
}

Hypothesis hypothesis_from_json(const json& j, const Schema& schema, double default_theta) {
  Hypothesis h;
  h.id = optional_field<std::string>(j, "id").value_or("");
  const double theta = optional_field<double>(j, "theta").value_or(default_theta);
  if (!(theta >= 0.0 && theta <= 1.0)) throw Error(ErrorCode::invariant_violation, "theta outside [0,1]");
  h.threshold = Certainty(theta);
  if (auto v = optional_field<std::string>(j, "verdict")) h.verdict = parse_verdict_status(*v);
  const json& patterns = field(j, "patterns");
  if (!patterns.is_array()) bad("patterns must be an array");
  for (const auto& p : patterns) {
    TriplePattern tp;
    tp.predicate = str(p, "p");
    const Predicate& pred = schema.predicate(tp.predicate);
    tp.subject = term_from_json(field(p, "s"), schema, pred, true);
    tp.object = term_from_json(field(p, "o"), schema, pred, false);
    h.patterns.push_back(std::move(tp));
  }
  return h;
}

json to_json(const Binding& b) {
  json vars = json::object();
  for (const auto& [name, v] : b.vars) vars[name] = to_json(v);
  return json{{"vars", vars}, {"score", b.score}, {"triples", ids(b.triples)}};
}

json to_json(const Verdict& v) {
  json bindings = json::array();
  for (const auto& b : v.bindings) bindings.push_back(to_json(b));
  return json{{"id", v.id},
              {"hypothesis", v.hypothesis_id},
              {"status", std::string(to_string(v.status))},
              {"theta", v.theta},
              {"score", v.best_score() ? json(*v.best_score()) : json(nullptr)},
              {"bindings", bindings},
              {"supporting", ids(v.supporting)},
              {"contradicting", ids(v.contradicting)},
              {"sources", ids(v.sources)},
              {"warnings", v.warnings},
              {"applied", v.applied}};
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  v.id = str(j, "id");
  v.hypothesis_id = str(j, "hypothesis");
  v.status = parse_verdict_status(str(j, "status"));
  v.theta = num(j, "theta");
  const json& bindings = field(j, "bindings");
  if (!bindings.is_array()) bad("bindings must be an array");
  for (const auto& b : bindings) {
    Binding out;
    const json& vars = field(b, "vars");
    if (!vars.is_object()) bad("binding vars must be an object");
    for (const auto& [name, val] : vars.items()) out.vars.emplace(name, value_from_json(val));
    out.score = num(b, "score");
    out.triples = strings(b, "triples");
    v.bindings.push_back(std::move(out));
  }
  v.supporting = strings(j, "supporting");
  v.contradicting = strings(j, "contradicting");
  v.sources = strings(j, "sources");
  v.warnings = strings(j, "warnings");
  const json& applied = field(j, "applied");
  if (!applied.is_boolean()) bad("applied must be a boolean");
  v.applied = applied.get<bool>();
  return v;
}

json to_json(const AuditEntry& e) {
  return json{{"seq", e.seq},         {"at", e.at},
              {"event", e.event},     {"target", e.target},
              {"before", optional_number(e.before)}, {"after", optional_number(e.after)},
              {"note", e.note}};
}

AuditEntry audit_from_json(const json& j) {
  AuditEntry e;
  const std::int64_t seq = integer(j, "seq");
  if (seq < 1) bad("audit seq must be positive");
  e.seq = static_cast<std::uint64_t>(seq);
  e.at = str(j, "at");
  e.event = str(j, "event");
  e.target = str(j, "target");
  e.before = optional_field<double>(j, "before");
  e.after = optional_field<double>(j, "after");
  e.note = optional_field<std::string>(j, "note").value_or("");
  return e;
}

json to_json(const CompositeFactoid& c) {
  return json{{"id", c.id}, {"subject", c.subject}, {"members", ids(c.members)}, {"certainty", c.certainty.value()}};
}

CompositeFactoid composite_from_json(const json& j) {
  CompositeFactoid c;
  c.id = str(j, "id");
  c.subject = str(j, "subject");
  c.members = strings(j, "members");
  c.certainty = Certainty(num(j, "certainty"));
  return c;
}

json to_json(const ProvenanceNode& n) {
  json children = json::array();
  for (const auto& c : n.children) children.push_back(to_json(c));
  json j{{"id", n.id},
         {"s", n.subject},
         {"p", n.predicate},
         {"o", to_json(n.object)},
         {"certainty", n.certainty},
         {"kind", std::string(to_string(n.kind))},
         {"derivation", std::string(to_string(n.derivation))},
         {"children", children}};
  if (n.source) j["source"] = *n.source;
  return j;
}

json to_json(const FusionConfig& c) {
  json domains = json::object();
  for (const auto& [name, fn] : c.similarity.domains) domains[name] = to_json(fn);
  return json{{"aggregators",
               {{"consistent", std::string(to_string(c.aggregators.consistent))},
                {"inconsistent", std::string(to_string(c.aggregators.inconsistent))}}},
              {"pi", c.pi},
              {"tau", c.tau},
              {"conflict_floor", c.conflict_floor},
              {"alpha", c.alpha},
              {"theta", c.theta},
              {"auto_fact_reliability", c.auto_fact_reliability},
              {"max_iterations", c.max_iterations},
              {"epsilon", c.epsilon},
              {"similarity",
               {{"entity", to_json(c.similarity.entity)},
                {"merge_threshold", c.similarity.merge_threshold},
                {"domains", domains}}}};
}

FusionConfig config_from_json(const json& j) {
  if (!j.is_object()) bad("config must be a JSON object");
  static const std::set<std::string> known = {
      "aggregators", "pi",      "tau",        "conflict_floor", "alpha",     "theta",     "auto_fact_reliability",
      "max_iterations", "epsilon", "similarity", "predicates",     "taxonomies"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) bad("unknown config key '" + key + "'");
  }
  FusionConfig c;
  try {
    if (auto it = j.find("aggregators"); it != j.end()) {
      if (auto v = optional_field<std::string>(*it, "consistent")) c.aggregators.consistent = parse_consistent_aggregator(*v);
      if (auto v = optional_field<std::string>(*it, "inconsistent")) {
        c.aggregators.inconsistent = parse_inconsistent_aggregator(*v);
      }
    }
    if (auto v = optional_field<double>(j, "pi")) c.pi = *v;
    if (auto it = j.find("tau"); it != j.end()) {
      for (const auto& [name, t] : it->items()) {
        if (!t.is_number_integer()) bad("tau of '" + name + "' must be an integer");
        c.tau[name] = t.get<int>();
      }
    }
    if (auto v = optional_field<double>(j, "conflict_floor")) c.conflict_floor = *v;
    if (auto v = optional_field<double>(j, "alpha")) c.alpha = *v;
    if (auto v = optional_field<double>(j, "theta")) c.theta = *v;
    if (auto v = optional_field<double>(j, "auto_fact_reliability")) c.auto_fact_reliability = *v;
    if (auto v = optional_field<int>(j, "max_iterations")) c.max_iterations = *v;
    if (auto v = optional_field<double>(j, "epsilon")) c.epsilon = *v;
    if (auto it = j.find("similarity"); it != j.end()) {
      if (auto e = it->find("entity"); e != it->end()) c.similarity.entity = similarity_fn_from_json(*e);
      if (auto v = optional_field<double>(*it, "merge_threshold")) c.similarity.merge_threshold = *v;
      if (auto d = it->find("domains"); d != it->end()) {
        for (const auto& [name, fn] : d->items()) c.similarity.domains[name] = similarity_fn_from_json(fn);
      }
    }
  } catch (const json::exception& e) {
    bad(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

std::vector<Predicate> predicates_from_config(const json& j) {
  std::vector<Predicate> out;
  auto it = j.find("predicates");
  if (it == j.end()) return out;
  if (!it->is_object()) bad("'predicates' must map names to declarations");
  for (const auto& [name, decl] : it->items()) {
    json d = decl;
    d["name"] = name;
    out.push_back(predicate_from_json(d));
  }
  return out;
}

Statement statement_from_json(const json& j) {
  Statement s;
  s.subject = str(j, "s");
  s.predicate = str(j, "p");
  const json& o = field(j, "o");
  if (o.is_string()) {
    s.object = o.get<std::string>();
  } else if (o.is_number_integer()) {
    s.object = o.get<std::int64_t>();
  } else {
    bad("object must be a string or an integer");
  }
  s.credibility = optional_field<double>(j, "credibility").value_or(1.0);
  if (!(s.credibility >= 0.0 && s.credibility <= 1.0)) {
    bad("credibility " + std::to_string(s.credibility) + " outside [0,1]");
  }
  s.subject_label = optional_field<std::string>(j, "s_label");
  s.object_label = optional_field<std::string>(j, "o_label");
  return s;
}

json to_json(const CaptureReport& r) { return json{{"mentions", ids(r.mentions)}, {"facts", ids(r.facts)}}; }

json to_json(const AssociateReport& r) {
  json merges = json::array();
  for (const auto& [from, to] : r.merges) merges.push_back(json{{"from", from}, {"to", to}});
  return json{{"created", ids(r.created)},
              {"updated", ids(r.updated)},
              {"retracted", ids(r.retracted)},
              {"merges", merges},
              {"iterations", r.iterations}};
}

json to_json(const EstablishReport& r, const Graph& graph) {
  json facts = json::array();
  for (const auto& id : r.facts) facts.push_back(to_json(graph.triple(id)));
  return json{{"promoted", ids(r.promoted)}, {"demoted", ids(r.demoted)}, {"facts", facts},
              {"composites", r.composites}};
}

json to_json(const FeedbackReport& r) {
  json rel = json::array();
  for (const auto& c : r.reliabilities) {
    rel.push_back(json{{"source", c.source}, {"before", c.before}, {"after", c.after}, {"delta", c.after - c.before}});
  }
  json cert = json::array();
  for (const auto& c : r.certainties) {
    cert.push_back(json{{"triple", c.triple}, {"before", c.before}, {"after", c.after}});
  }
  return json{{"verdict", r.verdict_id},
              {"status", std::string(to_string(r.status))},
              {"reliabilities", rel},
              {"certainties", cert},
              {"demoted", ids(r.demoted)},
              {"promoted", ids(r.promoted)}};
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    bad(what + ": " + e.what());
  }
}

}  // namespace ukg
