#include "ukg/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <fstream>
#include <sstream>

namespace ukg {

namespace fs = std::filesystem;

void check_integrity(const GraphState& state) {
  const Graph& g = state.graph;
  auto fail = [](const std::string& what) { throw Error(ErrorCode::integrity_violation, what); };
  for (const auto& [id, t] : g.triples()) {
    if (id != t.id) fail("triple keyed as '" + id + "' carries id '" + t.id + "'");
    const Predicate* pred = g.schema().find_predicate(t.predicate);
    if (!pred) fail("triple '" + id + "' uses undeclared predicate '" + t.predicate + "'");
    try {
      g.schema().check_value(*pred, t.object);
    } catch (const Error& e) {
      fail("triple '" + id + "': " + e.what());
    }
    if (t.kind == DatumKind::mention) {
      if (!t.provenance.empty()) fail("mention '" + id + "' has provenance");
      if (!t.source) fail("mention '" + id + "' has no source");
      if (!state.sources.count(*t.source)) fail("mention '" + id + "' names unknown source '" + *t.source + "'");
    } else {
      if (t.provenance.empty()) fail(std::string(to_string(t.kind)) + " '" + id + "' has no provenance");
      if (t.source) fail("derived triple '" + id + "' carries a source");
    }
    for (const auto& p : t.provenance) {
      if (!g.find(p)) fail("triple '" + id + "' derives from missing '" + p + "'");
    }
  }
  for (const auto& [id, h] : state.hypotheses) {
    for (const auto& p : h.patterns) {
      if (!g.schema().find_predicate(p.predicate)) fail("hypothesis '" + id + "' uses undeclared '" + p.predicate + "'");
    }
  }
  for (const auto& [id, v] : state.verdicts) {
    if (!state.hypotheses.count(v.hypothesis_id)) fail("verdict '" + id + "' refers to missing hypothesis");
    for (const auto& s : v.sources) {
      if (!state.sources.count(s)) fail("verdict '" + id + "' names unknown source '" + s + "'");
    }
  }
  for (const auto& [id, c] : state.composites) {
    if (c.members.size() < 2) fail("composite '" + id + "' has fewer than two members");
    for (const auto& m : c.members) {
      if (!g.find(m)) fail("composite '" + id + "' lists missing triple '" + m + "'");
    }
  }
  std::uint64_t seq = 0;
  for (const auto& e : state.audit) {
    if (e.seq <= seq) fail("audit sequence is not increasing at " + std::to_string(e.seq));
    seq = e.seq;
  }
}

std::string dump_archive(const GraphState& state) {
  check_integrity(state);
  std::vector<json> records;
  auto add = [&](const char* kind, json body) {
    json rec{{"record", kind}};
    rec.update(body);
    records.push_back(std::move(rec));
  };
  const Schema& schema = state.graph.schema();
  for (const auto& [name, tax] : schema.taxonomies()) add("taxonomy", to_json(tax));
  for (const auto& [name, pred] : schema.predicates()) add("predicate", to_json(pred));
  for (const auto& [id, s] : state.sources) add("source", to_json(s));
  for (const auto& [id, label] : state.graph.entities()) add("entity", json{{"id", id}, {"label", label}});
  for (const auto& [from, to] : state.aliases) add("alias", json{{"from", from}, {"to", to}});
  for (const auto& [id, t] : state.graph.triples()) add("triple", to_json(t));
  for (const auto& [id, h] : state.hypotheses) add("hypothesis", to_json(h));
  for (const auto& [id, v] : state.verdicts) add("verdict", to_json(v));
  for (const auto& [id, c] : state.composites) add("composite", to_json(c));
  for (const auto& e : state.audit) add("audit", to_json(e));

  json header{{"record", "header"},
              {"format_version", kFormatVersion},
              {"records", records.size()},
              {"next_triple", state.graph.next_id()},
              {"next_hypothesis", state.next_hypothesis},
              {"next_verdict", state.next_verdict}};
  std::string out = header.dump() + "\n";
  for (const auto& r : records) out += r.dump() + "\n";
  return out;
}

GraphState parse_archive(std::istream& in) {
  std::vector<json> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse_error, "archive line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!lines.back().is_object() || !lines.back().contains("record") || !lines.back()["record"].is_string()) {
      throw Error(ErrorCode::parse_error, "archive line " + std::to_string(lineno) + " is not a tagged record");
    }
  }
  if (lines.empty()) throw Error(ErrorCode::parse_error, "archive is empty");
  const json& header = lines.front();
  if (header["record"] != "header") throw Error(ErrorCode::parse_error, "archive does not start with a header");
  if (!header.contains("format_version") || !header["format_version"].is_number_integer()) {
    throw Error(ErrorCode::parse_error, "header without format_version");
  }
  if (header["format_version"].get<int>() != kFormatVersion) {
    throw Error(ErrorCode::version_mismatch,
                "archive format " + header["format_version"].dump() + ", expected " + std::to_string(kFormatVersion));
  }
  auto counter = [&](const char* key) -> std::uint64_t {
    if (!header.contains(key) || !header[key].is_number_unsigned()) {
      throw Error(ErrorCode::parse_error, std::string("header field '") + key + "' missing");
    }
    return header[key].get<std::uint64_t>();
  };
  if (counter("records") != lines.size() - 1) {
    throw Error(ErrorCode::parse_error, "archive holds " + std::to_string(lines.size() - 1) + " records, header says " +
                                            std::to_string(counter("records")) + " (truncated?)");
  }

  std::map<std::string, std::vector<const json*>> by_kind;
  for (std::size_t i = 1; i < lines.size(); ++i) by_kind[lines[i]["record"].get<std::string>()].push_back(&lines[i]);
  static const std::set<std::string> kinds = {"taxonomy", "predicate", "source",    "entity", "alias",
                                              "triple",   "hypothesis", "verdict", "composite", "audit"};
  for (const auto& [kind, _] : by_kind) {
    if (!kinds.count(kind)) throw Error(ErrorCode::parse_error, "unknown record kind '" + kind + "'");
  }
  auto each = [&](const char* kind, auto&& fn) {
    for (const json* j : by_kind[kind]) fn(*j);
  };

  Schema schema;
  each("taxonomy", [&](const json& j) { schema.add_taxonomy(taxonomy_from_json(j)); });
  each("predicate", [&](const json& j) { schema.add_predicate(predicate_from_json(j)); });

  GraphState state;
  state.graph = Graph(std::move(schema));
  state.graph.set_next_id(counter("next_triple"));
  state.next_hypothesis = counter("next_hypothesis");
  state.next_verdict = counter("next_verdict");

  each("source", [&](const json& j) { state.add_source(source_from_json(j)); });
  each("entity", [&](const json& j) {
    if (!j.contains("id") || !j["id"].is_string() || !j.contains("label") || !j["label"].is_string()) {
      throw Error(ErrorCode::parse_error, "malformed entity record");
    }
    state.graph.set_entity(j["id"].get<std::string>(), j["label"].get<std::string>());
  });
  each("alias", [&](const json& j) {
    if (!j.contains("from") || !j["from"].is_string() || !j.contains("to") || !j["to"].is_string()) {
      throw Error(ErrorCode::parse_error, "malformed alias record");
    }
    state.aliases[j["from"].get<std::string>()] = j["to"].get<std::string>();
  });

  // Derived triples may carry smaller ids than their inputs, so insert in
  // dependency order rather than file order.
  std::vector<UncertainTriple> pending;
  each("triple", [&](const json& j) { pending.push_back(triple_from_json(j)); });
  while (!pending.empty()) {
    std::vector<UncertainTriple> blocked;
    for (auto& t : pending) {
      const bool ready = std::all_of(t.provenance.begin(), t.provenance.end(),
                                     [&](const TripleId& p) { return state.graph.find(p) != nullptr; });
      if (ready) {
        state.graph.insert(std::move(t));
      } else {
        blocked.push_back(std::move(t));
      }
    }
    if (blocked.size() == pending.size()) {
      throw Error(ErrorCode::integrity_violation,
                  "triple '" + blocked.front().id + "' has dangling or cyclic provenance");
    }
    pending = std::move(blocked);
  }

  each("hypothesis", [&](const json& j) {
    Hypothesis h = hypothesis_from_json(j, state.graph.schema(), 0.9);
    const std::string id = h.id;
    if (!state.hypotheses.emplace(id, std::move(h)).second) {
      throw Error(ErrorCode::integrity_violation, "duplicate hypothesis '" + id + "'");
    }
  });
  each("verdict", [&](const json& j) {
    Verdict v = verdict_from_json(j);
    const std::string id = v.id;
    if (!state.verdicts.emplace(id, std::move(v)).second) {
      throw Error(ErrorCode::integrity_violation, "duplicate verdict '" + id + "'");
    }
  });
  each("composite", [&](const json& j) {
    CompositeFactoid c = composite_from_json(j);
    const std::string id = c.id;
    state.composites.emplace(id, std::move(c));
  });
  each("audit", [&](const json& j) { state.audit.push_back(audit_from_json(j)); });

  check_integrity(state);
  return state;
}

void save(const GraphState& state, const fs::path& path) {
  const std::string text = dump_archive(state);
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error(ErrorCode::io_error, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot replace '" + path.string() + "': " + ec.message());
}

GraphState load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  return parse_archive(in);
}

std::vector<Statement> parse_mentions(std::istream& in) {
  std::vector<Statement> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(statement_from_json(json::parse(line)));
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::parse_error, "mention line " + std::to_string(lineno) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::parse_error, "mention line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

std::vector<Statement> import_mentions(const fs::path& path, const GraphState& state, const SourceId& source) {
  state.source(source);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path.string() + "'");
  return parse_mentions(in);
}

StateDir::StateDir(fs::path root, bool lock) : root_(std::move(root)) {
  if (!lock || !fs::is_directory(root_)) return;
  const fs::path lock_path = root_ / "lock";
  lock_fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
  if (lock_fd_ < 0) throw Error(ErrorCode::io_error, "cannot open lock file '" + lock_path.string() + "'");
  if (::flock(lock_fd_, LOCK_EX) != 0) {
    ::close(lock_fd_);
    lock_fd_ = -1;
    throw Error(ErrorCode::io_error, "cannot lock '" + root_.string() + "'");
  }
}

StateDir::~StateDir() {
  if (lock_fd_ >= 0) {
    ::flock(lock_fd_, LOCK_UN);
    ::close(lock_fd_);
  }
}

void StateDir::init(const fs::path& root, const json& config, const std::vector<Taxonomy>& taxonomies) {
  const FusionConfig parsed = config_from_json(config);
  (void)parsed;
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec) throw Error(ErrorCode::io_error, "cannot create '" + root.string() + "': " + ec.message());
  if (fs::exists(root / "state.jsonl")) {
    throw Error(ErrorCode::duplicate, "'" + root.string() + "' is already initialized");
  }

  Schema schema;
  for (const auto& t : taxonomies) schema.add_taxonomy(t);
  if (auto it = config.find("taxonomies"); it != config.end()) {
    if (!it->is_array()) throw Error(ErrorCode::parse_error, "'taxonomies' must be an array");
    for (const auto& t : *it) schema.add_taxonomy(taxonomy_from_json(t));
  }
  for (auto& p : predicates_from_config(config)) schema.add_predicate(std::move(p));

  json stored = config;
  stored.erase("taxonomies");
  {
    std::ofstream out(root / "config.json", std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot write config in '" + root.string() + "'");
    out << stored.dump(2) << "\n";
  }
  GraphState state;
  state.graph = Graph(std::move(schema));
  save(state, root / "state.jsonl");
}

bool StateDir::exists() const { return fs::exists(archive_path()); }

FusionConfig StateDir::config() const {
  if (!fs::exists(config_path())) return FusionConfig{};
  return config_from_json(parse_json(read_file(config_path().string()), "config.json"));
}

GraphState StateDir::load() const {
  if (!exists()) throw Error(ErrorCode::io_error, "no state in '" + root_.string() + "' (run init first)");
  return ukg::load(archive_path());
}

void StateDir::commit(const GraphState& state) const {
  if (exists()) {
    const GraphState current = ukg::load(archive_path());
    const auto& old = current.audit;
    const bool prefix = old.size() <= state.audit.size() && std::equal(old.begin(), old.end(), state.audit.begin());
    if (!prefix) throw Error(ErrorCode::integrity_violation, "audit log is append-only");
  }
  save(state, archive_path());
}

}  // namespace ukg
