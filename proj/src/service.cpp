#include "ukg/service.hpp"

#include <httplib.h>

#include <algorithm>
#include <charconv>
#include <sstream>

#include "ukg/store.hpp"

namespace ukg {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::unknown_id:
    case ErrorCode::unknown_source:
      return 404;
    case ErrorCode::version_conflict:
    case ErrorCode::already_applied:
    case ErrorCode::duplicate:
      return 409;
    case ErrorCode::integrity_violation:
    case ErrorCode::non_termination:
    case ErrorCode::verdict_undetermined:
      return 422;
    case ErrorCode::io_error:
      return 500;
    default:
      return 400;
  }
}

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

std::size_t query_number(const ApiRequest& r, const std::string& key, std::size_t fallback) {
  auto it = r.query.find(key);
  if (it == r.query.end() || it->second.empty()) return fallback;
  std::size_t n = 0;
  const std::string& s = it->second;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc{} || end != s.data() + s.size()) {
    throw Error(ErrorCode::usage, "query parameter '" + key + "' must be a non-negative integer");
  }
  return n;
}

json body_of(const ApiRequest& r) {
  if (r.body.empty()) return json::object();
  json j = parse_json(r.body, "request body");
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "request body must be a JSON object");
  return j;
}

ApiResponse not_found(const ApiRequest& r) {
  throw Error(ErrorCode::unknown_id, "no route for " + r.method + " " + r.path);
}

}  // namespace

ApiService::ApiService(std::filesystem::path state_dir) : dir_(std::move(state_dir)) {
  StateDir dir(*dir_);
  config_ = dir.config();
  current_ = std::make_shared<const Snapshot>(Snapshot{0, dir.load()});
}

ApiService::ApiService(GraphState state, FusionConfig config) : config_(std::move(config)) {
  config_.validate();
  current_ = std::make_shared<const Snapshot>(Snapshot{0, std::move(state)});
}

std::shared_ptr<const ApiService::Snapshot> ApiService::snapshot() const {
  std::lock_guard<std::mutex> lock(snapshot_mutex_);
  return current_;
}

ApiResponse ApiService::handle(const ApiRequest& request) {
  std::uint64_t version = 0;
  try {
    if (request.method == "GET") {
      const auto snap = snapshot();
      version = snap->version;
      return read(request, *snap);
    }
    if (request.method == "POST") return mutate(request);
    throw Error(ErrorCode::usage, "method " + request.method + " not supported");
  } catch (const Error& e) {
    if (version == 0) version = this->version();
    return ApiResponse{http_status(e.code()),
                       json{{"version", version},
                            {"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}}}}};
  }
}

ApiResponse ApiService::read(const ApiRequest& request, const Snapshot& snap) {
  const auto parts = split_path(request.path);
  const GraphState& st = snap.state;
  auto ok = [&](json data) { return ApiResponse{200, json{{"version", snap.version}, {"data", std::move(data)}}}; };

  if (parts.size() == 1 && parts[0] == "sources") {
    json out = json::array();
    for (const auto& [id, s] : st.sources) out.push_back(to_json(s));
    return ok(out);
  }
  if (parts.size() == 1 && parts[0] == "triples") {
    std::optional<DatumKind> kind;
    if (auto it = request.query.find("kind"); it != request.query.end() && !it->second.empty()) {
      kind = parse_datum_kind(it->second);
    }
    std::optional<std::string> subject;
    if (auto it = request.query.find("subject"); it != request.query.end() && !it->second.empty()) {
      subject = it->second;
    }
    const std::size_t offset = query_number(request, "offset", 0);
    const std::size_t limit = query_number(request, "limit", 100);
    json items = json::array();
    std::size_t total = 0;
    for (const auto& [id, t] : st.graph.triples()) {
      if (kind && t.kind != *kind) continue;
      if (subject && t.subject != *subject) continue;
      if (total >= offset && items.size() < limit) items.push_back(to_json(t));
      ++total;
    }
    return ok(json{{"total", total}, {"offset", offset}, {"limit", limit}, {"items", items}});
  }
  if (parts.size() == 2 && parts[0] == "triples") return ok(to_json(st.graph.triple(parts[1])));
  if (parts.size() == 3 && parts[0] == "triples" && parts[2] == "provenance") {
    return ok(to_json(decompose(st.graph, parts[1])));
  }
  if (parts.size() == 1 && parts[0] == "hypotheses") {
    json out = json::array();
    for (const auto& [id, h] : st.hypotheses) out.push_back(to_json(h));
    return ok(out);
  }
  if (parts.size() == 2 && parts[0] == "verdicts") {
    auto it = st.verdicts.find(parts[1]);
    if (it == st.verdicts.end()) throw Error(ErrorCode::unknown_id, "no verdict '" + parts[1] + "'");
    return ok(to_json(it->second));
  }
  if (parts.size() == 1 && parts[0] == "audit") {
    const std::size_t since = query_number(request, "since", 0);
    json out = json::array();
    for (const auto& e : st.audit) {
      if (e.seq > since) out.push_back(to_json(e));
    }
    return ok(out);
  }
  return not_found(request);
}

ApiResponse ApiService::mutate(const ApiRequest& request) {
  std::lock_guard<std::mutex> writer(writer_mutex_);
  const auto base = snapshot();
  const auto parts = split_path(request.path);
  const json body = body_of(request);

  std::optional<std::uint64_t> expected;
  if (request.if_match && !request.if_match->empty()) {
    std::string tag = *request.if_match;
    tag.erase(std::remove(tag.begin(), tag.end(), '"'), tag.end());
    std::uint64_t n = 0;
    auto [end, ec] = std::from_chars(tag.data(), tag.data() + tag.size(), n);
    if (ec != std::errc{} || end != tag.data() + tag.size()) {
      throw Error(ErrorCode::usage, "If-Match must carry a version number");
    }
    expected = n;
  } else if (auto it = body.find("expected_version"); it != body.end()) {
    if (!it->is_number_unsigned()) throw Error(ErrorCode::usage, "expected_version must be a non-negative integer");
    expected = it->get<std::uint64_t>();
  }
  if (expected && *expected != base->version) {
    throw Error(ErrorCode::version_conflict, "state is at version " + std::to_string(base->version) +
                                                 ", request expected " + std::to_string(*expected));
  }

  GraphState st = base->state;
  json data;
  if (parts.size() == 1 && parts[0] == "sources") {
    Source s = source_from_json([&] {
      json j = body;
      if (!j.contains("id") && j.contains("name")) j["id"] = j["name"];
      return j;
    }());
    data = to_json(st.add_source(std::move(s)));
  } else if (parts.size() == 1 && parts[0] == "capture") {
    if (!body.contains("source") || !body["source"].is_string()) {
      throw Error(ErrorCode::parse_error, "capture needs a 'source' id");
    }
    std::vector<Statement> statements;
    if (auto it = body.find("statements"); it != body.end()) {
      if (!it->is_array()) throw Error(ErrorCode::parse_error, "'statements' must be an array");
      for (const auto& s : *it) statements.push_back(statement_from_json(s));
    } else if (auto m = body.find("mentions"); m != body.end() && m->is_string()) {
      std::istringstream in(m->get<std::string>());
      statements = parse_mentions(in);
    }
    data = to_json(capture(st, body["source"].get<std::string>(), statements, config_));
  } else if (parts.size() == 1 && parts[0] == "associate") {
    data = to_json(associate(st, config_));
  } else if (parts.size() == 1 && parts[0] == "establish") {
    const EstablishReport r = establish(st, config_);
    data = to_json(r, st.graph);
  } else if (parts.size() == 1 && parts[0] == "hypotheses") {
    std::vector<std::string> warnings;
    const Hypothesis& h = add_hypothesis(st, hypothesis_from_json(body, st.graph.schema(), config_.theta), &warnings);
    data = json{{"hypothesis", to_json(h)}, {"warnings", warnings}};
  } else if (parts.size() == 3 && parts[0] == "hypotheses" && parts[2] == "test") {
    auto it = st.hypotheses.find(parts[1]);
    if (it == st.hypotheses.end()) throw Error(ErrorCode::unknown_id, "no hypothesis '" + parts[1] + "'");
    Verdict v = test_hypothesis(st, it->second, config_);
    data = to_json(record_verdict(st, std::move(v)));
  } else if (parts.size() == 3 && parts[0] == "verdicts" && parts[2] == "propagate") {
    data = to_json(propagate_feedback(st, parts[1], config_));
  } else {
    return not_found(request);
  }

  if (dir_) StateDir(*dir_).commit(st);
  auto next = std::make_shared<const Snapshot>(Snapshot{base->version + 1, std::move(st)});
  {
    std::lock_guard<std::mutex> lock(snapshot_mutex_);
    current_ = next;
  }
  return ApiResponse{200, json{{"version", next->version}, {"data", std::move(data)}}};
}

void ApiService::bind(httplib::Server& server) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ApiRequest r;
    r.method = req.method;
    r.path = req.path;
    for (const auto& [k, v] : req.params) r.query[k] = v;
    r.body = req.body;
    if (req.has_header("If-Match")) r.if_match = req.get_header_value("If-Match");
    const ApiResponse out = handle(r);
    res.status = out.status;
    res.set_header("ETag", "\"" + out.body.value("version", json(0)).dump() + "\"");
    res.set_content(out.body.dump(), "application/json");
  };
  server.Get(".*", route);
  server.Post(".*", route);
}

}  // namespace ukg
