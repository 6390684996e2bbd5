#include <doctest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "ukg/store.hpp"

using namespace ukg;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::usage;
}

GraphState reparse(const std::string& text) {
  std::istringstream in(text);
  return parse_archive(in);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

TEST_SUITE("store") {

TEST_CASE("an empty state is a single header line") {
  GraphState st;
  const std::string text = dump_archive(st);
  const auto lines = lines_of(text);
  REQUIRE(lines.size() == 1);
  const json header = json::parse(lines[0]);
  CHECK(header["record"] == "header");
  CHECK(header["format_version"] == kFormatVersion);
  CHECK(header["records"] == 0);
  CHECK(reparse(text) == st);
}

TEST_CASE("a full scenario round-trips exactly") {
  GraphState st = fixture::diploma_scenario();
  const FusionConfig cfg = fixture::config();
  add_hypothesis(st, fixture::graduation_hypothesis());
  record_verdict(st, test_hypothesis(st, st.hypotheses.at("h1"), cfg));

  const std::string text = dump_archive(st);
  const GraphState back = reparse(text);
  CHECK(back == st);
  CHECK(dump_archive(back) == text);

  const auto dir = fixture::scratch("roundtrip");
  save(st, dir / "state.jsonl");
  CHECK(load(dir / "state.jsonl") == st);
}

TEST_CASE("triples are archived in id order even when provenance points forward") {
  // facts keep their id across re-derivation, so their inputs can be newer
  const GraphState st = fixture::diploma_scenario();
  std::vector<TripleId> order;
  for (const auto& line : lines_of(dump_archive(st))) {
    const json j = json::parse(line);
    if (j["record"] == "triple") order.push_back(j["id"].get<std::string>());
  }
  CHECK(std::is_sorted(order.begin(), order.end(), IdLess{}));
  bool forward = false;
  for (const auto& [id, t] : st.graph.triples()) {
    for (const auto& p : t.provenance) forward = forward || IdLess{}(id, p);
  }
  CHECK(forward);
  CHECK(reparse(dump_archive(st)) == st);
}

TEST_CASE("damaged archives are rejected") {
  const std::string text = dump_archive(fixture::diploma_scenario());
  auto lines = lines_of(text);

  SUBCASE("truncated") {
    lines.pop_back();
    CHECK(code_of([&] { reparse(join(lines)); }) == ErrorCode::parse_error);
  }
  SUBCASE("not json") {
    lines[1] = "{\"record\": \"triple\", ";
    CHECK(code_of([&] { reparse(join(lines)); }) == ErrorCode::parse_error);
  }
  SUBCASE("newer format") {
    json header = json::parse(lines[0]);
    header["format_version"] = kFormatVersion + 1;
    lines[0] = header.dump();
    CHECK(code_of([&] { reparse(join(lines)); }) == ErrorCode::version_mismatch);
  }
  SUBCASE("dangling provenance") {
    for (auto& l : lines) {
      json j = json::parse(l);
      if (j["record"] == "triple" && !j["provenance"].empty()) {
        j["provenance"] = json::array({"t999"});
        l = j.dump();
        break;
      }
    }
    CHECK(code_of([&] { reparse(join(lines)); }) == ErrorCode::integrity_violation);
  }
  SUBCASE("unknown source") {
    for (auto it = lines.begin(); it != lines.end(); ++it) {
      if (json::parse(*it)["record"] == "source") {
        lines.erase(it);
        break;
      }
    }
    json header = json::parse(lines[0]);
    header["records"] = header["records"].get<int>() - 1;
    lines[0] = header.dump();
    CHECK(code_of([&] { reparse(join(lines)); }) == ErrorCode::integrity_violation);
  }
  SUBCASE("missing file") {
    CHECK(code_of([] { load("/nonexistent/ukg/state.jsonl"); }) == ErrorCode::io_error);
  }
}

TEST_CASE("mention files") {
  GraphState st = fixture::state_with_sources({{"S3", 0.9}});
  const auto stmts = import_mentions(fixture::path("s3_paper.jsonl"), st, "S3");
  REQUIRE(stmts.size() == 3);
  CHECK(stmts[0].subject_label == std::optional<std::string>("Thomas Aquinas"));
  CHECK(stmts[1].credibility == 0.4);
  CHECK(std::get<std::int64_t>(stmts[2].object) == 1256);

  std::istringstream empty("");
  CHECK(parse_mentions(empty).empty());
  std::istringstream blank("\n\n");
  CHECK(parse_mentions(blank).empty());

  std::istringstream bad(R"({"s": "X", "p": "bornIn", "o": "Paris", "credibility": 1.3})");
  CHECK(code_of([&] { parse_mentions(bad); }) == ErrorCode::parse_error);
  std::istringstream missing(R"({"s": "X", "o": "Paris"})");
  CHECK(code_of([&] { parse_mentions(missing); }) == ErrorCode::parse_error);

  CHECK(code_of([&] { import_mentions(fixture::path("s3_paper.jsonl"), st, "S9"); }) == ErrorCode::unknown_source);
}

TEST_CASE("state directories") {
  const auto root = fixture::scratch("statedir") / "st";
  StateDir::init(root, fixture::config_json(), fixture::taxonomies());
  CHECK(code_of([&] { StateDir::init(root, fixture::config_json(), fixture::taxonomies()); }) ==
        ErrorCode::duplicate);

  StateDir dir(root);
  CHECK(dir.exists());
  CHECK(dir.config().pi == 0.9);
  CHECK(dir.config().tau.at("isA") == 0);

  GraphState st = dir.load();
  CHECK(st.graph.schema().find_predicate("graduates"));
  CHECK(st.graph.schema().find_taxonomy("places"));
  st.add_source(Source{"S1", "register", "archive", Certainty(0.7)});
  st.log("note", "S1");
  dir.commit(st);
  CHECK(dir.load() == st);

  SUBCASE("audit history cannot be rewritten") {
    GraphState forged = st;
    forged.audit.clear();
    CHECK(code_of([&] { dir.commit(forged); }) == ErrorCode::integrity_violation);
    forged = st;
    forged.audit[0].note = "edited";
    CHECK(code_of([&] { dir.commit(forged); }) == ErrorCode::integrity_violation);
  }
  SUBCASE("config with unknown keys is rejected") {
    json cfg = fixture::config_json();
    cfg["speed"] = "fast";
    CHECK(code_of([&] { StateDir::init(root.parent_path() / "other", cfg, fixture::taxonomies()); }) ==
          ErrorCode::parse_error);
  }
}

}  // TEST_SUITE
