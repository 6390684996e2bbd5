#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace ukg;

namespace {

// Entities `ids` with the given labels, each stating `pred` about something.
GraphState labelled(const std::vector<std::tuple<std::string, std::string, std::string>>& rows) {
  GraphState st = fixture::state_with_sources({{"S", 1.0}});
  for (const auto& [id, label, pred] : rows) {
    st.graph.set_entity(id, label);
    if (pred == "bornIn") fixture::mention(st, "S", id, pred, Value::node("Paris"), 0.5);
    if (pred == "awardedIn") fixture::mention(st, "S", id, pred, Value::year(1256), 0.5);
  }
  return st;
}

}  // namespace

TEST_SUITE("similarity") {

TEST_CASE("normalized edit distance") {
  CHECK(sim_string("Thomas Aquinas", "Thomas Aquinas") == 1.0);
  CHECK(sim_string("abc", "") == 0.0);
  CHECK(sim_string("", "") == 1.0);
  // 4 edits over 15 folded code points
  CHECK(sim_string("Thomas Aquinas", "Thomas d'Aquino") == 0.7333333333333334);
  CHECK(sim_string("kitten", "sitting") == 0.5714285714285714);
  CHECK(sim_string("diploma2", "diploma3") == 0.875);
}

TEST_CASE("case and accents are folded") {
  CHECK(sim_string("THOMAS", "thomas") == 1.0);
  CHECK(sim_string("Thomás d'Aquino", "thomas d'aquino") == 1.0);
  CHECK(sim_string("Łódź", "lodz") == 1.0);
  CHECK(fold_name("Ÿ") == std::u32string(U"y"));
  CHECK(edit_distance(U"flaw", U"lawn") == 2);
}

TEST_CASE("similarity functions are symmetric and bounded") {
  std::mt19937 rng(7);
  const std::string alphabet = "abcdeé ";
  auto word = [&] {
    std::string s;
    const int n = std::uniform_int_distribution<int>(0, 8)(rng);
    for (int i = 0; i < n; ++i) {
      const int k = std::uniform_int_distribution<int>(0, 6)(rng);
      s += k == 5 ? std::string("é") : std::string(1, alphabet[static_cast<std::size_t>(k)]);
    }
    return s;
  };
  for (int i = 0; i < 2000; ++i) {
    const std::string a = word();
    const std::string b = word();
    const double s = sim_string(a, b);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    CHECK(s == sim_string(b, a));
    CHECK(sim_string(a, a) == 1.0);
  }
  CHECK(sim_numeric(1256, 1256, 10) == 1.0);
  CHECK(sim_numeric(1256, 1261, 10) == 0.5);
  CHECK(sim_numeric(1256, 1300, 10) == 0.0);
  CHECK_THROWS_AS(sim_numeric(1, 2, 0), Error);
  CHECK(similarity(SimilarityFunction{SimilarityKind::exact, 1}, Value::text("a"), Value::text("a")) == 1.0);
  CHECK(similarity(SimilarityFunction{SimilarityKind::numeric_proximity, 4}, Value::year(1256), Value::year(1258)) ==
        0.5);
}

TEST_CASE("config validation") {
  SimilarityConfig c;
  c.merge_threshold = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
  c.merge_threshold = 0.5;
  c.domains["years"] = SimilarityFunction{SimilarityKind::numeric_proximity, 0.0};
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("identical labels with a shared predicate merge") {
  const GraphState st = labelled({{"p1", "Thomas Aquinas", "bornIn"}, {"p2", "Thomas Aquinas", "bornIn"}});
  const MergeMap m = resolve_entities(st.graph, SimilarityConfig{});
  CHECK(m.at("p1") == "p1");
  CHECK(m.at("p2") == "p1");
}

TEST_CASE("similar labels without a shared predicate stay apart") {
  const GraphState st = labelled({{"p1", "Thomas Aquinas", "bornIn"}, {"p2", "Thomas Aquinas", "awardedIn"}});
  const MergeMap m = resolve_entities(st.graph, SimilarityConfig{});
  CHECK(m.at("p2") == "p2");
}

TEST_CASE("merges are closed transitively") {
  // a~b (0.9) and b~c (0.9) but a and c only 0.8 apart
  CHECK(sim_string("Jon Smith", "John Smyth") < 0.85);
  const GraphState st =
      labelled({{"a", "Jon Smith", "bornIn"}, {"b", "John Smith", "bornIn"}, {"c", "John Smyth", "bornIn"}});
  const MergeMap m = resolve_entities(st.graph, SimilarityConfig{});
  CHECK(m.at("a") == "a");
  CHECK(m.at("b") == "a");
  CHECK(m.at("c") == "a");
}

TEST_CASE("the merge map is an idempotent partition") {
  const GraphState st = labelled({{"a", "Jon Smith", "bornIn"},
                                  {"b", "John Smith", "bornIn"},
                                  {"c", "John Smyth", "bornIn"},
                                  {"d", "Roger Bacon", "bornIn"},
                                  {"e", "Rogier Bacon", "bornIn"}});
  const MergeMap m = resolve_entities(st.graph, SimilarityConfig{});
  for (const auto& [id, canon] : m) {
    CHECK(m.at(canon) == canon);
    CHECK_FALSE(IdLess{}(id, canon));
  }
  CHECK(m.at("e") == "d");
  CHECK(m.at("d") != m.at("a"));
}

}  // TEST_SUITE
