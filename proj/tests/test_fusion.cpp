#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "support.hpp"

using namespace ukg;

namespace {

FusionParams params() { return fixture::config().params(); }

double noisy_or(double a, double b) {
  return aggreg_consistent(Certainty(a), Certainty(b), ConsistentAggregator::noisy_or).value();
}

// Turns a Rule 1 delta into a factoid so the next pass sees it.
TripleId add_factoid(Graph& g, const Rule1Delta& d) {
  return g.add({d.subject, d.predicate, d.object, d.certainty.value(), DatumKind::factoid, Derivation::consistent,
                normalize_ids({d.first, d.second}), {}, {}})
      .id;
}

}  // namespace

TEST_SUITE("fusion") {

TEST_CASE("consistent aggregators") {
  CHECK(noisy_or(0.9, 0.9) == 0.99);
  CHECK(noisy_or(0.8, 0.9) == 0.98);
  CHECK(noisy_or(0.8, 0.6) == doctest::Approx(0.92).epsilon(1e-12));
  CHECK(aggreg_consistent(Certainty(0.3), Certainty(0.7), ConsistentAggregator::max).value() == 0.7);
  CHECK(aggreg_consistent(Certainty(0.3), Certainty(0.7), ConsistentAggregator::min).value() == 0.3);
  CHECK(aggreg_consistent(Certainty(0.3), Certainty(0.7), ConsistentAggregator::avg).value() == 0.5);
  const std::vector<double> three{0.7, 0.7, 0.9};
  CHECK(aggreg_consistent(three, ConsistentAggregator::noisy_or).value() == doctest::Approx(0.991).epsilon(1e-12));
  CHECK(aggreg_consistent(three, ConsistentAggregator::avg).value() == doctest::Approx(2.3 / 3).epsilon(1e-12));
}

TEST_CASE("inconsistent aggregators") {
  const Certainty w(0.97);
  const Certainty l(0.4);
  CHECK(aggreg_inconsistent(w, l, InconsistentAggregator::discount).value() == doctest::Approx(0.582).epsilon(1e-12));
  CHECK(aggreg_inconsistent(w, l, InconsistentAggregator::difference).value() ==
        doctest::Approx(0.57).epsilon(1e-12));
  CHECK(aggreg_inconsistent(w, l, InconsistentAggregator::min).value() == 0.4);
  CHECK(aggreg_inconsistent(Certainty(0.3), Certainty(0.5), InconsistentAggregator::difference).value() == 0.0);
}

TEST_CASE("aggregator laws over random pairs") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    double a = u(rng);
    double b = u(rng);
    const double n = noisy_or(a, b);
    CHECK(n == noisy_or(b, a));
    CHECK(n >= std::max(a, b));
    CHECK(n <= 1.0);
    CHECK(noisy_or(std::min(1.0, a + 0.01), b) >= n);
    for (auto k : {ConsistentAggregator::max, ConsistentAggregator::avg, ConsistentAggregator::min}) {
      const double c = aggreg_consistent(Certainty(a), Certainty(b), k).value();
      CHECK(c >= std::min(a, b));
      CHECK(c <= std::max(a, b));
    }
    if (a < b) std::swap(a, b);
    for (auto k : {InconsistentAggregator::min, InconsistentAggregator::difference, InconsistentAggregator::discount}) {
      const double c = aggreg_inconsistent(Certainty(a), Certainty(b), k).value();
      CHECK(c >= 0.0);
      CHECK(c <= a);
    }
  }
}

TEST_CASE("value distance by domain") {
  const Schema s = fixture::schema();
  const Predicate& born = s.predicate("bornIn");
  const Predicate& year = s.predicate("awardedIn");
  CHECK(value_distance(s, born, Value::node("Paris"), Value::node("Roma")) == 2);
  CHECK(value_distance(s, year, Value::year(1256), Value::year(1256)) == 0);
  CHECK_FALSE(value_distance(s, year, Value::year(1256), Value::year(1257)).has_value());
  CHECK(values_conflict(s, year, 0, Value::year(1256), Value::year(1257)));
  CHECK_FALSE(values_conflict(s, born, 1, Value::node("Paris"), Value::node("Versailles")));
  CHECK(subsumes(s, born, Value::node("France"), Value::node("Paris")));
  CHECK_FALSE(subsumes(s, born, Value::node("Paris"), Value::node("France")));
  CHECK_THROWS_AS(value_lca(s, year, Value::year(1), Value::year(2)), Error);
}

TEST_CASE("agreeing places generalize to their common ancestor") {
  GraphState st = fixture::state_with_sources({{"S", 1.0}});
  const auto paris = fixture::mention(st, "S", "X", "bornIn", Value::node("Paris"), 0.8);
  const auto vers = fixture::mention(st, "S", "X", "bornIn", Value::node("Versailles"), 0.6);
  const auto deltas = apply_rule1(st.graph, params());
  REQUIRE(deltas.size() == 1);
  CHECK(deltas[0].object == Value::node("ParisianRegion"));
  CHECK(deltas[0].certainty.value() == doctest::Approx(0.92).epsilon(1e-12));
  CHECK(normalize_ids({deltas[0].first, deltas[0].second}) == std::vector<TripleId>{paris, vers});

  // once materialized the pair is covered and nothing fires again
  add_factoid(st.graph, deltas[0]);
  CHECK(apply_rule1(st.graph, params()).empty());
}

TEST_CASE("places beyond tau do not generalize") {
  GraphState st = fixture::state_with_sources({{"S", 1.0}});
  fixture::mention(st, "S", "X", "bornIn", Value::node("Paris"), 0.8);
  fixture::mention(st, "S", "X", "bornIn", Value::node("Roma"), 0.6);
  CHECK(apply_rule1(st.graph, params()).empty());
}

TEST_CASE("repeated values reinforce in place") {
  GraphState st = fixture::state_with_sources({{"S1", 1.0}, {"S2", 1.0}});
  fixture::mention(st, "S1", "d", "awardedIn", Value::year(1256), 0.9);
  fixture::mention(st, "S2", "d", "awardedIn", Value::year(1256), 0.9);
  const auto deltas = apply_rule1(st.graph, params());
  REQUIRE(deltas.size() == 1);
  CHECK(deltas[0].object == Value::year(1256));
  CHECK(deltas[0].certainty.value() == 0.99);
}

TEST_CASE("shared evidence is never combined twice") {
  GraphState st = fixture::state_with_sources({{"S", 1.0}});
  const auto a = fixture::mention(st, "S", "X", "bornIn", Value::node("Paris"), 0.8);
  const auto b = fixture::mention(st, "S", "X", "bornIn", Value::node("Paris"), 0.5);
  const auto f = add_factoid(st.graph, apply_rule1(st.graph, params()).at(0));
  EvidenceIndex index(st.graph);
  CHECK_FALSE(index.disjoint(f, a));
  CHECK(index.contains(f, b));
  CHECK(apply_rule1(st.graph, params()).empty());
  CHECK(current_triples(st.graph) == std::vector<TripleId>{f});
}

TEST_CASE("conflicts keep the stronger value, weakened") {
  GraphState st = fixture::state_with_sources({{"S", 1.0}});
  const auto paris = fixture::mention(st, "S", "X", "bornIn", Value::node("Paris"), 0.97);
  const auto roma = fixture::mention(st, "S", "X", "bornIn", Value::node("Roma"), 0.4);
  const auto deltas = apply_rule2(st.graph, params());
  REQUIRE(deltas.size() == 1);
  CHECK(deltas[0].winner == paris);
  CHECK(deltas[0].loser == roma);
  CHECK(deltas[0].object == Value::node("Paris"));
  CHECK(deltas[0].certainty.value() == doctest::Approx(0.582).epsilon(1e-12));
}

TEST_CASE("conflict ties go to the smaller value") {
  GraphState st = fixture::state_with_sources({{"S", 1.0}});
  fixture::mention(st, "S", "X", "nickname", Value::text("B"), 0.5);
  const auto a = fixture::mention(st, "S", "X", "nickname", Value::text("A"), 0.5);
  const auto deltas = apply_rule2(st.graph, params());
  REQUIRE(deltas.size() == 1);
  CHECK(deltas[0].winner == a);
  CHECK(deltas[0].object == Value::text("A"));
  CHECK(deltas[0].certainty.value() == 0.25);
}

TEST_CASE("values within tau are not in conflict") {
  GraphState st = fixture::state_with_sources({{"S", 1.0}});
  fixture::mention(st, "S", "X", "bornIn", Value::node("Paris"), 0.9);
  fixture::mention(st, "S", "X", "bornIn", Value::node("Versailles"), 0.2);
  CHECK(apply_rule2(st.graph, params()).empty());

  SUBCASE("unless tau is lowered") {
    FusionParams strict = params();
    strict.tau["bornIn"] = 0;
    CHECK(apply_rule2(st.graph, strict).size() == 1);
  }
  SUBCASE("or the loser is under the conflict floor") {
    FusionParams floor = params();
    floor.tau["bornIn"] = 0;
    floor.conflict_floor = 0.2;
    CHECK(apply_rule2(st.graph, floor).empty());
  }
}

TEST_CASE("every place pair goes to exactly one rule") {
  const Schema s = fixture::schema();
  const Predicate& born = s.predicate("bornIn");
  const auto nodes = fixture::places().nodes();
  for (int tau = 0; tau <= 3; ++tau) {
    for (const auto& a : nodes) {
      for (const auto& b : nodes) {
        const auto d = value_distance(s, born, Value::node(a), Value::node(b));
        REQUIRE(d.has_value());
        CHECK((*d <= tau) != values_conflict(s, born, tau, Value::node(a), Value::node(b)));
      }
    }
  }
}

TEST_CASE("fact threshold is strict") {
  const GraphState st = fixture::end_state();
  auto plus_size = [&](double pi) {
    std::size_t n = 0;
    for (const auto& b : build_facts(st.graph, FactThreshold{Certainty(pi)})) n += b.omega_plus.size();
    return n;
  };
  CHECK(plus_size(0.9) == 2);
  CHECK(plus_size(0.98) == 1);
  CHECK(plus_size(1.0) == 0);
  CHECK(plus_size(0.0) == 3);

  const auto builds = build_facts(st.graph, FactThreshold{Certainty(0.9)});
  REQUIRE(builds.size() == 2);
  CHECK(builds[0].subject == "ThomasAquinas");
  CHECK(builds[1].subject == "diploma2");
  CHECK(builds[1].composite_certainty.value() == 0.58);
}

TEST_CASE("rule properties over random graphs") {
  std::mt19937 rng(4242);
  for (int round = 0; round < 40; ++round) {
    oracle::RandomCase c = oracle::random_case(rng);
    associate(c.state, c.config);
    const Graph& g = c.state.graph;
    const auto live = current_triples(g);

    // every mention still counts through some live triple
    EvidenceIndex index(g);
    for (const auto& [id, t] : g.triples()) {
      if (t.kind != DatumKind::mention) continue;
      int owners = 0;
      for (const auto& l : live) {
        if (index.contains(l, id)) ++owners;
      }
      CHECK(owners >= 1);
    }

    // generalized values cover every leaf they were built from
    for (const auto& [id, t] : g.triples()) {
      if (t.derivation != Derivation::consistent) continue;
      const Predicate& pred = g.schema().predicate(t.predicate);
      for (const auto& m : index.mentions(id)) CHECK(subsumes(g.schema(), pred, t.object, g.triple(m).object));
    }

    // no more rule firings at the fixpoint
    CHECK(apply_rule1(g, c.config.params()).empty());
    CHECK(apply_rule2(g, c.config.params()).empty());

    for (const auto& b : build_facts(g, FactThreshold{Certainty(c.config.pi)})) {
      CHECK(std::includes(b.omega.begin(), b.omega.end(), b.omega_plus.begin(), b.omega_plus.end(), IdLess{}));
      for (const auto& id : b.omega) CHECK(b.composite_certainty <= g.triple(id).certainty);
    }
  }
}

TEST_CASE("association matches the brute-force reference") {
  std::mt19937 rng(17);
  for (int round = 0; round < 30; ++round) {
    oracle::RandomCase c = oracle::random_case(rng);
    const oracle::Outcome expected = oracle::fixpoint(c.mentions, c.trees, c.config.tau, c.config.conflict_floor);
    associate(c.state, c.config);
    const std::string diff = oracle::compare(expected, oracle::project(c.state, c), 1e-9);
    INFO("round " << round);
    CHECK(diff.empty());
  }
}

}  // TEST_SUITE
