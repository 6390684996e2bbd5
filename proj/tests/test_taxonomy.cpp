#include <doctest.h>

#include <random>

#include "support.hpp"

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

Taxonomy random_tree(std::mt19937& rng, int n) {
  Taxonomy t("random");
  t.add_node("v0");
  for (int i = 1; i < n; ++i) {
    const int parent = std::uniform_int_distribution<int>(0, i - 1)(rng);
    t.add_node("v" + std::to_string(i), "v" + std::to_string(parent));
  }
  return t;
}

}  // namespace

TEST_SUITE("taxonomy") {

TEST_CASE("levels follow insertion under a parent") {
  Taxonomy t("places");
  t.add_node("Europe");
  CHECK(t.level("Europe") == 0);
  t.add_node("France", "Europe");
  CHECK(t.level("France") == 1);
  CHECK(code_of([&] { t.add_node("France", "Europe"); }) == ErrorCode::duplicate);
  CHECK(code_of([&] { t.add_node("Asia"); }) == ErrorCode::second_root);
  CHECK(code_of([&] { t.add_node("Lyon", "Gaul"); }) == ErrorCode::unknown_parent);
}

TEST_CASE("edge lists must form a single rooted tree") {
  CHECK(code_of([] { Taxonomy::from_edges("t", "a", {{"a", "b"}, {"c", "b"}}); }) == ErrorCode::invalid_taxonomy);
  CHECK(code_of([] { Taxonomy::from_edges("t", "a", {{"b", "a"}}); }) == ErrorCode::invalid_taxonomy);
  CHECK(code_of([] { Taxonomy::from_edges("t", "a", {{"a", "b"}, {"c", "d"}}); }) == ErrorCode::invalid_taxonomy);
  const Taxonomy single = Taxonomy::from_edges("t", "a", {});
  CHECK(single.size() == 1);
}

TEST_CASE("least common ancestor on the place tree") {
  const Taxonomy f1 = fixture::places();
  CHECK(f1.lca("Paris", "Versailles") == "ParisianRegion");
  CHECK(f1.lca("Paris", "Roma") == "Europe");
  CHECK(f1.lca("Paris", "Paris") == "Paris");
  CHECK(f1.lca("Paris", "France") == "France");
  CHECK(code_of([&] { f1.lca("Paris", "Atlantis"); }) == ErrorCode::unknown_node);
}

TEST_CASE("ascent distance") {
  const Taxonomy f1 = fixture::places();
  CHECK(f1.dist_a("Paris", "Paris") == 0);
  CHECK(f1.dist_a("Paris", "Europe") == 3);
  CHECK(code_of([&] { f1.dist_a("Europe", "Paris"); }) == ErrorCode::not_an_ancestor);
}

TEST_CASE("concept distance") {
  const Taxonomy f1 = fixture::places();
  CHECK(f1.concept_distance("Paris", "Paris") == 0);
  CHECK(f1.concept_distance("Paris", "Versailles") == 1);
  CHECK(f1.concept_distance("Paris", "Roma") == 2);
  CHECK(f1.concept_distance("Paris", "France") == 0);
  const Taxonomy f2 = fixture::diplomas();
  CHECK(f2.concept_distance("master", "doctorate") == 1);
}

TEST_CASE("pairwise properties on the fixture trees and random trees") {
  std::vector<Taxonomy> trees{fixture::places(), fixture::diplomas()};
  std::mt19937 rng(20240611);
  for (int i = 0; i < 20; ++i) trees.push_back(random_tree(rng, std::uniform_int_distribution<int>(1, 50)(rng)));

  for (const auto& t : trees) {
    const auto nodes = t.nodes();
    for (const auto& a : nodes) {
      for (const auto& b : nodes) {
        const std::string l = t.lca(a, b);
        CHECK(l == t.lca(b, a));
        CHECK(t.is_ancestor_or_equal(l, a));
        CHECK(t.is_ancestor_or_equal(l, b));
        // nothing deeper is a common ancestor
        for (const auto& c : nodes) {
          if (t.is_ancestor_or_equal(c, a) && t.is_ancestor_or_equal(c, b)) CHECK(t.level(c) <= t.level(l));
        }
        const int d = t.concept_distance(a, b);
        CHECK(d == t.concept_distance(b, a));
        CHECK(d >= 0);
        CHECK((d == 0) == (t.is_ancestor_or_equal(a, b) || t.is_ancestor_or_equal(b, a)));
        CHECK(d <= std::min(t.level(a), t.level(b)) - t.level(l));
        CHECK(d == std::min(t.level(a) - t.level(l), t.level(b) - t.level(l)));
      }
    }
  }
}

TEST_CASE("edges reproduce the tree") {
  const Taxonomy f1 = fixture::places();
  CHECK(Taxonomy::from_edges(f1.name(), f1.root(), f1.edges()) == f1);
}

}  // TEST_SUITE
