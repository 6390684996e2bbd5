#pragma once

#include <map>
#include <string>
#include <string_view>

#include "ukg/graph.hpp"

namespace ukg {

enum class SimilarityKind { exact, edit_distance, numeric_proximity };

std::string_view to_string(SimilarityKind kind);
SimilarityKind parse_similarity_kind(std::string_view s);

/// One sim_D choice. `window` only matters for numeric proximity.
struct SimilarityFunction {
  SimilarityKind kind = SimilarityKind::edit_distance;
  double window = 1.0;

  friend bool operator==(const SimilarityFunction&, const SimilarityFunction&) = default;
};

struct SimilarityConfig {
  SimilarityFunction entity;                           // compares entity labels
  std::map<std::string, SimilarityFunction> domains;  // keyed by domain or taxonomy name
  double merge_threshold = 0.85;

  void validate() const;

  friend bool operator==(const SimilarityConfig&, const SimilarityConfig&) = default;
};

/// Lower-cases and strips Latin accents (locale-naive); input is UTF-8.
std::u32string fold_name(std::string_view utf8);

/// Levenshtein distance over code points.
std::size_t edit_distance(std::u32string_view a, std::u32string_view b);

/// 1 - edit/max(|a|,|b|) on folded strings; 1 when both are empty.
double sim_string(std::string_view a, std::string_view b);
double sim_exact(const Value& a, const Value& b);
/// max(0, 1 - |a-b|/window).
double sim_numeric(double a, double b, double window);

double similarity(const SimilarityFunction& fn, const Value& a, const Value& b);

/// entity id -> canonical id (the IdLess-smallest member of its class).
using MergeMap = std::map<EntityId, EntityId>;

/// Clusters entities whose labels are similar enough and that appear with at
/// least one common predicate. Clusters are the transitive closure of the
/// pairwise merges.
MergeMap resolve_entities(const Graph& graph, const SimilarityConfig& config);

}  // namespace ukg
