#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ukg {

/// A rooted tree over the values of one domain (places, diploma kinds, ...).
///
/// Multi-parent nodes are rejected, so the least common ancestor is always
/// unique. Levels count edges from the root.
class Taxonomy {
 public:
  Taxonomy() = default;
  explicit Taxonomy(std::string name) : name_(std::move(name)) {}

  /// Builds and validates a tree from (parent, child) edges.
  static Taxonomy from_edges(std::string name, const std::string& root,
                             const std::vector<std::pair<std::string, std::string>>& edges);

  /// Inserts `node` under `parent`; omitting the parent makes it the root.
  Taxonomy& add_node(const std::string& node, const std::optional<std::string>& parent = std::nullopt);

  const std::string& name() const noexcept { return name_; }
  const std::string& root() const noexcept { return root_; }
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }

  bool contains(const std::string& node) const { return nodes_.count(node) != 0; }
  int level(const std::string& node) const;
  std::optional<std::string> parent(const std::string& node) const;
  bool is_ancestor_or_equal(const std::string& ancestor, const std::string& node) const;

  /// Deepest node that is an ancestor-or-equal of both arguments (LCM_p).
  std::string lca(const std::string& a, const std::string& b) const;

  /// level(x) - level(y); y must be an ancestor-or-equal of x.
  int dist_a(const std::string& x, const std::string& y) const;

  /// min of the two ascents to the LCA. Zero iff one value subsumes the other.
  int concept_distance(const std::string& a, const std::string& b) const;

  std::vector<std::string> nodes() const;
  /// (parent, child) pairs ordered by child level then label.
  std::vector<std::pair<std::string, std::string>> edges() const;

  friend bool operator==(const Taxonomy&, const Taxonomy&) = default;

 private:
  struct Node {
    std::optional<std::string> parent;
    int level = 0;
    friend bool operator==(const Node&, const Node&) = default;
  };

  const Node& at(const std::string& node) const;

  std::string name_;
  std::string root_;
  std::map<std::string, Node> nodes_;
};

}  // namespace ukg
