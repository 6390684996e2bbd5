#include "ukg/taxonomy.hpp"

#include <algorithm>
#include <set>
#include <tuple>

#include "ukg/error.hpp"

namespace ukg {

Taxonomy Taxonomy::from_edges(std::string name, const std::string& root,
                              const std::vector<std::pair<std::string, std::string>>& edges) {
  Taxonomy tax(std::move(name));
  if (root.empty()) throw Error(ErrorCode::invalid_taxonomy, "taxonomy '" + tax.name_ + "' has no root");

  std::map<std::string, std::vector<std::string>> children;
  std::set<std::string> seen_child;
  for (const auto& [parent, child] : edges) {
    if (child == root) {
      throw Error(ErrorCode::invalid_taxonomy, "root '" + root + "' cannot have a parent");
    }
    if (!seen_child.insert(child).second) {
      throw Error(ErrorCode::invalid_taxonomy, "node '" + child + "' has more than one parent");
    }
    children[parent].push_back(child);
  }

  // Breadth-first from the root; anything left over is unreachable or cyclic.
  tax.add_node(root);
  std::vector<std::string> frontier{root};
  while (!frontier.empty()) {
    std::vector<std::string> next;
    for (const auto& p : frontier) {
      auto it = children.find(p);
      if (it == children.end()) continue;
      for (const auto& c : it->second) {
        tax.add_node(c, p);
        next.push_back(c);
      }
    }
    frontier = std::move(next);
  }
  if (tax.size() != seen_child.size() + 1) {
    throw Error(ErrorCode::invalid_taxonomy,
                "taxonomy '" + tax.name_ + "' has nodes unreachable from root '" + root + "'");
  }
  return tax;
}

Taxonomy& Taxonomy::add_node(const std::string& node, const std::optional<std::string>& parent) {
  if (node.empty()) throw Error(ErrorCode::invalid_taxonomy, "empty node label");
  if (contains(node)) throw Error(ErrorCode::duplicate, "node '" + node + "' already in '" + name_ + "'");
  if (!parent) {
    if (!nodes_.empty()) {
      throw Error(ErrorCode::second_root, "'" + name_ + "' already has root '" + root_ + "'");
    }
    root_ = node;
    nodes_.emplace(node, Node{std::nullopt, 0});
    return *this;
  }
  auto it = nodes_.find(*parent);
  if (it == nodes_.end()) throw Error(ErrorCode::unknown_parent, "no node '" + *parent + "' in '" + name_ + "'");
  const int level = it->second.level + 1;
  nodes_.emplace(node, Node{*parent, level});
  return *this;
}

const Taxonomy::Node& Taxonomy::at(const std::string& node) const {
  auto it = nodes_.find(node);
  if (it == nodes_.end()) throw Error(ErrorCode::unknown_node, "no node '" + node + "' in '" + name_ + "'");
  return it->second;
}

int Taxonomy::level(const std::string& node) const { return at(node).level; }

std::optional<std::string> Taxonomy::parent(const std::string& node) const { return at(node).parent; }

bool Taxonomy::is_ancestor_or_equal(const std::string& ancestor, const std::string& node) const {
  const int target = level(ancestor);
  std::string cur = node;
  int lvl = level(cur);
  while (lvl > target) {
    cur = *at(cur).parent;
    --lvl;
  }
  return cur == ancestor;
}

std::string Taxonomy::lca(const std::string& a, const std::string& b) const {
  std::string x = a;
  std::string y = b;
  int lx = level(x);
  int ly = level(y);
  while (lx > ly) {
    x = *at(x).parent;
    --lx;
  }
  while (ly > lx) {
    y = *at(y).parent;
    --ly;
  }
  while (x != y) {
    x = *at(x).parent;
    y = *at(y).parent;
  }
  return x;
}

int Taxonomy::dist_a(const std::string& x, const std::string& y) const {
  if (!is_ancestor_or_equal(y, x)) {
    throw Error(ErrorCode::not_an_ancestor, "'" + y + "' is not an ancestor of '" + x + "'");
  }
  return level(x) - level(y);
}

int Taxonomy::concept_distance(const std::string& a, const std::string& b) const {
  const std::string common = lca(a, b);
  return std::min(dist_a(a, common), dist_a(b, common));
}

std::vector<std::string> Taxonomy::nodes() const {
  std::vector<std::string> out;
  out.reserve(nodes_.size());
  for (const auto& [label, _] : nodes_) out.push_back(label);
  return out;
}

std::vector<std::pair<std::string, std::string>> Taxonomy::edges() const {
  std::vector<std::tuple<int, std::string, std::string>> rows;
  for (const auto& [label, node] : nodes_) {
    if (node.parent) rows.emplace_back(node.level, label, *node.parent);
  }
  std::sort(rows.begin(), rows.end());
  std::vector<std::pair<std::string, std::string>> out;
  out.reserve(rows.size());
  for (auto& [lvl, child, parent] : rows) out.emplace_back(std::move(parent), std::move(child));
  return out;
}

}  // namespace ukg
