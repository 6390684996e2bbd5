#include "ukg/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

namespace ukg {

std::string_view to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::exact: return "exact";
    case SimilarityKind::edit_distance: return "normalized-edit-distance";
    case SimilarityKind::numeric_proximity: return "numeric-proximity";
  }
  return "exact";
}

SimilarityKind parse_similarity_kind(std::string_view s) {
  if (s == "exact") return SimilarityKind::exact;
  if (s == "normalized-edit-distance" || s == "edit-distance") return SimilarityKind::edit_distance;
  if (s == "numeric-proximity") return SimilarityKind::numeric_proximity;
  throw Error(ErrorCode::parse_error, "unknown similarity function '" + std::string(s) + "'");
}

void SimilarityConfig::validate() const {
  if (!(merge_threshold >= 0.0 && merge_threshold <= 1.0)) {
    throw Error(ErrorCode::invariant_violation, "merge_threshold outside [0,1]");
  }
  auto check = [](const SimilarityFunction& fn, const std::string& where) {
    if (fn.kind == SimilarityKind::numeric_proximity && !(fn.window > 0.0)) {
      throw Error(ErrorCode::invariant_violation, "numeric-proximity window must be > 0 (" + where + ")");
    }
  };
  check(entity, "entity");
  for (const auto& [name, fn] : domains) check(fn, name);
}

namespace {

char32_t decode_one(std::string_view s, std::size_t& i) {
  const auto c0 = static_cast<unsigned char>(s[i]);
  auto cont = [&](std::size_t k) -> char32_t {
    if (i + k >= s.size()) return 0;
    return static_cast<unsigned char>(s[i + k]) & 0x3F;
  };
  if (c0 < 0x80) {
    i += 1;
    return c0;
  }
  if ((c0 >> 5) == 0x6) {
    char32_t cp = ((c0 & 0x1F) << 6) | cont(1);
    i += 2;
    return cp;
  }
  if ((c0 >> 4) == 0xE) {
    char32_t cp = ((c0 & 0x0F) << 12) | (cont(1) << 6) | cont(2);
    i += 3;
    return cp;
  }
  if ((c0 >> 3) == 0x1E) {
    char32_t cp = ((c0 & 0x07) << 18) | (cont(1) << 12) | (cont(2) << 6) | cont(3);
    i += 4;
    return cp;
  }
  i += 1;  // stray continuation byte
  return 0xFFFD;
}

// Latin-1 Supplement U+00C0..U+00FF folded to lower-case ASCII; 0 = keep.
constexpr char kLatin1Fold[64] = {
    'a', 'a', 'a', 'a', 'a', 'a', 0,   'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i',
    'd', 'n', 'o', 'o', 'o', 'o', 'o', 0,   'o', 'u', 'u', 'u', 'u', 'y', 0,   0,
    'a', 'a', 'a', 'a', 'a', 'a', 0,   'c', 'e', 'e', 'e', 'e', 'i', 'i', 'i', 'i',
    'd', 'n', 'o', 'o', 'o', 'o', 'o', 0,   'o', 'u', 'u', 'u', 'u', 'y', 0,   'y',
};

char32_t fold_code_point(char32_t cp) {
  if (cp < 0x80) {
    if (cp >= 'A' && cp <= 'Z') return cp - 'A' + 'a';
    return cp;
  }
  if (cp >= 0xC0 && cp <= 0xFF) {
    const char f = kLatin1Fold[cp - 0xC0];
    if (f != 0) return static_cast<char32_t>(f);
    return cp;
  }
  // Latin Extended-A pairs upper/lower on even/odd code points.
  if (cp >= 0x100 && cp <= 0x17F) {
    static constexpr std::string_view base =
        "aaaaaa"  // U+0100-0105
        "cccccccc"  // U+0106-010D
        "dddd"  // U+010E-0111
        "eeeeeeeeee"  // U+0112-011B
        "gggggggg"  // U+011C-0123
        "hhhh"  // U+0124-0127
        "iiiiiiiiii"  // U+0128-0131
        "ii"  // U+0132-0133
        "jj"  // U+0134-0135
        "kkk"  // U+0136-0138
        "llllllllll"  // U+0139-0142
        "nnnnnnnnn"  // U+0143-014B
        "oooooooo"  // U+014C-0153
        "rrrrrr"  // U+0154-0159
        "ssssssss"  // U+015A-0161
        "tttttt"  // U+0162-0167
        "uuuuuuuuuuuu"  // U+0168-0173
        "ww"  // U+0174-0175
        "yyy"  // U+0176-0178
        "zzzzzz"  // U+0179-017E
        "s";  // U+017F
    const std::size_t idx = cp - 0x100;
    if (idx < base.size()) return static_cast<char32_t>(base[idx]);
  }
  return cp;
}

}  // namespace

std::u32string fold_name(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  std::size_t i = 0;
  while (i < utf8.size()) out.push_back(fold_code_point(decode_one(utf8, i)));
  return out;
}

std::size_t edit_distance(std::u32string_view a, std::u32string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t subst = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, subst});
      diag = up;
    }
  }
  return row[b.size()];
}

double sim_string(std::string_view a, std::string_view b) {
  const std::u32string fa = fold_name(a);
  const std::u32string fb = fold_name(b);
  const std::size_t longest = std::max(fa.size(), fb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(edit_distance(fa, fb)) / static_cast<double>(longest);
}

double sim_exact(const Value& a, const Value& b) { return a == b ? 1.0 : 0.0; }

double sim_numeric(double a, double b, double window) {
  if (!(window > 0.0)) throw Error(ErrorCode::invariant_violation, "numeric-proximity window must be > 0");
  return std::max(0.0, 1.0 - std::abs(a - b) / window);
}

double similarity(const SimilarityFunction& fn, const Value& a, const Value& b) {
  switch (fn.kind) {
    case SimilarityKind::exact:
      return sim_exact(a, b);
    case SimilarityKind::edit_distance:
      return sim_string(a.to_string(), b.to_string());
    case SimilarityKind::numeric_proximity:
      if (!a.is_numeric() || !b.is_numeric()) return sim_exact(a, b);
      return sim_numeric(static_cast<double>(a.number()), static_cast<double>(b.number()), fn.window);
  }
  return 0.0;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // entities are pre-sorted, so the smaller index is the canonical id
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

MergeMap resolve_entities(const Graph& graph, const SimilarityConfig& config) {
  config.validate();

  std::map<EntityId, std::set<std::string>, IdLess> preds;
  for (const auto& [id, label] : graph.entities()) preds[id];
  for (const auto& [id, t] : graph.triples()) {
    preds[t.subject].insert(t.predicate);
    if (t.object.kind() == ValueKind::entity) preds[t.object.str()].insert(t.predicate);
  }

  std::vector<EntityId> ids;
  ids.reserve(preds.size());
  for (const auto& [id, _] : preds) ids.push_back(id);

  std::vector<Value> labels;
  labels.reserve(ids.size());
  for (const auto& id : ids) labels.push_back(Value::text(graph.label(id)));

  DisjointSets sets(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& pi = preds[ids[i]];
    if (pi.empty()) continue;
    for (std::size_t j = i + 1; j < ids.size(); ++j) {
      const auto& pj = preds[ids[j]];
      const bool shared = std::any_of(pi.begin(), pi.end(), [&](const std::string& p) { return pj.count(p) != 0; });
      if (!shared) continue;
      if (similarity(config.entity, labels[i], labels[j]) >= config.merge_threshold) sets.unite(i, j);
    }
  }

  MergeMap out;
  for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], ids[sets.find(i)]);
  return out;
}

}  // namespace ukg
