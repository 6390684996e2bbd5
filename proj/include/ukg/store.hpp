#pragma once

/// \file store.hpp
/// JSON-lines archive of a GraphState, mention-file import, and the on-disk
/// state directory used by the CLI and the HTTP service.
///
/// Archive layout, one JSON object per line, tagged by "record":
///   header      {"format_version": 1, "records": N, "next_triple", "next_hypothesis", "next_verdict"}
///   taxonomy    {"name", "root", "edges"}
///   predicate   {"name", "domain", "taxonomy"?, "tau"}
///   source      {"id", "name", "category", "reliability"}
///   entity      {"id", "label"}
///   alias       {"from", "to"}
///   triple      {"id", "s", "p", "o", "certainty", "kind", "derivation", "provenance", "source"?, "credibility"?}
///   hypothesis  {"id", "theta", "verdict", "patterns"}
///   verdict     {"id", "hypothesis", "status", "theta", "bindings", ...}
///   composite   {"id", "subject", "members", "certainty"}
///   audit       {"seq", "at", "event", "target", "before", "after", "note"}
/// Records of a kind are ordered by id (audit by seq). "records" counts the
/// lines after the header, so a truncated file is detected.

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "ukg/codec.hpp"

namespace ukg {

inline constexpr int kFormatVersion = 1;

/// Throws integrity-violation on dangling references.
void check_integrity(const GraphState& state);

std::string dump_archive(const GraphState& state);
GraphState parse_archive(std::istream& in);

void save(const GraphState& state, const std::filesystem::path& path);
GraphState load(const std::filesystem::path& path);

std::vector<Statement> parse_mentions(std::istream& in);
/// Reads a JSON-lines mention file for a registered source.
std::vector<Statement> import_mentions(const std::filesystem::path& path, const GraphState& state,
                                       const SourceId& source);

/// A directory holding config.json and state.jsonl, guarded by an exclusive
/// advisory lock on a lock file for the lifetime of the object.
class StateDir {
 public:
  explicit StateDir(std::filesystem::path root, bool lock = true);
  ~StateDir();
  StateDir(const StateDir&) = delete;
  StateDir& operator=(const StateDir&) = delete;

  /// Creates the directory with its config and an initial archive.
  static void init(const std::filesystem::path& root, const json& config, const std::vector<Taxonomy>& taxonomies);

  bool exists() const;
  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path archive_path() const { return root_ / "state.jsonl"; }
  std::filesystem::path config_path() const { return root_ / "config.json"; }

  FusionConfig config() const;
  GraphState load() const;

  /// Saves `state`, refusing to rewrite audit history already on disk.
  void commit(const GraphState& state) const;

 private:
  std::filesystem::path root_;
  int lock_fd_ = -1;
};

}  // namespace ukg
