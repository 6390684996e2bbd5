#pragma once

/// \file service.hpp
/// HTTP/JSON facade over the pipeline.
///
/// Every response is {"version": n, "data": ...} or {"version": n, "error":
/// {"code", "message"}}. Reads are served from an immutable snapshot; mutations
/// run one at a time and bump the version by exactly one. A mutation carrying
/// an If-Match header (or "expected_version" in its body) that differs from the
/// current version is rejected with 409.
///
///   GET  /sources                      POST /sources
///   POST /capture                      POST /associate        POST /establish
///   GET  /triples?kind=&subject=&limit=&offset=
///   GET  /triples/{id}                 GET  /triples/{id}/provenance
///   GET  /hypotheses                   POST /hypotheses       POST /hypotheses/{id}/test
///   GET  /verdicts/{id}                POST /verdicts/{id}/propagate
///   GET  /audit?since=

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "ukg/codec.hpp"

namespace httplib {
class Server;
}

namespace ukg {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
  std::optional<std::string> if_match;
};

struct ApiResponse {
  int status = 200;
  json body;
};

int http_status(ErrorCode code);

class ApiService {
 public:
  struct Snapshot {
    std::uint64_t version = 0;
    GraphState state;
  };

  /// Serves a state directory; every mutation is committed to disk.
  explicit ApiService(std::filesystem::path state_dir);
  /// Serves an in-memory state (nothing is persisted).
  ApiService(GraphState state, FusionConfig config);

  ApiResponse handle(const ApiRequest& request);

  /// Routes every GET and POST of `server` to handle().
  void bind(httplib::Server& server);

  std::shared_ptr<const Snapshot> snapshot() const;
  std::uint64_t version() const { return snapshot()->version; }

 private:
  ApiResponse read(const ApiRequest& request, const Snapshot& snap);
  ApiResponse mutate(const ApiRequest& request);

  std::optional<std::filesystem::path> dir_;
  FusionConfig config_;
  mutable std::mutex snapshot_mutex_;
  std::shared_ptr<const Snapshot> current_;
  std::mutex writer_mutex_;
};

}  // namespace ukg
