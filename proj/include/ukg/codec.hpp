#pragma once

/// \file codec.hpp
/// JSON shapes shared by the archive, the CLI's --json output and the HTTP API.

#include <json.hpp>

#include "ukg/pipeline.hpp"

namespace ukg {

using json = nlohmann::json;

json to_json(const Value& v);  // {"type": "year", "value": 1256}
Value value_from_json(const json& j);

json to_json(const UncertainTriple& t);
UncertainTriple triple_from_json(const json& j);

json to_json(const Source& s);
Source source_from_json(const json& j);

json to_json(const Predicate& p);
Predicate predicate_from_json(const json& j);

json to_json(const Taxonomy& t);  // {"name", "root", "edges": [[parent, child], ...]}
Taxonomy taxonomy_from_json(const json& j);

/// Pattern terms are written as in hypothesis files: "?x" is a variable,
/// anything else a constant typed by the predicate's codomain.
json to_json(const Hypothesis& h);
Hypothesis hypothesis_from_json(const json& j, const Schema& schema, double default_theta);

json to_json(const Binding& b);
json to_json(const Verdict& v);
Verdict verdict_from_json(const json& j);

json to_json(const AuditEntry& e);
AuditEntry audit_from_json(const json& j);

json to_json(const CompositeFactoid& c);
CompositeFactoid composite_from_json(const json& j);

json to_json(const ProvenanceNode& n);

json to_json(const FusionConfig& c);
/// Missing keys keep their defaults; unknown keys are rejected.
FusionConfig config_from_json(const json& j);

/// The "predicates" section of a config file, if any.
std::vector<Predicate> predicates_from_config(const json& j);

/// One mention-file line: {"s", "p", "o", "credibility", "s_label"?, "o_label"?}.
Statement statement_from_json(const json& j);

json to_json(const CaptureReport& r);
json to_json(const AssociateReport& r);
json to_json(const EstablishReport& r, const Graph& graph);
json to_json(const FeedbackReport& r);

/// Reads a whole file; io-error if it cannot be opened.
std::string read_file(const std::string& path);
/// parse-error with the offending location on malformed input.
json parse_json(const std::string& text, const std::string& what);

}  // namespace ukg
