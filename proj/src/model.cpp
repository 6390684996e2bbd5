#include "ukg/model.hpp"

#include <cctype>
#include <cmath>

namespace ukg {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::usage: return "usage";
    case ErrorCode::domain_mismatch: return "domain-mismatch";
    case ErrorCode::invariant_violation: return "invariant-violation";
    case ErrorCode::unknown_id: return "unknown-id";
    case ErrorCode::unknown_node: return "unknown-node";
    case ErrorCode::unknown_parent: return "unknown-parent";
    case ErrorCode::unknown_source: return "unknown-source";
    case ErrorCode::unknown_predicate: return "unknown-predicate";
    case ErrorCode::duplicate: return "duplicate";
    case ErrorCode::second_root: return "second-root";
    case ErrorCode::invalid_taxonomy: return "invalid-taxonomy";
    case ErrorCode::not_an_ancestor: return "not-an-ancestor";
    case ErrorCode::credibility_out_of_range: return "credibility-out-of-range";
    case ErrorCode::parse_error: return "parse-error";
    case ErrorCode::version_mismatch: return "version-mismatch";
    case ErrorCode::integrity_violation: return "integrity-violation";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::non_termination: return "non-termination";
    case ErrorCode::verdict_undetermined: return "verdict-undetermined";
    case ErrorCode::already_applied: return "already-applied";
    case ErrorCode::version_conflict: return "version-conflict";
  }
  return "unknown";
}

bool IdLess::operator()(const std::string& a, const std::string& b) const {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const bool da = std::isdigit(static_cast<unsigned char>(a[i])) != 0;
    const bool db = std::isdigit(static_cast<unsigned char>(b[j])) != 0;
    if (da && db) {
      std::size_t ei = i;
      std::size_t ej = j;
      while (ei < a.size() && std::isdigit(static_cast<unsigned char>(a[ei]))) ++ei;
      while (ej < b.size() && std::isdigit(static_cast<unsigned char>(b[ej]))) ++ej;
      // strip leading zeros, then longer run is larger
      std::size_t si = i;
      std::size_t sj = j;
      while (si + 1 < ei && a[si] == '0') ++si;
      while (sj + 1 < ej && b[sj] == '0') ++sj;
      if (ei - si != ej - sj) return ei - si < ej - sj;
      const int cmp = a.compare(si, ei - si, b, sj, ej - sj);
      if (cmp != 0) return cmp < 0;
      if (ei - i != ej - j) return ei - i < ej - j;
      i = ei;
      j = ej;
      continue;
    }
    if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
    ++i;
    ++j;
  }
  return a.size() - i < b.size() - j;
}

Certainty::Certainty(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::invariant_violation,
                "certainty " + std::to_string(value) + " outside [0,1]");
  }
}

std::string Value::to_string() const {
  switch (kind_) {
    case ValueKind::entity:
    case ValueKind::node:
    case ValueKind::text:
      return text_;
    case ValueKind::integer:
    case ValueKind::year:
      return std::to_string(number_);
  }
  return text_;
}

std::string_view to_string(DatumKind kind) {
  switch (kind) {
    case DatumKind::mention: return "mention";
    case DatumKind::factoid: return "factoid";
    case DatumKind::fact: return "fact";
  }
  return "mention";
}

std::string_view to_string(Derivation d) {
  switch (d) {
    case Derivation::captured: return "captured";
    case Derivation::consistent: return "consistent";
    case Derivation::inconsistent: return "inconsistent";
    case Derivation::promoted: return "promoted";
  }
  return "captured";
}

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::entity: return "entity";
    case ValueKind::node: return "node";
    case ValueKind::text: return "text";
    case ValueKind::integer: return "integer";
    case ValueKind::year: return "year";
  }
  return "text";
}

std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::taxonomy: return "taxonomy";
    case DomainKind::entity: return "entity";
    case DomainKind::text: return "text";
    case DomainKind::integer: return "integer";
    case DomainKind::year: return "year";
  }
  return "entity";
}

std::string_view to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::untested: return "untested";
    case VerdictStatus::confirmed: return "confirmed";
    case VerdictStatus::infirmed: return "infirmed";
    case VerdictStatus::undetermined: return "undetermined";
  }
  return "untested";
}

namespace {

[[noreturn]] void bad_enum(std::string_view what, std::string_view s) {
  throw Error(ErrorCode::parse_error, "unknown " + std::string(what) + " '" + std::string(s) + "'");
}

}  // namespace

DatumKind parse_datum_kind(std::string_view s) {
  if (s == "mention") return DatumKind::mention;
  if (s == "factoid") return DatumKind::factoid;
  if (s == "fact") return DatumKind::fact;
  bad_enum("datum kind", s);
}

Derivation parse_derivation(std::string_view s) {
  if (s == "captured") return Derivation::captured;
  if (s == "consistent") return Derivation::consistent;
  if (s == "inconsistent") return Derivation::inconsistent;
  if (s == "promoted") return Derivation::promoted;
  bad_enum("derivation", s);
}

ValueKind parse_value_kind(std::string_view s) {
  if (s == "entity") return ValueKind::entity;
  if (s == "node") return ValueKind::node;
  if (s == "text") return ValueKind::text;
  if (s == "integer") return ValueKind::integer;
  if (s == "year") return ValueKind::year;
  bad_enum("value kind", s);
}

DomainKind parse_domain_kind(std::string_view s) {
  if (s == "taxonomy") return DomainKind::taxonomy;
  if (s == "entity") return DomainKind::entity;
  if (s == "text") return DomainKind::text;
  if (s == "integer") return DomainKind::integer;
  if (s == "year") return DomainKind::year;
  bad_enum("domain", s);
}

VerdictStatus parse_verdict_status(std::string_view s) {
  if (s == "untested") return VerdictStatus::untested;
  if (s == "confirmed") return VerdictStatus::confirmed;
  if (s == "infirmed") return VerdictStatus::infirmed;
  if (s == "undetermined") return VerdictStatus::undetermined;
  bad_enum("verdict status", s);
}

}  // namespace ukg
