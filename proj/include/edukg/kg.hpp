#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edukg/slotfill.hpp"

namespace edukg {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline constexpr std::string_view kSkosBase = "http://www.w3.org/2004/02/skos/core#";

// Prefix bases for IRI minting and serialization. Configured once per run.
struct Namespace {
  std::string edu = "https://example.org/edu#";
  std::string nil = "https://example.org/nil#";
  std::string course = "https://example.org/course#";

  // Expands an entity id: registered prefixes (edu:, nil:, skos:) and
  // absolute IRIs pass through; bare local names live under the edu base.
  std::string expand_entity(const std::string& id) const;

  // Course IRIs mint under the page's origin (https://host#id) when a URL is
  // available, otherwise under the course base.
  std::string course_iri(const std::string& course_id, const std::string& url) const;

  std::string predicate_iri(SlotName slot) const;
};

struct StatementCounts {
  std::map<std::string, std::size_t> by_predicate;  // predicate local name
  std::size_t total = 0;
};

namespace kg {

// Duplicate-free triples for validated assignments. `course_iris` maps
// course_id -> subject IRI (see Namespace::course_iri).
std::set<Triple> to_triples(const std::vector<SlotAssignment>& assignments,
                            const Namespace& ns,
                            const std::map<std::string, std::string>& course_iris);

// One sorted statement per line; equal sets serialize byte-identically.
std::string serialize_ntriples(const std::set<Triple>& triples);

// Prefix header plus subject-grouped, comma-separated predicate-object lists.
std::string serialize_turtle(const std::set<Triple>& triples, const Namespace& ns);

std::set<Triple> parse_ntriples(std::string_view text);

// Parses the IRI-only Turtle subset this library emits (prefix declarations,
// prefixed names, ';' and ',' continuation). No literals.
std::set<Triple> parse_turtle(std::string_view text);

StatementCounts count_statements(const std::set<Triple>& triples, const Namespace& ns);

}  // namespace kg
}  // namespace edukg
