#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "edukg/ontology.hpp"

namespace edukg {

enum class MentionOrigin { Linked, Recognized };

std::string to_string(MentionOrigin o);

// A located entity occurrence. Spans index the normalized document text, so
// they always fall inside the owning cluster's char_span.
struct Mention {
  CharSpan char_span;
  std::string surface;
  EntityType etype = EntityType::Topic;
  std::string entity_id;  // ontology id, "nil:N", or empty before NIL assignment
  MentionOrigin origin = MentionOrigin::Linked;
  double confidence = 0.0;
  std::size_t cluster_ref = 0;
};

// A document after segmentation and entity extraction.
struct AnnotatedDocument {
  std::string doc_id;
  std::string provider_id;
  std::string url;
  std::string text;  // normalized text from extract_text
  std::vector<SegmentCluster> clusters;
  std::vector<Mention> mentions;  // document order
};

// One matcher hit: a span whose normalized form is a profile key, with every
// candidate entity. Context-only forms come back flagged; they steer
// disambiguation but never turn into mentions.
struct CandidateSpan {
  CharSpan char_span;
  std::string surface;
  std::string normalized;
  std::vector<std::string> entity_ids;
  std::vector<std::string> context_for;
  bool context_only = false;
  std::size_t cluster_ref = 0;
};

struct LinkerWeights {
  double cluster_type = 1.0;     // w1: same-type unambiguous co-occurrences
  double cluster_context = 0.5;  // w2: context terms present in the cluster
  double document = 0.25;        // w3: both counts at document level
};

namespace linker {

// Longest-match, non-overlapping scan over token boundaries. Spans are
// shifted by `offset` (pass the cluster's start when matching a slice of the
// document text).
std::vector<CandidateSpan> match_candidates(std::string_view text,
                                            const ElProfile& profile,
                                            std::size_t offset = 0,
                                            std::size_t cluster_ref = 0);

// Resolves one cluster's candidates. `doc_candidates` holds every candidate
// of the document (including this cluster's) and supplies the w3 evidence.
std::vector<Mention> disambiguate(const std::vector<CandidateSpan>& cluster_candidates,
                                  const std::vector<CandidateSpan>& doc_candidates,
                                  const ElProfile& profile,
                                  const LinkerWeights& weights = {});

// Runs matching and disambiguation over every cluster of a segmented
// document; returns mentions in document order.
std::vector<Mention> link_document(std::string_view text,
                                   const std::vector<SegmentCluster>& clusters,
                                   const ElProfile& profile,
                                   const LinkerWeights& weights = {});

}  // namespace linker
}  // namespace edukg
