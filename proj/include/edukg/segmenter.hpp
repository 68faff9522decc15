#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edukg/text.hpp"

namespace edukg {

// A course page as handed to the pipeline. `id` doubles as the course
// identifier, `provider_id` keys the provider metadata map.
struct HtmlDocument {
  std::string id;
  std::string provider_id;
  std::string url;
  std::string html;  // UTF-8 (run html::to_utf8 on raw bytes first)
};

enum class SegmentType {
  TargetGroup,
  Prerequisite,
  LearningObjective,
  CourseContent,
  CertificatesDegree,
  Unknown,
};

std::string to_string(SegmentType t);
std::optional<SegmentType> segment_type_from_string(std::string_view s);

// The five classified types, in tie-break order.
inline constexpr SegmentType kClassifiedSegmentTypes[] = {
    SegmentType::TargetGroup, SegmentType::Prerequisite,
    SegmentType::LearningObjective, SegmentType::CourseContent,
    SegmentType::CertificatesDegree};

struct TextSegment {
  std::string text;     // equals normalized_text.substr(span.start, ...)
  CharSpan char_span;   // byte span into the normalized document text
  std::size_t order = 0;
  bool is_title = false;
  std::string source_tag;  // element that delimited the segment
};

struct SegmentCluster {
  std::optional<TextSegment> title;
  std::vector<TextSegment> body;
  SegmentType seg_type = SegmentType::Unknown;
  CharSpan char_span;  // union span of title and body

  // Cluster text is the slice of the normalized document text at char_span;
  // mentions carry spans relative to the document text, so no re-joining.
};

struct ExtractionResult {
  std::string normalized_text;
  std::vector<TextSegment> segments;
};

namespace segmenter {

// Renders HTML to block-structured text and splits it at every separator
// element in M = {div, p, li, td, th, dt, dd, summary, legend, h1..h6} that
// encloses text and contains no other element of M. Heading-delimited
// segments come back with is_title set.
ExtractionResult extract_text(const HtmlDocument& doc);

// Fallback title detection: marks segments of at most three words whose
// normalized text contains a title term (as a contiguous token sequence).
// Heading titles stay titles.
std::vector<TextSegment> detect_titles(std::vector<TextSegment> segments,
                                       const std::vector<std::string>& title_terms);

// Each title opens a cluster that absorbs following non-title segments.
// Leading non-title segments form one title-less Unknown cluster.
std::vector<SegmentCluster> build_clusters(const std::vector<TextSegment>& segments);

// Maps a normalized term sequence to the segment type it signals.
using TermIndex = std::map<std::string, SegmentType>;

// Returns the type of the longest term sequence contained in the normalized
// title; ties on token length break by enum order. Unknown when the cluster
// has no title or nothing matches.
SegmentType classify_cluster(const SegmentCluster& cluster, const TermIndex& term_index);

// Convenience: extract, detect titles, cluster, classify.
std::vector<SegmentCluster> segment_document(const HtmlDocument& doc,
                                             const std::vector<std::string>& title_terms,
                                             const TermIndex& term_index,
                                             std::string* normalized_text = nullptr);

// Segmentation for already-extracted text: every non-empty line is a segment
// (offsets into `text` unchanged), titles come from the length/lexicon
// heuristic alone. Used when a gold corpus carries no HTML.
std::vector<SegmentCluster> segment_plain_text(std::string_view text,
                                               const std::vector<std::string>& title_terms,
                                               const TermIndex& term_index);

}  // namespace segmenter
}  // namespace edukg
