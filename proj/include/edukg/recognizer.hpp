#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "edukg/linker.hpp"

namespace edukg {

// Corpus-scoped registry of temporary identifiers for entities outside the
// ontology. Equal nil keys always map to the same id; ids never collide with
// ontology ids ("nil:" prefix).
class NilRegistry {
 public:
  std::string get_or_assign(const std::string& nil_key);

  // Union with another registry; the other registry's keys keep their id when
  // already known here and are re-issued otherwise.
  void merge(const NilRegistry& other);

  const std::map<std::string, std::string>& entries() const { return ids_; }

 private:
  std::map<std::string, std::string> ids_;
  std::size_t counter_ = 0;
};

// SegmentType -> default EntityType used to type baseline recognizer hits.
struct CueLexicon {
  std::map<SegmentType, EntityType> by_segment;
  static CueLexicon defaults();
};

namespace recognizer {

inline constexpr std::string_view kSilverHeader = "# edukg-silver v1";

// BIO tag helpers ("B-SKILL", "I-TOPIC", "O").
std::string bio_tag(char prefix, EntityType t);

// Projects each document's Linked mentions onto tokens and writes
// one-token-per-line (token TAB tag) blocks, one block per cluster,
// blank-line separated, with doc/cluster marker comments.
void export_silver(const std::vector<AnnotatedDocument>& corpus, std::ostream& out);
void export_silver_file(const std::vector<AnnotatedDocument>& corpus,
                        const std::filesystem::path& path);

// Candidate mentions for capitalized token runs (1-4 tokens) that do not
// overlap any Linked mention, typed from the cluster's segment type.
std::vector<Mention> recognize_baseline(const AnnotatedDocument& doc,
                                        std::size_t cluster_ref,
                                        const CueLexicon& cues);
std::vector<Mention> recognize_document(const AnnotatedDocument& doc, const CueLexicon& cues);

struct ImportStats {
  std::size_t repaired_tags = 0;  // stray I- treated as B-
};

// Reads a token-labeled dataset back into mentions (origin = Recognized),
// grouped by document. The file must tokenize identically to the corpus; the
// first mismatch aborts with its doc, cluster and token position.
std::map<std::string, std::vector<Mention>> import_external(
    std::istream& in, const std::vector<AnnotatedDocument>& corpus,
    ImportStats* stats = nullptr);
std::map<std::string, std::vector<Mention>> import_external_file(
    const std::filesystem::path& path, const std::vector<AnnotatedDocument>& corpus,
    ImportStats* stats = nullptr);

// Gives every Recognized mention without an entity id a temporary id; equal
// nil keys (normalization + variation-rule stripping) share one id.
std::vector<Mention> assign_nil_ids(std::vector<Mention> mentions, NilRegistry& registry,
                                    const VariationRules& rules);

}  // namespace recognizer
}  // namespace edukg
