#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "edukg/ontology.hpp"

namespace edukg {

enum class Partition { P1, P2 };
enum class Task { T1, T2, T3, T4, T5, T6 };
enum class Setting { Strict, Relaxed };
enum class EntityLevel { Recognition, Classification, Linking };

std::string to_string(Task t);
std::string to_string(Setting s);

struct GoldSegment {
  CharSpan span;
  SegmentType type = SegmentType::Unknown;
};

struct GoldMention {
  CharSpan span;
  std::string surface;
  EntityType etype = EntityType::Topic;
  std::string entity_id;  // ontology id or "nil:<class>"; empty = unlinked
};

struct GoldSlot {
  SlotName slot = SlotName::Related;
  std::string entity_id;
};

// One gold-standard document. P1 files carry segments only; P2 files carry
// all three layers. Spans are byte offsets into `text`.
struct GoldDocument {
  std::string doc_id;
  std::string provider_id;
  std::string url;
  std::string text;
  std::string html;  // optional; lets the harness run the pipeline end to end
  std::vector<GoldSegment> segments;
  std::vector<GoldMention> mentions;
  std::vector<GoldSlot> slots;
};

// System output in evaluation shape. `mention_index` ties a slot value to the
// mention it came from (-1 when there is no provenance).
struct DocPrediction {
  std::string doc_id;
  std::vector<GoldSegment> segments;
  std::vector<GoldMention> mentions;
  struct SlotValue {
    SlotName slot = SlotName::Related;
    std::string entity_id;
    int mention_index = -1;
  };
  std::vector<SlotValue> slots;
};

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  Counts& operator+=(const Counts& other);
  friend bool operator==(const Counts&, const Counts&) = default;
};

struct EvalReport {
  // Key: (task, setting). T1/T2 use a single Strict entry.
  std::map<std::pair<Task, Setting>, Counts> entries;

  void merge(const EvalReport& other);
  std::string to_json() const;
  std::string to_table() const;
};

namespace evalkit {

// Loads *.json gold files from a directory (or one file, array or object).
// Span or schema violations abort with the offending doc and span.
std::vector<GoldDocument> load_gold(const std::filesystem::path& path, Partition partition);

GoldDocument gold_document_from_json(std::string_view json_text, Partition partition,
                                     const std::string& origin);
std::string gold_document_to_json(const GoldDocument& doc);

// T1 (typed = false) / T2 (typed = true): token-level micro counts, pooled
// over the whole document.
Counts eval_segments(const std::vector<GoldSegment>& pred,
                     const std::vector<GoldSegment>& gold,
                     std::string_view text, bool typed);

// Greedy one-to-one span matching: pairs ordered by descending overlap, then
// earliest pred span, then earliest gold span.
std::vector<std::pair<std::size_t, std::size_t>> match_mentions(
    const std::vector<GoldMention>& pred, const std::vector<GoldMention>& gold,
    Setting setting);

// T3/T4/T5 over one document.
Counts eval_entities(const std::vector<GoldMention>& pred,
                     const std::vector<GoldMention>& gold,
                     EntityLevel level, Setting setting);

// T6 over one document: set comparison of (slot, value); the course is the
// document itself. NIL-valued predictions match through the mention-level
// NIL class alignment of the same setting.
Counts eval_slots(const DocPrediction& pred, const GoldDocument& gold, Setting setting);

// Deterministic seeded shuffle into k near-equal test folds; every document
// lands in exactly one test fold.
struct Fold {
  std::vector<std::string> train;
  std::vector<std::string> test;
};
std::vector<Fold> kfold(std::vector<std::string> doc_ids, std::size_t k, std::uint64_t seed);

// Cohen's kappa over per-token type labels plus pairwise F1 (A as gold, B as
// prediction, strict span+type matching).
struct Agreement {
  double kappa = 0.0;
  double pairwise_f1 = 0.0;
};
Agreement agreement(const std::vector<GoldMention>& ann_a,
                    const std::vector<GoldMention>& ann_b,
                    std::string_view text);

// Full-corpus micro evaluation: documents pair by doc_id, missing predictions
// count as empty.
EvalReport evaluate_corpus(const std::vector<DocPrediction>& predictions,
                           const std::vector<GoldDocument>& gold,
                           const std::vector<Task>& tasks);

}  // namespace evalkit
}  // namespace edukg
