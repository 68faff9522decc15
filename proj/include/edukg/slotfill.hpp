#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edukg/linker.hpp"

namespace edukg {

// Marks assignments whose value came from provider metadata, not page text.
inline constexpr std::size_t kProviderMetadataCluster = static_cast<std::size_t>(-1);

struct Provenance {
  std::size_t cluster_ref = 0;
  CharSpan char_span;
  MentionOrigin origin = MentionOrigin::Linked;
  double confidence = 0.0;
};

struct SlotAssignment {
  std::string course_id;
  SlotName slot = SlotName::Related;
  std::string entity_id;
  EntityType etype = EntityType::Topic;
  Provenance provenance;
};

struct CardinalityViolation {
  std::string course_id;
  SlotName slot = SlotName::School;
  bool below_min = false;  // otherwise above max
  std::size_t count = 0;
  unsigned bound = 0;
};

namespace slotfill {

// Segment-type to slot routing (the five classified types only).
std::optional<SlotName> slot_for_segment(SegmentType t);

// Routes every mention into a slot: the cluster's segment type picks the
// slot; Unknown clusters and type-invalid combinations land in Related.
// Duplicate (course, slot, entity) triples collapse onto the
// highest-confidence provenance.
std::vector<SlotAssignment> contextualize(const std::string& course_id,
                                          const std::vector<SegmentCluster>& clusters,
                                          const std::vector<Mention>& mentions,
                                          const SlotSchema& schema);

// Exactly one School assignment per course: provider metadata wins over
// in-text School mentions (highest confidence, then earliest span).
// nullopt = NoSchool; callers report it as a cardinality violation.
std::optional<SlotAssignment> fill_school(const std::string& course_id,
                                          const std::optional<std::string>& provider_school_id,
                                          const std::vector<Mention>& mentions);

// Advisory per-course cardinality check; Related is exempt and assignments
// are never dropped.
std::vector<CardinalityViolation> validate_cardinality(
    const std::vector<SlotAssignment>& assignments, const SlotSchema& schema);

}  // namespace slotfill
}  // namespace edukg
