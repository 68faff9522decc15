#include "edukg/slotfill.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace edukg::slotfill {

std::optional<SlotName> slot_for_segment(SegmentType t) {
  switch (t) {
    case SegmentType::TargetGroup: return SlotName::TargetGroup;
    case SegmentType::Prerequisite: return SlotName::Prerequisite;
    case SegmentType::LearningObjective: return SlotName::LearningObjective;
    case SegmentType::CourseContent: return SlotName::CourseContent;
    case SegmentType::CertificatesDegree: return SlotName::Certificates;
    case SegmentType::Unknown: return std::nullopt;
  }
  return std::nullopt;
}

std::vector<SlotAssignment> contextualize(const std::string& course_id,
                                          const std::vector<SegmentCluster>& clusters,
                                          const std::vector<Mention>& mentions,
                                          const SlotSchema& schema) {
  // Keyed dedup: (slot, entity) -> index of the kept assignment.
  std::vector<SlotAssignment> out;
  std::map<std::pair<SlotName, std::string>, std::size_t> seen;

  for (const auto& m : mentions) {
    SlotName slot = SlotName::Related;
    if (m.cluster_ref < clusters.size()) {
      if (auto mapped = slot_for_segment(clusters[m.cluster_ref].seg_type)) {
        if (schema.allows(*mapped, m.etype)) slot = *mapped;
      }
    }
    SlotAssignment a;
    a.course_id = course_id;
    a.slot = slot;
    a.entity_id = m.entity_id;
    a.etype = m.etype;
    a.provenance = {m.cluster_ref, m.char_span, m.origin, m.confidence};

    auto key = std::make_pair(slot, m.entity_id);
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, out.size());
      out.push_back(std::move(a));
    } else if (a.provenance.confidence > out[it->second].provenance.confidence) {
      out[it->second] = std::move(a);
    }
  }
  return out;
}

std::optional<SlotAssignment> fill_school(const std::string& course_id,
                                          const std::optional<std::string>& provider_school_id,
                                          const std::vector<Mention>& mentions) {
  SlotAssignment a;
  a.course_id = course_id;
  a.slot = SlotName::School;
  a.etype = EntityType::School;

  if (provider_school_id.has_value() && !provider_school_id->empty()) {
    a.entity_id = *provider_school_id;
    a.provenance = {kProviderMetadataCluster, {0, 0}, MentionOrigin::Linked, 1.0};
    return a;
  }
  const Mention* best = nullptr;
  for (const auto& m : mentions) {
    if (m.etype != EntityType::School || m.entity_id.empty()) continue;
    if (best == nullptr || m.confidence > best->confidence ||
        (m.confidence == best->confidence && m.char_span < best->char_span)) {
      best = &m;
    }
  }
  if (best == nullptr) return std::nullopt;
  a.entity_id = best->entity_id;
  a.provenance = {best->cluster_ref, best->char_span, best->origin, best->confidence};
  return a;
}

std::vector<CardinalityViolation> validate_cardinality(
    const std::vector<SlotAssignment>& assignments, const SlotSchema& schema) {
  // Distinct entity ids per (course, slot).
  std::map<std::string, std::map<SlotName, std::set<std::string>>> counts;
  std::set<std::string> courses;
  for (const auto& a : assignments) {
    courses.insert(a.course_id);
    if (a.slot == SlotName::Related) continue;
    counts[a.course_id][a.slot].insert(a.entity_id);
  }
  std::vector<CardinalityViolation> violations;
  for (const auto& course : courses) {
    for (const auto& [slot, entry] : schema.rows) {
      std::size_t n = 0;
      auto cit = counts.find(course);
      if (cit != counts.end()) {
        auto sit = cit->second.find(slot);
        if (sit != cit->second.end()) n = sit->second.size();
      }
      if (n < entry.min_card) {
        violations.push_back({course, slot, true, n, entry.min_card});
      } else if (entry.max_card.has_value() && n > *entry.max_card) {
        violations.push_back({course, slot, false, n, *entry.max_card});
      }
    }
  }
  return violations;
}

}  // namespace edukg::slotfill
