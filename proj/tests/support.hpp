#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "edukg/ontology.hpp"

namespace testsupport {

inline std::filesystem::path source_dir() { return EDUKG_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }

inline edukg::VariationRules shipped_rules() {
  return edukg::VariationRules::load(data_dir() / "variation_rules.tsv");
}

// Small in-memory ontology shared by linker/recognizer/pipeline tests.
inline edukg::OntologyStore tiny_store() {
  using namespace edukg;
  OntologyStore store;
  auto add = [&](std::string id, EntityType t, std::string canonical,
                 std::vector<std::string> surfaces = {},
                 std::vector<std::string> context = {}) {
    EntityRecord rec;
    rec.id = std::move(id);
    rec.etype = t;
    rec.canonical_name = canonical;
    rec.surface_forms = std::move(surfaces);
    rec.surface_forms.insert(rec.surface_forms.begin(), canonical);
    rec.context_terms = std::move(context);
    store.by_id.emplace(rec.id, store.records.size());
    store.records.push_back(std::move(rec));
  };
  add("edu:prog", EntityType::Skill, "Programmierung", {"Programmieren"},
      {"Programmiersprache", "Code"});
  add("edu:python", EntityType::Skill, "Python", {}, {"Programmiersprache"});
  add("edu:java_skill", EntityType::Skill, "Java", {"Java SE"},
      {"Programmiersprache", "Objektorientierung"});
  add("edu:java_island", EntityType::Topic, "Java (Insel)", {"Java"},
      {"Indonesien", "Insel"});
  add("edu:matura", EntityType::Education, "Matura");
  add("edu:sae", EntityType::School, "SAE Institute", {"SAE"});
  add("edu:design", EntityType::Topic, "Design");
  add("edu:podcasting", EntityType::Topic, "Podcasting");
  store.title_terms = {
      {"Lehrinhalte", SegmentType::CourseContent},
      {"Inhalt", SegmentType::CourseContent},
      {"Voraussetzungen", SegmentType::Prerequisite},
      {"Zielgruppe", SegmentType::TargetGroup},
      {"Lernziele", SegmentType::LearningObjective},
      {"Abschluss", SegmentType::CertificatesDegree},
  };
  store.source_hash = "test";
  return store;
}

inline edukg::ElProfile tiny_profile() {
  return edukg::ontology::build_profile(tiny_store());
}

}  // namespace testsupport
