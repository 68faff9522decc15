#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "edukg/segmenter.hpp"

namespace edukg {

// The eight annotation classes.
enum class EntityType {
  Skill,
  Occupation,
  Topic,
  Position,
  School,
  Industry,
  Education,
  Degree,
};

inline constexpr EntityType kEntityTypes[] = {
    EntityType::Skill,    EntityType::Occupation, EntityType::Topic,
    EntityType::Position, EntityType::School,     EntityType::Industry,
    EntityType::Education, EntityType::Degree};

std::string to_string(EntityType t);
std::optional<EntityType> entity_type_from_string(std::string_view s);

struct EntityRecord {
  std::string id;              // IRI-safe, e.g. "edu:prog"
  EntityType etype = EntityType::Topic;
  std::string canonical_name;  // always also a surface form
  std::vector<std::string> surface_forms;
  std::vector<std::string> context_terms;
};

enum class AmbiguityClass { Unambiguous, Ambiguous, ContextOnly };

std::string to_string(AmbiguityClass a);

// Slot identities: the six schema rows plus the fallback bucket for values
// whose slot could not be resolved.
enum class SlotName {
  School,
  TargetGroup,
  Prerequisite,
  LearningObjective,
  CourseContent,
  Certificates,
  Related,
};

std::string to_string(SlotName s);
std::optional<SlotName> slot_name_from_string(std::string_view s);

struct SlotSchema {
  struct Entry {
    std::set<EntityType> allowed_types;
    unsigned min_card = 0;
    std::optional<unsigned> max_card;  // nullopt = unbounded
  };
  // Exactly the six schema rows; Related is exempt from the schema.
  std::map<SlotName, Entry> rows;

  bool allows(SlotName slot, EntityType t) const;
};

// Surface-form variation rules (plural/possessive suffixing, abbreviations).
// Loaded from a data file so the morphology can be revised without a rebuild.
class VariationRules {
 public:
  struct SuffixRule {
    std::string kind;     // "plural" or "possessive"
    std::string pattern;  // "*", "*sfx" (ends with), "!sfx" (not ends with),
                          // "C" (final consonant), "V" (final vowel)
    unsigned drop = 0;    // chars removed from the word end before appending
    std::string append;
  };
  struct AbbrevRule {
    bool enabled = false;
    std::size_t min_words = 2;
    bool plain = true;    // "HFM"
    bool dotted = true;   // "H.F.M."
    bool require_capitalized = false;
  };

  static VariationRules load(const std::filesystem::path& file);
  static VariationRules parse(std::string_view content, const std::string& origin);

  // Variants generated for one surface form (the inputs are not included).
  std::vector<std::string> expand(const std::string& form) const;

  // Canonical key for NIL coreference: normalize, then reverse the first
  // applicable suffix rule so plural/possessive variants collapse.
  std::string nil_key(std::string_view surface) const;

  const std::vector<SuffixRule>& suffix_rules() const { return suffix_rules_; }
  const AbbrevRule& abbrev_rule() const { return abbrev_; }

  std::string serialize() const;  // round-trips through parse()

 private:
  std::vector<SuffixRule> suffix_rules_;
  AbbrevRule abbrev_;
};

// In-memory ontology: entity records, title-term sequences for the
// segmenter, and slot-schema extensions.
struct OntologyStore {
  std::vector<EntityRecord> records;
  std::map<std::string, std::size_t> by_id;
  std::vector<std::pair<std::string, SegmentType>> title_terms;  // raw term text
  std::map<SlotName, std::set<EntityType>> extra_slot_types;
  VariationRules variation_rules;
  std::string source_hash;  // content hash over all loaded files

  std::size_t size() const { return records.size(); }

  // Title lexicon exported to detect_titles / classify_cluster.
  std::vector<std::string> title_term_list() const;
  segmenter::TermIndex term_index() const;
};

// Self-contained matcher state compiled from the ontology. Serialization is
// deterministic: equal profiles produce byte-identical JSON.
struct ElProfile {
  struct EntityInfo {
    EntityType etype = EntityType::Topic;
    std::string canonical_name;
    std::vector<std::string> context_keys;  // normalized, sorted
  };
  struct FormEntry {
    std::vector<std::string> entity_ids;   // owners, sorted
    std::vector<std::string> context_for;  // ids this form is context of, sorted
  };

  std::string version_hash;
  std::map<std::string, EntityInfo> entities;
  std::map<std::string, FormEntry> forms;  // key: normalized surface form
  std::size_t max_form_tokens = 0;
  VariationRules rules;

  AmbiguityClass ambiguity(const std::string& normalized_form) const;

  std::string to_json() const;
  static ElProfile from_json(std::string_view json_text);
  void save(const std::filesystem::path& file) const;
  static ElProfile load(const std::filesystem::path& file);

  bool operator==(const ElProfile& other) const {
    return to_json() == other.to_json();
  }
};

namespace ontology {

// Loads ontology TSV/JSON files plus the title lexicon and variation-rule
// files. Duplicate ids and schema violations abort with file/line context.
OntologyStore load_ontology(const std::vector<std::filesystem::path>& paths);

// All surface forms of a record: the originals followed by generated
// plural/possessive/abbreviation variants, deduplicated, order-stable.
std::vector<std::string> expand_surface_forms(const EntityRecord& record,
                                              const VariationRules& rules);

// The fixed six-row schema, widened by any store extensions.
SlotSchema slot_schema(const OntologyStore& store);
SlotSchema default_slot_schema();

ElProfile build_profile(const OntologyStore& store);

}  // namespace ontology
}  // namespace edukg
