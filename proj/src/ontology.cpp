#include "edukg/ontology.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace edukg {

using nlohmann::json;

std::string to_string(EntityType t) {
  switch (t) {
    case EntityType::Skill: return "skill";
    case EntityType::Occupation: return "occupation";
    case EntityType::Topic: return "topic";
    case EntityType::Position: return "position";
    case EntityType::School: return "school";
    case EntityType::Industry: return "industry";
    case EntityType::Education: return "education";
    case EntityType::Degree: return "degree";
  }
  return "topic";
}

std::optional<EntityType> entity_type_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "skill") return EntityType::Skill;
  if (lower == "occupation") return EntityType::Occupation;
  if (lower == "topic") return EntityType::Topic;
  if (lower == "position") return EntityType::Position;
  if (lower == "school") return EntityType::School;
  if (lower == "industry") return EntityType::Industry;
  if (lower == "education") return EntityType::Education;
  if (lower == "degree") return EntityType::Degree;
  return std::nullopt;
}

std::string to_string(AmbiguityClass a) {
  switch (a) {
    case AmbiguityClass::Unambiguous: return "unambiguous";
    case AmbiguityClass::Ambiguous: return "ambiguous";
    case AmbiguityClass::ContextOnly: return "context_only";
  }
  return "unambiguous";
}

std::string to_string(SlotName s) {
  switch (s) {
    case SlotName::School: return "school";
    case SlotName::TargetGroup: return "target_group";
    case SlotName::Prerequisite: return "prerequisite";
    case SlotName::LearningObjective: return "learning_objective";
    case SlotName::CourseContent: return "course_content";
    case SlotName::Certificates: return "certificates";
    case SlotName::Related: return "related";
  }
  return "related";
}

std::optional<SlotName> slot_name_from_string(std::string_view s) {
  if (s == "school") return SlotName::School;
  if (s == "target_group") return SlotName::TargetGroup;
  if (s == "prerequisite") return SlotName::Prerequisite;
  if (s == "learning_objective") return SlotName::LearningObjective;
  if (s == "course_content") return SlotName::CourseContent;
  if (s == "certificates") return SlotName::Certificates;
  if (s == "related") return SlotName::Related;
  return std::nullopt;
}

bool SlotSchema::allows(SlotName slot, EntityType t) const {
  auto it = rows.find(slot);
  return it != rows.end() && it->second.allowed_types.count(t) > 0;
}

// ---------------------------------------------------------------------------
// Variation rules
// ---------------------------------------------------------------------------

namespace {

bool ends_with(std::string_view s, std::string_view sfx) {
  return s.size() >= sfx.size() &&
         s.compare(s.size() - sfx.size(), sfx.size(), sfx) == 0;
}

bool suffix_pattern_matches(std::string_view folded_word, const std::string& pattern) {
  if (folded_word.empty() || pattern.empty()) return false;
  if (pattern == "*") return true;
  if (pattern == "C" || pattern == "V") {
    char c = folded_word.back();
    bool letter = c >= 'a' && c <= 'z';
    bool vowel = c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
    return pattern == "C" ? (letter && !vowel) : vowel;
  }
  if (pattern[0] == '*') return ends_with(folded_word, std::string_view(pattern).substr(1));
  if (pattern[0] == '!') return !ends_with(folded_word, std::string_view(pattern).substr(1));
  return false;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return fields;
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t at = s.find(sep, start);
    if (at == std::string_view::npos) {
      if (start < s.size()) parts.emplace_back(s.substr(start));
      break;
    }
    if (at > start) parts.emplace_back(s.substr(start, at - start));
    start = at + 1;
  }
  return parts;
}

std::string last_word(std::string_view form) {
  std::size_t end = form.size();
  while (end > 0 && std::isspace(static_cast<unsigned char>(form[end - 1]))) --end;
  std::size_t start = end;
  while (start > 0 && !std::isspace(static_cast<unsigned char>(form[start - 1]))) --start;
  return std::string(form.substr(start, end - start));
}

}  // namespace

VariationRules VariationRules::parse(std::string_view content, const std::string& origin) {
  VariationRules rules;
  std::size_t line_no = 0;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split_fields(line);
    const std::string& kind = fields[0];
    auto fail = [&](const std::string& what) {
      throw std::runtime_error(origin + ":" + std::to_string(line_no) + ": " + what);
    };
    if (kind == "plural" || kind == "possessive") {
      if (fields.size() != 3) fail("expected: " + kind + "\\tPATTERN\\tACTION");
      SuffixRule rule;
      rule.kind = kind;
      rule.pattern = fields[1];
      const std::string& action = fields[2];
      std::size_t plus = action.find('+');
      if (action.empty() || plus == std::string::npos) fail("action must contain '+'");
      if (plus > 0) {
        if (action[0] != '-') fail("action must be +SFX or -N+SFX");
        rule.drop = static_cast<unsigned>(std::stoul(action.substr(1, plus - 1)));
      }
      rule.append = action.substr(plus + 1);
      rules.suffix_rules_.push_back(std::move(rule));
    } else if (kind == "abbrev") {
      rules.abbrev_.enabled = true;
      for (std::size_t i = 1; i < fields.size(); ++i) {
        std::size_t eq = fields[i].find('=');
        std::string key = fields[i].substr(0, eq);
        std::string value = eq == std::string::npos ? "" : fields[i].substr(eq + 1);
        if (key == "min_words") {
          rules.abbrev_.min_words = std::stoul(value);
        } else if (key == "styles") {
          rules.abbrev_.plain = value.find("plain") != std::string::npos;
          rules.abbrev_.dotted = value.find("dotted") != std::string::npos;
        } else if (key == "capitalized_only") {
          rules.abbrev_.require_capitalized = value == "true" || value == "1";
        } else {
          fail("unknown abbrev option '" + key + "'");
        }
      }
    } else {
      fail("unknown rule kind '" + kind + "'");
    }
  }
  return rules;
}

VariationRules VariationRules::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open rule file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.string());
}

std::string VariationRules::serialize() const {
  std::ostringstream out;
  for (const auto& rule : suffix_rules_) {
    out << rule.kind << '\t' << rule.pattern << '\t';
    if (rule.drop > 0) out << '-' << rule.drop;
    out << '+' << rule.append << '\n';
  }
  if (abbrev_.enabled) {
    out << "abbrev\tmin_words=" << abbrev_.min_words << "\tstyles=";
    if (abbrev_.plain) out << "plain";
    if (abbrev_.plain && abbrev_.dotted) out << ",";
    if (abbrev_.dotted) out << "dotted";
    if (abbrev_.require_capitalized) out << "\tcapitalized_only=true";
    out << '\n';
  }
  return out.str();
}

std::vector<std::string> VariationRules::expand(const std::string& form) const {
  std::vector<std::string> out;
  std::string word = last_word(form);
  std::string folded = text::fold(word);
  for (const auto& rule : suffix_rules_) {
    if (!suffix_pattern_matches(folded, rule.pattern)) continue;
    if (rule.drop >= word.size()) continue;
    bool ascii_tail = true;
    for (std::size_t i = form.size() - rule.drop; i < form.size(); ++i) {
      ascii_tail &= static_cast<unsigned char>(form[i]) < 0x80;
    }
    if (!ascii_tail) continue;
    std::string variant = form.substr(0, form.size() - rule.drop) + rule.append;
    out.push_back(std::move(variant));
  }

  if (abbrev_.enabled) {
    std::vector<std::string> parts;
    {
      std::istringstream ws{form};
      std::string w;
      while (ws >> w) parts.push_back(w);
    }
    if (parts.size() >= abbrev_.min_words) {
      std::string plain, dotted;
      bool ok = true;
      for (const auto& part : parts) {
        std::size_t pos = 0;
        char32_t first = text::decode_utf8(part, pos);
        std::size_t cps = 1;
        std::size_t p = pos;
        while (p < part.size()) {
          text::decode_utf8(part, p);
          ++cps;
        }
        if (!text::is_letter_cp(first) || cps < 2 ||
            (abbrev_.require_capitalized && !text::is_upper_cp(first))) {
          ok = false;
          break;
        }
        char32_t upper = first;
        if (first >= 'a' && first <= 'z') upper = first - 'a' + 'A';
        text::append_utf8(plain, upper);
        text::append_utf8(dotted, upper);
        dotted.push_back('.');
      }
      if (ok) {
        if (abbrev_.plain) out.push_back(plain);
        if (abbrev_.dotted) out.push_back(dotted);
      }
    }
  }
  return out;
}

std::string VariationRules::nil_key(std::string_view surface) const {
  std::string n = text::normalize_match(surface);
  for (const auto& rule : suffix_rules_) {
    // Suffix as it appears in normalized space ("'s" becomes " s").
    std::string marked = text::normalize_match("x" + rule.append);
    if (marked.size() < 2 || marked[0] != 'x') continue;
    std::string sfx = marked.substr(1);
    if (!ends_with(n, sfx) || n.size() <= sfx.size()) continue;
    std::string base = n.substr(0, n.size() - sfx.size());
    if (rule.drop > 0) {
      // Restore the dropped tail from a literal '*sfx' pattern.
      if (rule.pattern.size() > rule.drop && rule.pattern[0] == '*') {
        base += rule.pattern.substr(rule.pattern.size() - rule.drop);
      } else {
        continue;
      }
    }
    if (base.empty() || base.back() == ' ') continue;
    std::string base_word = base.substr(base.find_last_of(' ') + 1);
    if (!suffix_pattern_matches(base_word, rule.pattern)) continue;
    return base;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Ontology loading
// ---------------------------------------------------------------------------

std::vector<std::string> OntologyStore::title_term_list() const {
  std::vector<std::string> out;
  out.reserve(title_terms.size());
  for (const auto& [term, type] : title_terms) out.push_back(term);
  return out;
}

segmenter::TermIndex OntologyStore::term_index() const {
  segmenter::TermIndex index;
  for (const auto& [term, type] : title_terms) {
    std::string key = text::normalize_match(term);
    if (key.empty()) continue;
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(std::move(key), type);
    } else if (static_cast<int>(type) < static_cast<int>(it->second)) {
      it->second = type;  // duplicate terms keep the enum-order winner
    }
  }
  return index;
}

namespace ontology {

namespace {

void add_record(OntologyStore& store, EntityRecord record, const std::string& where) {
  if (record.id.empty()) throw std::runtime_error(where + ": empty entity id");
  if (record.canonical_name.empty()) {
    throw std::runtime_error(where + ": empty canonical name for id '" + record.id + "'");
  }
  if (store.by_id.count(record.id) > 0) {
    throw std::runtime_error(where + ": duplicate entity id '" + record.id + "'");
  }
  // Canonical name is always also a surface form.
  if (std::find(record.surface_forms.begin(), record.surface_forms.end(),
                record.canonical_name) == record.surface_forms.end()) {
    record.surface_forms.insert(record.surface_forms.begin(), record.canonical_name);
  }
  store.by_id.emplace(record.id, store.records.size());
  store.records.push_back(std::move(record));
}

void load_tsv(OntologyStore& store, const std::string& content, const std::string& origin) {
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  std::string rules_text;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    auto fields = split_fields(line);

    if (fields[0] == "@slot") {
      if (fields.size() != 3) {
        throw std::runtime_error(where + ": expected @slot\\tSLOT\\tTYPE|TYPE");
      }
      auto slot = slot_name_from_string(fields[1]);
      if (!slot || *slot == SlotName::Related) {
        throw std::runtime_error(where + ": unknown slot '" + fields[1] + "'");
      }
      for (const auto& t : split_on(fields[2], '|')) {
        auto et = entity_type_from_string(t);
        if (!et) throw std::runtime_error(where + ": unknown entity type '" + t + "'");
        store.extra_slot_types[*slot].insert(*et);
      }
      continue;
    }
    if ((fields[0] == "plural" || fields[0] == "possessive" || fields[0] == "abbrev") &&
        (fields.size() < 2 || !entity_type_from_string(fields[1]).has_value())) {
      rules_text += line;
      rules_text += '\n';
      continue;
    }
    if (fields.size() == 2) {
      auto type = segment_type_from_string(fields[1]);
      if (!type) {
        throw std::runtime_error(where + ": unknown segment type '" + fields[1] + "'");
      }
      if (fields[0].empty()) throw std::runtime_error(where + ": empty title term");
      store.title_terms.emplace_back(fields[0], *type);
      continue;
    }
    if (fields.size() < 3 || fields.size() > 5) {
      throw std::runtime_error(where + ": expected 2-5 tab-separated fields, got " +
                               std::to_string(fields.size()));
    }
    EntityRecord record;
    record.id = fields[0];
    auto etype = entity_type_from_string(fields[1]);
    if (!etype) {
      throw std::runtime_error(where + ": unknown entity type '" + fields[1] + "'");
    }
    record.etype = *etype;
    record.canonical_name = fields[2];
    if (fields.size() >= 4) record.surface_forms = split_on(fields[3], '|');
    if (fields.size() >= 5) record.context_terms = split_on(fields[4], '|');
    add_record(store, std::move(record), where);
  }
  if (!rules_text.empty()) {
    store.variation_rules = VariationRules::parse(rules_text, origin);
  }
}

void load_json_file(OntologyStore& store, const std::string& content, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  for (const auto& ent : doc.value("entities", json::array())) {
    EntityRecord record;
    record.id = ent.value("id", "");
    auto etype = entity_type_from_string(ent.value("type", ""));
    if (!etype) {
      throw std::runtime_error(origin + ": unknown entity type for id '" + record.id + "'");
    }
    record.etype = *etype;
    record.canonical_name = ent.value("canonical", "");
    for (const auto& s : ent.value("surfaces", json::array())) {
      record.surface_forms.push_back(s.get<std::string>());
    }
    for (const auto& c : ent.value("context", json::array())) {
      record.context_terms.push_back(c.get<std::string>());
    }
    add_record(store, std::move(record), origin);
  }
  for (const auto& tt : doc.value("title_terms", json::array())) {
    auto type = segment_type_from_string(tt.value("type", ""));
    if (!type) {
      throw std::runtime_error(origin + ": unknown segment type '" +
                               tt.value("type", "") + "'");
    }
    store.title_terms.emplace_back(tt.value("term", ""), *type);
  }
  if (doc.contains("slot_types")) {
    for (const auto& [slot_str, types] : doc["slot_types"].items()) {
      auto slot = slot_name_from_string(slot_str);
      if (!slot) throw std::runtime_error(origin + ": unknown slot '" + slot_str + "'");
      for (const auto& t : types) {
        auto et = entity_type_from_string(t.get<std::string>());
        if (!et) throw std::runtime_error(origin + ": unknown entity type in slot_types");
        store.extra_slot_types[*slot].insert(*et);
      }
    }
  }
  if (doc.contains("rules")) {
    store.variation_rules = VariationRules::parse(doc["rules"].get<std::string>(), origin);
  }
}

}  // namespace

OntologyStore load_ontology(const std::vector<std::filesystem::path>& paths) {
  OntologyStore store;
  std::string all_bytes;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open ontology file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    std::string content = buf.str();
    all_bytes += content;
    if (path.extension() == ".json") {
      load_json_file(store, content, path.string());
    } else {
      load_tsv(store, content, path.string());
    }
  }
  store.source_hash = text::fnv1a_hex(all_bytes);
  return store;
}

std::vector<std::string> expand_surface_forms(const EntityRecord& record,
                                              const VariationRules& rules) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add = [&](const std::string& s) {
    if (s.empty()) return;
    if (seen.insert(s).second) out.push_back(s);
  };
  add(record.canonical_name);
  for (const auto& s : record.surface_forms) add(s);
  std::vector<std::string> originals = out;
  for (const auto& form : originals) {
    for (const auto& variant : rules.expand(form)) add(variant);
  }
  return out;
}

SlotSchema default_slot_schema() {
  using ET = EntityType;
  SlotSchema schema;
  schema.rows[SlotName::School] = {{ET::School}, 1, 1};
  schema.rows[SlotName::TargetGroup] = {{ET::Topic, ET::Occupation, ET::Degree,
                                         ET::Education, ET::Industry, ET::Position},
                                        0, std::nullopt};
  schema.rows[SlotName::Prerequisite] = {{ET::Topic, ET::Skill, ET::Occupation,
                                          ET::Position, ET::Education},
                                         0, std::nullopt};
  schema.rows[SlotName::LearningObjective] = {{ET::Topic, ET::Skill, ET::Occupation},
                                              1, std::nullopt};
  schema.rows[SlotName::CourseContent] = {{ET::Topic, ET::Skill}, 1, std::nullopt};
  schema.rows[SlotName::Certificates] = {{ET::Degree, ET::Education}, 0, std::nullopt};
  return schema;
}

SlotSchema slot_schema(const OntologyStore& store) {
  SlotSchema schema = default_slot_schema();
  for (const auto& [slot, types] : store.extra_slot_types) {
    schema.rows[slot].allowed_types.insert(types.begin(), types.end());
  }
  return schema;
}

ElProfile build_profile(const OntologyStore& store) {
  ElProfile profile;
  profile.version_hash = store.source_hash;
  profile.rules = store.variation_rules;
  for (const auto& record : store.records) {
    ElProfile::EntityInfo info;
    info.etype = record.etype;
    info.canonical_name = record.canonical_name;
    for (const auto& ctx : record.context_terms) {
      std::string key = text::normalize_match(ctx);
      if (!key.empty()) info.context_keys.push_back(std::move(key));
    }
    std::sort(info.context_keys.begin(), info.context_keys.end());
    info.context_keys.erase(
        std::unique(info.context_keys.begin(), info.context_keys.end()),
        info.context_keys.end());
    for (const auto& key : info.context_keys) {
      profile.forms[key].context_for.push_back(record.id);
    }
    for (const auto& form : expand_surface_forms(record, store.variation_rules)) {
      std::string key = text::normalize_match(form);
      if (key.empty()) continue;
      profile.forms[key].entity_ids.push_back(record.id);
    }
    profile.entities.emplace(record.id, std::move(info));
  }
  for (auto& [key, entry] : profile.forms) {
    std::sort(entry.entity_ids.begin(), entry.entity_ids.end());
    entry.entity_ids.erase(std::unique(entry.entity_ids.begin(), entry.entity_ids.end()),
                           entry.entity_ids.end());
    std::sort(entry.context_for.begin(), entry.context_for.end());
    entry.context_for.erase(std::unique(entry.context_for.begin(), entry.context_for.end()),
                            entry.context_for.end());
    std::size_t tokens = text::tokenize(key).size();
    profile.max_form_tokens = std::max(profile.max_form_tokens, tokens);
  }
  return profile;
}

}  // namespace ontology

// ---------------------------------------------------------------------------
// Profile serialization
// ---------------------------------------------------------------------------

AmbiguityClass ElProfile::ambiguity(const std::string& normalized_form) const {
  auto it = forms.find(normalized_form);
  if (it == forms.end() || it->second.entity_ids.empty()) {
    return AmbiguityClass::ContextOnly;
  }
  return it->second.entity_ids.size() == 1 ? AmbiguityClass::Unambiguous
                                           : AmbiguityClass::Ambiguous;
}

std::string ElProfile::to_json() const {
  json doc;
  doc["format"] = "edukg-el-profile";
  doc["version"] = 1;
  doc["version_hash"] = version_hash;
  doc["max_form_tokens"] = max_form_tokens;
  doc["rules"] = rules.serialize();
  json ents = json::object();
  for (const auto& [id, info] : entities) {
    ents[id] = {{"type", to_string(info.etype)},
                {"canonical", info.canonical_name},
                {"context", info.context_keys}};
  }
  doc["entities"] = std::move(ents);
  json fs = json::object();
  for (const auto& [key, entry] : forms) {
    fs[key] = {{"ids", entry.entity_ids}, {"context_for", entry.context_for}};
  }
  doc["forms"] = std::move(fs);
  return doc.dump(1);
}

ElProfile ElProfile::from_json(std::string_view json_text) {
  json doc = json::parse(json_text);
  if (doc.value("format", "") != "edukg-el-profile") {
    throw std::runtime_error("not an EL profile file");
  }
  if (doc.value("version", 0) != 1) {
    throw std::runtime_error("unsupported EL profile version");
  }
  ElProfile profile;
  profile.version_hash = doc.value("version_hash", "");
  profile.max_form_tokens = doc.value("max_form_tokens", std::size_t{0});
  profile.rules = VariationRules::parse(doc.value("rules", ""), "<profile>");
  for (const auto& [id, info] : doc["entities"].items()) {
    EntityInfo entity;
    auto etype = entity_type_from_string(info.value("type", ""));
    if (!etype) throw std::runtime_error("bad entity type in profile for '" + id + "'");
    entity.etype = *etype;
    entity.canonical_name = info.value("canonical", "");
    for (const auto& c : info.value("context", json::array())) {
      entity.context_keys.push_back(c.get<std::string>());
    }
    profile.entities.emplace(id, std::move(entity));
  }
  for (const auto& [key, entry] : doc["forms"].items()) {
    FormEntry fe;
    for (const auto& v : entry.value("ids", json::array())) {
      fe.entity_ids.push_back(v.get<std::string>());
    }
    for (const auto& v : entry.value("context_for", json::array())) {
      fe.context_for.push_back(v.get<std::string>());
    }
    profile.forms.emplace(key, std::move(fe));
  }
  return profile;
}

void ElProfile::save(const std::filesystem::path& file) const {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write profile: " + file.string());
  out << to_json();
}

ElProfile ElProfile::load(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open profile: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace edukg
