#include "edukg/recognizer.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace edukg {

std::string NilRegistry::get_or_assign(const std::string& nil_key) {
  auto it = ids_.find(nil_key);
  if (it != ids_.end()) return it->second;
  std::string id = "nil:" + std::to_string(counter_++);
  ids_.emplace(nil_key, id);
  return id;
}

void NilRegistry::merge(const NilRegistry& other) {
  for (const auto& [key, id] : other.ids_) {
    get_or_assign(key);
  }
}

CueLexicon CueLexicon::defaults() {
  CueLexicon cues;
  cues.by_segment = {
      {SegmentType::CourseContent, EntityType::Topic},
      {SegmentType::Prerequisite, EntityType::Skill},
      {SegmentType::CertificatesDegree, EntityType::Degree},
      {SegmentType::TargetGroup, EntityType::Position},
      {SegmentType::LearningObjective, EntityType::Skill},
  };
  return cues;
}

namespace recognizer {

namespace {

std::string upper_type(EntityType t) {
  std::string s = to_string(t);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::optional<EntityType> type_from_upper(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return entity_type_from_string(lower);
}

std::vector<Token> cluster_tokens(const AnnotatedDocument& doc, std::size_t cluster_ref) {
  const CharSpan span = doc.clusters[cluster_ref].char_span;
  auto tokens = text::tokenize(std::string_view(doc.text).substr(span.start, span.length()));
  for (auto& t : tokens) {
    t.span.start += span.start;
    t.span.end += span.start;
  }
  return tokens;
}

}  // namespace

std::string bio_tag(char prefix, EntityType t) {
  return std::string(1, prefix) + "-" + upper_type(t);
}

void export_silver(const std::vector<AnnotatedDocument>& corpus, std::ostream& out) {
  out << kSilverHeader << '\n';
  for (const auto& doc : corpus) {
    out << "# doc=" << doc.doc_id << '\n';
    for (std::size_t c = 0; c < doc.clusters.size(); ++c) {
      out << "# cluster=" << c << '\n';
      auto tokens = cluster_tokens(doc, c);
      // Linked mentions of this cluster, in span order.
      std::vector<const Mention*> linked;
      for (const auto& m : doc.mentions) {
        if (m.cluster_ref == c && m.origin == MentionOrigin::Linked) linked.push_back(&m);
      }
      std::sort(linked.begin(), linked.end(), [](const Mention* a, const Mention* b) {
        return a->char_span < b->char_span;
      });
      const Mention* active = nullptr;
      for (const auto& token : tokens) {
        const Mention* covering = nullptr;
        for (const Mention* m : linked) {
          if (m->char_span.start < token.span.end && token.span.start < m->char_span.end) {
            covering = m;
            break;
          }
        }
        std::string tag = "O";
        if (covering != nullptr) {
          tag = bio_tag(covering == active ? 'I' : 'B', covering->etype);
          active = covering;
        } else {
          active = nullptr;
        }
        out << token.text << '\t' << tag << '\n';
      }
      out << '\n';
    }
  }
}

void export_silver_file(const std::vector<AnnotatedDocument>& corpus,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write silver dataset: " + path.string());
  export_silver(corpus, out);
  if (!out) throw std::runtime_error("write failure: " + path.string());
}

std::vector<Mention> recognize_baseline(const AnnotatedDocument& doc,
                                        std::size_t cluster_ref,
                                        const CueLexicon& cues) {
  std::vector<Mention> out;
  auto cue = cues.by_segment.find(doc.clusters[cluster_ref].seg_type);
  if (cue == cues.by_segment.end()) return out;  // Unknown clusters carry no cue

  auto overlaps_linked = [&](const CharSpan& span) {
    for (const auto& m : doc.mentions) {
      if (m.origin == MentionOrigin::Linked && m.char_span.overlaps(span)) return true;
    }
    return false;
  };
  auto is_candidate_token = [&](const Token& t) {
    std::size_t pos = 0;
    char32_t first = text::decode_utf8(t.text, pos);
    return text::is_letter_cp(first) && text::is_upper_cp(first) &&
           !overlaps_linked(t.span);
  };
  auto line_gap = [&](const Token& prev, const Token& next) {
    for (std::size_t at = prev.span.end; at < next.span.start; ++at) {
      if (doc.text[at] == '\n') return true;
    }
    return false;
  };

  // Body segments only: titles are section labels, not entity candidates.
  for (const auto& segment : doc.clusters[cluster_ref].body) {
    auto tokens = text::tokenize(std::string_view(doc.text)
                                     .substr(segment.char_span.start,
                                             segment.char_span.length()));
    for (auto& t : tokens) {
      t.span.start += segment.char_span.start;
      t.span.end += segment.char_span.start;
    }
    std::size_t i = 0;
    while (i < tokens.size()) {
      if (!is_candidate_token(tokens[i])) {
        ++i;
        continue;
      }
      std::size_t j = i + 1;
      while (j < tokens.size() && j - i < 4 && is_candidate_token(tokens[j]) &&
             !line_gap(tokens[j - 1], tokens[j])) {
        ++j;
      }
      Mention m;
      m.char_span = {tokens[i].span.start, tokens[j - 1].span.end};
      m.surface = doc.text.substr(m.char_span.start, m.char_span.length());
      m.etype = cue->second;
      m.origin = MentionOrigin::Recognized;
      m.confidence = 0.3;
      m.cluster_ref = cluster_ref;
      out.push_back(std::move(m));
      i = j;
    }
  }
  return out;
}

std::vector<Mention> recognize_document(const AnnotatedDocument& doc, const CueLexicon& cues) {
  std::vector<Mention> out;
  for (std::size_t c = 0; c < doc.clusters.size(); ++c) {
    auto found = recognize_baseline(doc, c, cues);
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

std::map<std::string, std::vector<Mention>> import_external(
    std::istream& in, const std::vector<AnnotatedDocument>& corpus, ImportStats* stats) {
  std::map<std::string, const AnnotatedDocument*> by_id;
  for (const auto& doc : corpus) by_id[doc.doc_id] = &doc;

  std::map<std::string, std::vector<Mention>> mentions;
  const AnnotatedDocument* doc = nullptr;
  std::vector<Token> tokens;
  std::size_t cluster_ref = 0;
  std::size_t token_idx = 0;
  std::size_t line_no = 0;

  // Open mention state while scanning a cluster block.
  bool in_mention = false;
  EntityType mtype = EntityType::Topic;
  CharSpan mspan;

  auto flush = [&]() {
    if (!in_mention || doc == nullptr) {
      in_mention = false;
      return;
    }
    Mention m;
    m.char_span = mspan;
    m.surface = doc->text.substr(mspan.start, mspan.length());
    m.etype = mtype;
    m.origin = MentionOrigin::Recognized;
    m.confidence = 1.0;
    m.cluster_ref = cluster_ref;
    mentions[doc->doc_id].push_back(std::move(m));
    in_mention = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) {
      flush();
      continue;
    }
    if (line[0] == '#') {
      flush();
      if (line.rfind("# doc=", 0) == 0) {
        std::string id = line.substr(6);
        auto it = by_id.find(id);
        if (it == by_id.end()) {
          throw std::runtime_error("line " + std::to_string(line_no) +
                                   ": unknown document '" + id + "'");
        }
        doc = it->second;
      } else if (line.rfind("# cluster=", 0) == 0) {
        if (doc == nullptr) {
          throw std::runtime_error("line " + std::to_string(line_no) +
                                   ": cluster marker before doc marker");
        }
        cluster_ref = std::stoul(line.substr(10));
        if (cluster_ref >= doc->clusters.size()) {
          throw std::runtime_error("line " + std::to_string(line_no) + ": document '" +
                                   doc->doc_id + "' has no cluster " +
                                   std::to_string(cluster_ref));
        }
        tokens = cluster_tokens(*doc, cluster_ref);
        token_idx = 0;
      }
      continue;
    }
    std::size_t tab = line.find('\t');
    if (tab == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected token\\ttag");
    }
    if (doc == nullptr) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": token before doc marker");
    }
    std::string token_text = line.substr(0, tab);
    std::string tag = line.substr(tab + 1);

    if (token_idx >= tokens.size() || tokens[token_idx].text != token_text) {
      throw std::runtime_error(
          "alignment mismatch in doc '" + doc->doc_id + "' cluster " +
          std::to_string(cluster_ref) + " at token position " + std::to_string(token_idx) +
          ": file has '" + token_text + "', corpus has '" +
          (token_idx < tokens.size() ? tokens[token_idx].text : std::string("<end>")) + "'");
    }
    const Token& token = tokens[token_idx];
    ++token_idx;

    if (tag == "O") {
      flush();
      continue;
    }
    if (tag.size() < 3 || (tag[0] != 'B' && tag[0] != 'I') || tag[1] != '-') {
      throw std::runtime_error("line " + std::to_string(line_no) + ": malformed tag '" + tag + "'");
    }
    auto type = type_from_upper(std::string_view(tag).substr(2));
    if (!type) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": unknown entity type in '" +
                               tag + "'");
    }
    if (tag[0] == 'B') {
      flush();
      in_mention = true;
      mtype = *type;
      mspan = token.span;
    } else {  // I-
      if (in_mention && *type == mtype) {
        mspan.end = token.span.end;
      } else {
        // Stray I- repaired as a fresh mention start.
        flush();
        if (stats != nullptr) stats->repaired_tags += 1;
        in_mention = true;
        mtype = *type;
        mspan = token.span;
      }
    }
  }
  flush();
  return mentions;
}

std::map<std::string, std::vector<Mention>> import_external_file(
    const std::filesystem::path& path, const std::vector<AnnotatedDocument>& corpus,
    ImportStats* stats) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
  return import_external(in, corpus, stats);
}

std::vector<Mention> assign_nil_ids(std::vector<Mention> mentions, NilRegistry& registry,
                                    const VariationRules& rules) {
  for (auto& m : mentions) {
    if (m.origin != MentionOrigin::Recognized || !m.entity_id.empty()) continue;
    m.entity_id = registry.get_or_assign(rules.nil_key(m.surface));
  }
  return mentions;
}

}  // namespace recognizer
}  // namespace edukg
