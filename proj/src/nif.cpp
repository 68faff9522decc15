#include "edukg/nif.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "edukg/text.hpp"

namespace edukg::nif {

namespace {

// -- Turtle subset with literals --------------------------------------------

struct RdfTerm {
  enum class Kind { Iri, Literal };
  Kind kind = Kind::Iri;
  std::string value;
};

struct RdfTriple {
  std::string subject;
  std::string predicate;
  RdfTerm object;
};

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& origin)
      : text_(text), origin_(origin) {}

  struct Tok {
    enum class Kind { Iri, Prefixed, Literal, A, AtPrefix, Dot, Semi, Comma, End };
    Kind kind = Kind::End;
    std::string value;
  };

  Tok next() {
    skip_space();
    if (pos_ >= text_.size()) return {Tok::Kind::End, ""};
    char c = text_[pos_];
    switch (c) {
      case '.': ++pos_; return {Tok::Kind::Dot, "."};
      case ';': ++pos_; return {Tok::Kind::Semi, ";"};
      case ',': ++pos_; return {Tok::Kind::Comma, ","};
      case '<': return read_iri();
      case '"': return read_literal();
      case '@': return read_directive();
      default: return read_word();
    }
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error(origin_ + ": " + what);
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  Tok read_iri() {
    std::size_t close = text_.find('>', pos_);
    if (close == std::string_view::npos) fail("unterminated IRI");
    std::string value(text_.substr(pos_ + 1, close - pos_ - 1));
    pos_ = close + 1;
    return {Tok::Kind::Iri, std::move(value)};
  }

  Tok read_literal() {
    bool long_form = text_.compare(pos_, 3, "\"\"\"") == 0;
    std::size_t start = pos_ + (long_form ? 3 : 1);
    std::string out;
    std::size_t i = start;
    while (i < text_.size()) {
      char c = text_[i];
      if (c == '\\' && i + 1 < text_.size()) {
        char esc = text_[i + 1];
        switch (esc) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'u':
          case 'U': {
            std::size_t digits = esc == 'u' ? 4 : 8;
            if (i + 1 + digits >= text_.size()) fail("bad unicode escape");
            char32_t cp = 0;
            for (std::size_t d = 0; d < digits; ++d) {
              char h = text_[i + 2 + d];
              int v = std::isdigit(static_cast<unsigned char>(h))
                          ? h - '0'
                          : std::tolower(static_cast<unsigned char>(h)) - 'a' + 10;
              if (!std::isxdigit(static_cast<unsigned char>(h))) fail("bad unicode escape");
              cp = cp * 16 + static_cast<char32_t>(v);
            }
            text::append_utf8(out, cp);
            i += digits;
            break;
          }
          default: out.push_back(esc); break;
        }
        i += 2;
        continue;
      }
      if (long_form) {
        if (c == '"' && text_.compare(i, 3, "\"\"\"") == 0) break;
      } else if (c == '"') {
        break;
      }
      out.push_back(c);
      ++i;
    }
    if (i >= text_.size()) fail("unterminated literal");
    pos_ = i + (long_form ? 3 : 1);
    // Optional language tag or datatype.
    if (pos_ < text_.size() && text_[pos_] == '@') {
      ++pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
        ++pos_;
      }
    } else if (text_.compare(pos_, 2, "^^") == 0) {
      pos_ += 2;
      if (pos_ < text_.size() && text_[pos_] == '<') {
        read_iri();
      } else {
        read_word();
      }
    }
    return {Tok::Kind::Literal, std::move(out)};
  }

  Tok read_directive() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
    std::string word(text_.substr(start, pos_ - start));
    if (word == "@prefix") return {Tok::Kind::AtPrefix, word};
    fail("unsupported directive " + word);
  }

  Tok read_word() {
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == ';' || d == ',' ||
          d == '<' || d == '"') {
        break;
      }
      if (d == '.') {
        char after = pos_ + 1 < text_.size() ? text_[pos_ + 1] : ' ';
        if (std::isspace(static_cast<unsigned char>(after))) break;
      }
      ++pos_;
    }
    std::string word(text_.substr(start, pos_ - start));
    if (word == "a") return {Tok::Kind::A, word};
    if (word.empty()) fail("unexpected character");
    return {Tok::Kind::Prefixed, std::move(word)};
  }

  std::string_view text_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::vector<RdfTriple> parse_turtle_literals(std::string_view content, const std::string& origin) {
  Lexer lexer(content, origin);
  std::map<std::string, std::string> prefixes;
  std::vector<RdfTriple> triples;
  using Tok = Lexer::Tok;

  auto resolve_iri = [&](const Tok& tok) -> std::string {
    if (tok.kind == Tok::Kind::Iri) return tok.value;
    if (tok.kind == Tok::Kind::A) return "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
    if (tok.kind != Tok::Kind::Prefixed) {
      throw std::runtime_error(origin + ": expected IRI, got '" + tok.value + "'");
    }
    std::size_t colon = tok.value.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error(origin + ": not a prefixed name: '" + tok.value + "'");
    }
    auto it = prefixes.find(tok.value.substr(0, colon));
    if (it == prefixes.end()) {
      throw std::runtime_error(origin + ": undeclared prefix in '" + tok.value + "'");
    }
    return it->second + tok.value.substr(colon + 1);
  };

  Tok tok = lexer.next();
  while (tok.kind != Tok::Kind::End) {
    if (tok.kind == Tok::Kind::AtPrefix) {
      Tok name = lexer.next();
      Tok iri = lexer.next();
      Tok dot = lexer.next();
      if (name.kind != Tok::Kind::Prefixed || iri.kind != Tok::Kind::Iri ||
          dot.kind != Tok::Kind::Dot) {
        throw std::runtime_error(origin + ": malformed @prefix");
      }
      std::string prefix = name.value;
      if (!prefix.empty() && prefix.back() == ':') prefix.pop_back();
      prefixes[prefix] = iri.value;
      tok = lexer.next();
      continue;
    }
    std::string subject = resolve_iri(tok);
    bool statement_done = false;
    while (!statement_done) {
      std::string predicate = resolve_iri(lexer.next());
      bool predicate_done = false;
      while (!predicate_done) {
        Tok otok = lexer.next();
        RdfTerm object;
        if (otok.kind == Tok::Kind::Literal) {
          object = {RdfTerm::Kind::Literal, otok.value};
        } else {
          object = {RdfTerm::Kind::Iri, resolve_iri(otok)};
        }
        triples.push_back({subject, predicate, std::move(object)});
        Tok delim = lexer.next();
        switch (delim.kind) {
          case Tok::Kind::Comma: break;
          case Tok::Kind::Semi: predicate_done = true; break;
          case Tok::Kind::Dot: predicate_done = true; statement_done = true; break;
          default: throw std::runtime_error(origin + ": expected ',', ';' or '.'");
        }
      }
    }
    tok = lexer.next();
  }
  return triples;
}

// -- NIF interpretation ------------------------------------------------------

std::string local_name(const std::string& iri) {
  std::size_t at = iri.find_last_of("#/");
  return at == std::string::npos ? iri : iri.substr(at + 1);
}

std::string squash(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

std::optional<SegmentType> segment_type_from_class(const std::string& iri) {
  std::string name = squash(local_name(iri));
  if (name == "targetgroup" || name == "targetgroups") return SegmentType::TargetGroup;
  if (name == "prerequisite" || name == "prerequisites") return SegmentType::Prerequisite;
  if (name == "learningobjective" || name == "learningobjectives") {
    return SegmentType::LearningObjective;
  }
  if (name == "coursecontent" || name == "content" || name == "coursecontents") {
    return SegmentType::CourseContent;
  }
  if (name == "certificatesdegree" || name == "certificate" || name == "certificates" ||
      name == "certificateanddegree" || name == "certificatesanddegrees" ||
      name == "degreecertificate") {
    return SegmentType::CertificatesDegree;
  }
  return std::nullopt;
}

std::optional<EntityType> entity_type_from_class(const std::string& iri) {
  std::string name = squash(local_name(iri));
  if (name.size() > 1 && name.back() == 's') name.pop_back();
  return entity_type_from_string(name);
}

struct Resource {
  std::optional<std::size_t> begin;
  std::optional<std::size_t> end;
  std::string is_string;
  std::string reference_context;
  std::string anchor;
  std::vector<std::string> classes;  // rdf:type + taClassRef objects
  std::string ident_ref;
};

// Code-point index -> byte offset conversion for one text.
std::vector<std::size_t> codepoint_offsets(const std::string& s) {
  std::vector<std::size_t> offsets;
  std::size_t pos = 0;
  while (pos < s.size()) {
    offsets.push_back(pos);
    text::decode_utf8(s, pos);
  }
  offsets.push_back(s.size());
  return offsets;
}

}  // namespace

std::vector<GoldDocument> convert(std::string_view turtle_text, const std::string& origin) {
  auto triples = parse_turtle_literals(turtle_text, origin);

  std::map<std::string, Resource> resources;
  for (const auto& t : triples) {
    Resource& r = resources[t.subject];
    std::string pred = local_name(t.predicate);
    if (pred == "isString" && t.object.kind == RdfTerm::Kind::Literal) {
      r.is_string = t.object.value;
    } else if (pred == "beginIndex" && t.object.kind == RdfTerm::Kind::Literal) {
      r.begin = std::stoul(t.object.value);
    } else if (pred == "endIndex" && t.object.kind == RdfTerm::Kind::Literal) {
      r.end = std::stoul(t.object.value);
    } else if (pred == "referenceContext" && t.object.kind == RdfTerm::Kind::Iri) {
      r.reference_context = t.object.value;
    } else if (pred == "anchorOf" && t.object.kind == RdfTerm::Kind::Literal) {
      r.anchor = t.object.value;
    } else if ((pred == "type" || pred == "taClassRef" || pred == "class") &&
               t.object.kind == RdfTerm::Kind::Iri) {
      r.classes.push_back(t.object.value);
    } else if (pred == "taIdentRef" && t.object.kind == RdfTerm::Kind::Iri) {
      r.ident_ref = t.object.value;
    }
  }

  // Contexts are resources with text; everything else with a reference
  // context is an annotation.
  std::map<std::string, GoldDocument> docs;         // context IRI -> doc
  std::map<std::string, std::vector<std::size_t>> offsets;  // context IRI -> cp map
  for (const auto& [iri, r] : resources) {
    if (r.is_string.empty()) continue;
    GoldDocument doc;
    std::string base = iri.substr(0, iri.find('#'));
    doc.doc_id = local_name(base);
    if (doc.doc_id.empty()) doc.doc_id = base;
    doc.url = base;
    doc.text = r.is_string;
    offsets[iri] = codepoint_offsets(doc.text);
    docs.emplace(iri, std::move(doc));
  }

  for (const auto& [iri, r] : resources) {
    if (!r.begin || !r.end || r.reference_context.empty()) continue;
    auto doc_it = docs.find(r.reference_context);
    if (doc_it == docs.end()) continue;
    GoldDocument& doc = doc_it->second;
    const auto& cp = offsets[r.reference_context];
    if (*r.begin >= cp.size() || *r.end >= cp.size() || *r.begin > *r.end) {
      throw std::runtime_error(origin + ": annotation " + iri + " outside context text");
    }
    CharSpan span{cp[*r.begin], cp[*r.end]};

    std::optional<SegmentType> seg_type;
    std::optional<EntityType> ent_type;
    for (const auto& cls : r.classes) {
      if (!seg_type) seg_type = segment_type_from_class(cls);
      if (!ent_type) ent_type = entity_type_from_class(cls);
    }
    if (ent_type) {
      GoldMention m;
      m.span = span;
      m.surface = !r.anchor.empty() ? r.anchor
                                    : doc.text.substr(span.start, span.length());
      m.etype = *ent_type;
      m.entity_id = r.ident_ref;
      doc.mentions.push_back(std::move(m));
    } else if (seg_type) {
      doc.segments.push_back({span, *seg_type});
    }
  }

  std::vector<GoldDocument> out;
  out.reserve(docs.size());
  for (auto& [iri, doc] : docs) {
    std::sort(doc.segments.begin(), doc.segments.end(),
              [](const GoldSegment& a, const GoldSegment& b) { return a.span < b.span; });
    std::sort(doc.mentions.begin(), doc.mentions.end(),
              [](const GoldMention& a, const GoldMention& b) { return a.span < b.span; });
    out.push_back(std::move(doc));
  }
  return out;
}

std::vector<GoldDocument> convert_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open NIF file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return convert(buf.str(), path.string());
}

void write_gold_dir(const std::vector<GoldDocument>& docs,
                    const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& doc : docs) {
    std::string name = doc.doc_id;
    for (auto& c : name) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    }
    std::ofstream out(out_dir / (name + ".json"), std::ios::binary);
    if (!out) {
      throw std::runtime_error("cannot write gold file for doc " + doc.doc_id);
    }
    out << evalkit::gold_document_to_json(doc);
  }
}

}  // namespace edukg::nif
