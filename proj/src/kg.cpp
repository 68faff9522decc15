#include "edukg/kg.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace edukg {

namespace {

bool looks_absolute(std::string_view id) {
  return id.find("://") != std::string_view::npos ||
         id.rfind("urn:", 0) == 0 || id.rfind("mailto:", 0) == 0;
}

// Safe local part for prefixed-name output (conservative PN_LOCAL subset).
bool pn_local_safe(std::string_view local) {
  if (local.empty()) return false;
  for (char c : local) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string Namespace::expand_entity(const std::string& id) const {
  if (looks_absolute(id)) return id;
  if (id.rfind("edu:", 0) == 0) return edu + id.substr(4);
  if (id.rfind("nil:", 0) == 0) return nil + id.substr(4);
  if (id.rfind("skos:", 0) == 0) return std::string(kSkosBase) + id.substr(5);
  return edu + id;
}

std::string Namespace::course_iri(const std::string& course_id, const std::string& url) const {
  if (!url.empty()) {
    std::size_t scheme = url.find("://");
    if (scheme != std::string::npos) {
      std::size_t host_end = url.find_first_of("/?#", scheme + 3);
      std::string origin = host_end == std::string::npos ? url : url.substr(0, host_end);
      return origin + "#" + course_id;
    }
  }
  return course + course_id;
}

std::string Namespace::predicate_iri(SlotName slot) const {
  switch (slot) {
    case SlotName::School: return edu + "school";
    case SlotName::TargetGroup: return edu + "target_group";
    case SlotName::Prerequisite: return edu + "prerequisite";
    case SlotName::LearningObjective: return edu + "learning_objective";
    case SlotName::CourseContent: return edu + "course_content";
    case SlotName::Certificates: return edu + "certificate";
    case SlotName::Related: return std::string(kSkosBase) + "related";
  }
  return std::string(kSkosBase) + "related";
}

namespace kg {

std::set<Triple> to_triples(const std::vector<SlotAssignment>& assignments,
                            const Namespace& ns,
                            const std::map<std::string, std::string>& course_iris) {
  std::set<Triple> triples;
  for (const auto& a : assignments) {
    auto it = course_iris.find(a.course_id);
    std::string subject =
        it != course_iris.end() ? it->second : ns.course_iri(a.course_id, "");
    triples.insert({std::move(subject), ns.predicate_iri(a.slot),
                    ns.expand_entity(a.entity_id)});
  }
  return triples;
}

std::string serialize_ntriples(const std::set<Triple>& triples) {
  std::string out;
  for (const auto& t : triples) {  // std::set iterates in sorted order
    out += '<';
    out += t.subject;
    out += "> <";
    out += t.predicate;
    out += "> <";
    out += t.object;
    out += "> .\n";
  }
  return out;
}

namespace {

std::string compress(const std::string& iri, const Namespace& ns) {
  struct Prefix {
    std::string_view name;
    std::string_view base;
  };
  const Prefix prefixes[] = {{"edu", ns.edu}, {"nil", ns.nil}, {"skos", kSkosBase}};
  for (const auto& p : prefixes) {
    if (iri.size() > p.base.size() && iri.compare(0, p.base.size(), p.base) == 0) {
      std::string local = iri.substr(p.base.size());
      if (pn_local_safe(local)) {
        return std::string(p.name) + ":" + local;
      }
    }
  }
  return "<" + iri + ">";
}

}  // namespace

std::string serialize_turtle(const std::set<Triple>& triples, const Namespace& ns) {
  std::ostringstream out;
  out << "@prefix edu: <" << ns.edu << "> .\n";
  out << "@prefix nil: <" << ns.nil << "> .\n";
  out << "@prefix skos: <" << kSkosBase << "> .\n";
  if (triples.empty()) return out.str();
  out << "\n";

  // set<Triple> order is (subject, predicate, object), exactly the grouping
  // order needed here.
  auto it = triples.begin();
  while (it != triples.end()) {
    const std::string& subject = it->subject;
    out << compress(subject, ns);
    bool first_predicate = true;
    while (it != triples.end() && it->subject == subject) {
      const std::string& predicate = it->predicate;
      out << (first_predicate ? " " : " ;\n    ");
      first_predicate = false;
      out << compress(predicate, ns);
      bool first_object = true;
      while (it != triples.end() && it->subject == subject && it->predicate == predicate) {
        out << (first_object ? " " : ", ") << compress(it->object, ns);
        first_object = false;
        ++it;
      }
    }
    out << " .\n";
  }
  return out.str();
}

std::set<Triple> parse_ntriples(std::string_view text) {
  std::set<Triple> triples;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) {
      line.remove_suffix(1);
    }
    if (line.empty() || line[0] == '#') continue;

    std::array<std::string, 3> parts;
    std::size_t at = 0;
    for (auto& part : parts) {
      while (at < line.size() && line[at] == ' ') ++at;
      if (at >= line.size() || line[at] != '<') {
        throw std::runtime_error("ntriples line " + std::to_string(line_no) +
                                 ": expected <IRI>");
      }
      std::size_t close = line.find('>', at);
      if (close == std::string_view::npos) {
        throw std::runtime_error("ntriples line " + std::to_string(line_no) +
                                 ": unterminated IRI");
      }
      part = std::string(line.substr(at + 1, close - at - 1));
      at = close + 1;
    }
    triples.insert({parts[0], parts[1], parts[2]});
  }
  return triples;
}

namespace {

struct TurtleToken {
  enum class Kind { Iri, Prefixed, AtPrefix, Dot, Semicolon, Comma, End };
  Kind kind = Kind::End;
  std::string value;
};

class TurtleLexer {
 public:
  explicit TurtleLexer(std::string_view text) : text_(text) {}

  TurtleToken next() {
    skip_space();
    if (pos_ >= text_.size()) return {TurtleToken::Kind::End, ""};
    char c = text_[pos_];
    if (c == '.') { ++pos_; return {TurtleToken::Kind::Dot, "."}; }
    if (c == ';') { ++pos_; return {TurtleToken::Kind::Semicolon, ";"}; }
    if (c == ',') { ++pos_; return {TurtleToken::Kind::Comma, ","}; }
    if (c == '<') {
      std::size_t close = text_.find('>', pos_);
      if (close == std::string_view::npos) {
        throw std::runtime_error("turtle: unterminated IRI");
      }
      std::string value(text_.substr(pos_ + 1, close - pos_ - 1));
      pos_ = close + 1;
      return {TurtleToken::Kind::Iri, std::move(value)};
    }
    if (c == '@') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      std::string word(text_.substr(start, pos_ - start));
      if (word != "@prefix") {
        throw std::runtime_error("turtle: unsupported directive " + word);
      }
      return {TurtleToken::Kind::AtPrefix, std::move(word)};
    }
    // Prefixed name: runs up to whitespace or a punctuation delimiter.
    std::size_t start = pos_;
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(d)) || d == ';' || d == ',' ||
          d == '<') {
        break;
      }
      if (d == '.') {
        // '.' ends a statement unless it is interior to the name.
        char after = pos_ + 1 < text_.size() ? text_[pos_ + 1] : ' ';
        if (std::isspace(static_cast<unsigned char>(after)) || after == '\0') break;
      }
      ++pos_;
    }
    return {TurtleToken::Kind::Prefixed, std::string(text_.substr(start, pos_ - start))};
  }

 private:
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

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

std::set<Triple> parse_turtle(std::string_view text) {
  TurtleLexer lexer(text);
  std::map<std::string, std::string> prefixes;
  std::set<Triple> triples;

  auto resolve = [&](const TurtleToken& tok) -> std::string {
    if (tok.kind == TurtleToken::Kind::Iri) return tok.value;
    if (tok.kind != TurtleToken::Kind::Prefixed) {
      throw std::runtime_error("turtle: expected IRI or prefixed name, got '" + tok.value + "'");
    }
    std::size_t colon = tok.value.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error("turtle: not a prefixed name: '" + tok.value + "'");
    }
    auto it = prefixes.find(tok.value.substr(0, colon));
    if (it == prefixes.end()) {
      throw std::runtime_error("turtle: undeclared prefix in '" + tok.value + "'");
    }
    return it->second + tok.value.substr(colon + 1);
  };

  TurtleToken tok = lexer.next();
  while (tok.kind != TurtleToken::Kind::End) {
    if (tok.kind == TurtleToken::Kind::AtPrefix) {
      TurtleToken name = lexer.next();
      TurtleToken iri = lexer.next();
      TurtleToken dot = lexer.next();
      if (name.kind != TurtleToken::Kind::Prefixed || iri.kind != TurtleToken::Kind::Iri ||
          dot.kind != TurtleToken::Kind::Dot) {
        throw std::runtime_error("turtle: malformed @prefix declaration");
      }
      std::string prefix = name.value;
      if (!prefix.empty() && prefix.back() == ':') prefix.pop_back();
      prefixes[prefix] = iri.value;
      tok = lexer.next();
      continue;
    }
    // Statement: subject (predicate object (, object)* (; predicate ...)*) .
    std::string subject = resolve(tok);
    bool statement_done = false;
    while (!statement_done) {
      TurtleToken ptok = lexer.next();
      std::string predicate = resolve(ptok);
      bool predicate_done = false;
      while (!predicate_done) {
        TurtleToken otok = lexer.next();
        triples.insert({subject, predicate, resolve(otok)});
        TurtleToken delim = lexer.next();
        switch (delim.kind) {
          case TurtleToken::Kind::Comma: break;
          case TurtleToken::Kind::Semicolon: predicate_done = true; break;
          case TurtleToken::Kind::Dot:
            predicate_done = true;
            statement_done = true;
            break;
          default:
            throw std::runtime_error("turtle: expected ',', ';' or '.'");
        }
      }
    }
    tok = lexer.next();
  }
  return triples;
}

StatementCounts count_statements(const std::set<Triple>& triples, const Namespace& ns) {
  StatementCounts counts;
  counts.total = triples.size();
  for (const auto& t : triples) {
    std::string name = t.predicate;
    if (name.rfind(ns.edu, 0) == 0) {
      name = name.substr(ns.edu.size());
    } else if (name.rfind(kSkosBase, 0) == 0) {
      name = name.substr(kSkosBase.size());
    }
    counts.by_predicate[name] += 1;
  }
  return counts;
}

}  // namespace kg
}  // namespace edukg
