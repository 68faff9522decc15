#include "edukg/segmenter.hpp"

#include <algorithm>
#include <unordered_set>

#include "edukg/html.hpp"

namespace edukg {

std::string to_string(SegmentType t) {
  switch (t) {
    case SegmentType::TargetGroup: return "target_group";
    case SegmentType::Prerequisite: return "prerequisite";
    case SegmentType::LearningObjective: return "learning_objective";
    case SegmentType::CourseContent: return "course_content";
    case SegmentType::CertificatesDegree: return "certificates_degree";
    case SegmentType::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<SegmentType> segment_type_from_string(std::string_view s) {
  if (s == "target_group") return SegmentType::TargetGroup;
  if (s == "prerequisite") return SegmentType::Prerequisite;
  if (s == "learning_objective") return SegmentType::LearningObjective;
  if (s == "course_content") return SegmentType::CourseContent;
  if (s == "certificates_degree") return SegmentType::CertificatesDegree;
  if (s == "unknown") return SegmentType::Unknown;
  return std::nullopt;
}

namespace segmenter {

namespace {

bool is_separator_tag(const std::string& tag) {
  static const std::unordered_set<std::string> kM = {
      "div", "p",  "li", "td", "th", "dt", "dd", "summary",
      "legend", "h1", "h2", "h3", "h4", "h5", "h6"};
  return kM.count(tag) > 0;
}

bool is_heading_tag(const std::string& tag) {
  return tag.size() == 2 && tag[0] == 'h' && tag[1] >= '1' && tag[1] <= '6';
}

bool is_block_tag(const std::string& tag) {
  static const std::unordered_set<std::string> kBlock = {
      "address", "article", "aside", "blockquote", "body",    "caption",
      "center",  "dd",      "details", "dir",      "div",     "dl",
      "dt",      "fieldset", "figcaption", "figure", "footer", "form",
      "h1",      "h2",      "h3",     "h4",        "h5",      "h6",
      "header",  "hr",      "html",   "legend",    "li",      "main",
      "menu",    "nav",     "ol",     "p",         "pre",     "section",
      "summary", "table",   "tbody",  "td",        "tfoot",   "th",
      "thead",   "tr",      "ul"};
  return kBlock.count(tag) > 0;
}

bool is_dropped_tag(const std::string& tag) {
  static const std::unordered_set<std::string> kDrop = {
      "script", "style", "noscript", "template", "head",  "iframe",
      "svg",    "canvas", "object",  "embed",    "applet", "title"};
  return kDrop.count(tag) > 0;
}

struct SeparatorSpan {
  CharSpan span;
  std::string tag;
};

struct TextRun {
  CharSpan span;
  std::string tag;  // innermost enclosing element when the run was emitted
};

// Renders the DOM to text while recording where each innermost separator
// element landed and which element each raw text run came from.
class Renderer {
 public:
  void render(const html::Node& root) {
    tag_stack_.push_back("");
    walk(root);
  }

  std::string text;
  std::vector<SeparatorSpan> separators;
  std::vector<TextRun> runs;

 private:
  // Returns true when the subtree contains a separator element.
  bool walk(const html::Node& node) {
    if (node.kind == html::Node::Kind::Text) {
      emit_text(node.text);
      return false;
    }
    if (!node.tag.empty() && is_dropped_tag(node.tag)) return false;

    bool block = !node.tag.empty() && is_block_tag(node.tag);
    if (node.tag == "br") {
      line_break();
      return false;
    }
    if (block) line_break();

    if (!node.tag.empty()) tag_stack_.push_back(node.tag);
    std::size_t start = text.size();
    bool has_inner_separator = false;
    for (const auto& child : node.children) {
      has_inner_separator |= walk(*child);
    }
    std::size_t end = text.size();
    if (!node.tag.empty()) tag_stack_.pop_back();

    if (block) line_break();

    bool is_sep = !node.tag.empty() && is_separator_tag(node.tag);
    if (is_sep && !has_inner_separator) {
      CharSpan trimmed = trim_span({start, end});
      if (!trimmed.empty()) {
        separators.push_back({trimmed, node.tag});
      }
    }
    return is_sep || has_inner_separator;
  }

  void emit_text(const std::string& raw) {
    std::size_t pos = 0;
    std::size_t run_start = std::string::npos;
    while (pos < raw.size()) {
      std::size_t at = pos;
      char32_t cp = text::decode_utf8(raw, pos);
      if (text::is_space_cp(cp)) {
        pending_space_ = !text.empty() && text.back() != '\n';
        continue;
      }
      if (pending_space_) {
        text.push_back(' ');
        pending_space_ = false;
      }
      if (run_start == std::string::npos) run_start = text.size();
      text.append(raw, at, pos - at);
    }
    if (run_start != std::string::npos) {
      runs.push_back({{run_start, text.size()}, tag_stack_.back()});
    }
  }

  void line_break() {
    pending_space_ = false;
    if (!text.empty() && text.back() != '\n') text.push_back('\n');
  }

  CharSpan trim_span(CharSpan span) const {
    while (span.start < span.end &&
           (text[span.start] == ' ' || text[span.start] == '\n')) {
      ++span.start;
    }
    while (span.end > span.start &&
           (text[span.end - 1] == ' ' || text[span.end - 1] == '\n')) {
      --span.end;
    }
    return span;
  }

  std::vector<std::string> tag_stack_;
  bool pending_space_ = false;
};

}  // namespace

ExtractionResult extract_text(const HtmlDocument& doc) {
  ExtractionResult result;
  auto root = html::parse(doc.html);
  Renderer renderer;
  renderer.render(*root);
  result.normalized_text = std::move(renderer.text);
  const std::string& full = result.normalized_text;

  // Split the rendered text at every separator boundary; the pieces between
  // separator spans become segments of their own.
  std::vector<std::size_t> bounds{0, full.size()};
  for (const auto& sep : renderer.separators) {
    bounds.push_back(sep.span.start);
    bounds.push_back(sep.span.end);
  }
  std::sort(bounds.begin(), bounds.end());
  bounds.erase(std::unique(bounds.begin(), bounds.end()), bounds.end());

  auto trim = [&](CharSpan span) {
    while (span.start < span.end &&
           (full[span.start] == ' ' || full[span.start] == '\n')) {
      ++span.start;
    }
    while (span.end > span.start &&
           (full[span.end - 1] == ' ' || full[span.end - 1] == '\n')) {
      --span.end;
    }
    return span;
  };

  std::size_t order = 0;
  auto emit = [&](CharSpan span, const std::string& tag) {
    TextSegment seg;
    seg.char_span = span;
    seg.text = full.substr(span.start, span.length());
    seg.order = order++;
    seg.source_tag = tag;
    seg.is_title = is_heading_tag(tag);
    result.segments.push_back(std::move(seg));
  };
  auto tag_of_gap = [&](CharSpan span) -> std::string {
    for (const auto& run : renderer.runs) {
      if (run.span.overlaps(span)) return run.tag;
    }
    return "";
  };

  std::size_t sep_idx = 0;
  for (std::size_t i = 0; i + 1 < bounds.size(); ++i) {
    CharSpan piece = trim({bounds[i], bounds[i + 1]});
    if (piece.empty()) continue;

    while (sep_idx < renderer.separators.size() &&
           renderer.separators[sep_idx].span.end <= piece.start) {
      ++sep_idx;
    }
    if (sep_idx < renderer.separators.size() &&
        renderer.separators[sep_idx].span == piece) {
      emit(piece, renderer.separators[sep_idx].tag);
      continue;
    }
    // Gap between separators: every rendered line is its own segment.
    std::size_t line_start = piece.start;
    while (line_start < piece.end) {
      std::size_t nl = full.find('\n', line_start);
      std::size_t line_end = (nl == std::string::npos || nl > piece.end) ? piece.end : nl;
      CharSpan line = trim({line_start, line_end});
      if (!line.empty()) emit(line, tag_of_gap(line));
      line_start = line_end + 1;
    }
  }
  return result;
}

std::vector<TextSegment> detect_titles(std::vector<TextSegment> segments,
                                       const std::vector<std::string>& title_terms) {
  std::vector<std::vector<std::string>> term_tokens;
  term_tokens.reserve(title_terms.size());
  for (const auto& term : title_terms) {
    auto toks = text::tokenize(text::normalize_match(term));
    if (toks.empty()) continue;
    std::vector<std::string> words;
    words.reserve(toks.size());
    for (auto& t : toks) words.push_back(std::move(t.text));
    term_tokens.push_back(std::move(words));
  }

  for (auto& seg : segments) {
    if (seg.is_title) continue;
    if (text::word_count(seg.text) > 3) continue;
    auto toks = text::tokenize(text::normalize_match(seg.text));
    std::vector<std::string> words;
    words.reserve(toks.size());
    for (auto& t : toks) words.push_back(std::move(t.text));
    for (const auto& term : term_tokens) {
      if (term.size() > words.size()) continue;
      for (std::size_t i = 0; i + term.size() <= words.size(); ++i) {
        if (std::equal(term.begin(), term.end(), words.begin() + i)) {
          seg.is_title = true;
          break;
        }
      }
      if (seg.is_title) break;
    }
  }
  return segments;
}

std::vector<SegmentCluster> build_clusters(const std::vector<TextSegment>& segments) {
  std::vector<SegmentCluster> clusters;
  for (const auto& seg : segments) {
    if (seg.is_title || clusters.empty()) {
      SegmentCluster cluster;
      cluster.char_span = seg.char_span;
      if (seg.is_title) {
        cluster.title = seg;
      } else {
        cluster.body.push_back(seg);
      }
      clusters.push_back(std::move(cluster));
    } else {
      clusters.back().body.push_back(seg);
      clusters.back().char_span.end = seg.char_span.end;
    }
  }
  return clusters;
}

SegmentType classify_cluster(const SegmentCluster& cluster, const TermIndex& term_index) {
  if (!cluster.title.has_value()) return SegmentType::Unknown;
  auto toks = text::tokenize(text::normalize_match(cluster.title->text));
  std::vector<std::string> words;
  words.reserve(toks.size());
  for (auto& t : toks) words.push_back(std::move(t.text));

  std::size_t best_len = 0;
  SegmentType best = SegmentType::Unknown;
  for (const auto& [term, type] : term_index) {
    auto term_toks = text::tokenize(term);
    if (term_toks.empty() || term_toks.size() > words.size()) continue;
    bool found = false;
    for (std::size_t i = 0; i + term_toks.size() <= words.size() && !found; ++i) {
      found = true;
      for (std::size_t j = 0; j < term_toks.size(); ++j) {
        if (words[i + j] != term_toks[j].text) {
          found = false;
          break;
        }
      }
    }
    if (!found) continue;
    if (term_toks.size() > best_len ||
        (term_toks.size() == best_len && static_cast<int>(type) < static_cast<int>(best))) {
      best_len = term_toks.size();
      best = type;
    }
  }
  return best;
}

std::vector<SegmentCluster> segment_document(const HtmlDocument& doc,
                                             const std::vector<std::string>& title_terms,
                                             const TermIndex& term_index,
                                             std::string* normalized_text) {
  auto extraction = extract_text(doc);
  if (normalized_text != nullptr) *normalized_text = extraction.normalized_text;
  auto segments = detect_titles(std::move(extraction.segments), title_terms);
  auto clusters = build_clusters(segments);
  for (auto& cluster : clusters) {
    cluster.seg_type = classify_cluster(cluster, term_index);
  }
  return clusters;
}

std::vector<SegmentCluster> segment_plain_text(std::string_view text,
                                               const std::vector<std::string>& title_terms,
                                               const TermIndex& term_index) {
  std::vector<TextSegment> segments;
  std::size_t order = 0;
  std::size_t line_start = 0;
  while (line_start <= text.size()) {
    std::size_t nl = text.find('\n', line_start);
    std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    CharSpan span{line_start, line_end};
    while (span.start < span.end && text[span.start] == ' ') ++span.start;
    while (span.end > span.start && text[span.end - 1] == ' ') --span.end;
    if (!span.empty()) {
      TextSegment seg;
      seg.char_span = span;
      seg.text = std::string(text.substr(span.start, span.length()));
      seg.order = order++;
      segments.push_back(std::move(seg));
    }
    if (nl == std::string_view::npos) break;
    line_start = nl + 1;
  }
  segments = detect_titles(std::move(segments), title_terms);
  auto clusters = build_clusters(segments);
  for (auto& cluster : clusters) {
    cluster.seg_type = classify_cluster(cluster, term_index);
  }
  return clusters;
}

}  // namespace segmenter
}  // namespace edukg
