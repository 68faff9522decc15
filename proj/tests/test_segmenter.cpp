#include "edukg/segmenter.hpp"

#include <cstdint>
#include <random>
#include <set>

#include "doctest.h"
#include "support.hpp"

using namespace edukg;
using namespace edukg::segmenter;

namespace {

HtmlDocument doc_of(std::string html) {
  HtmlDocument doc;
  doc.id = "test";
  doc.html = std::move(html);
  return doc;
}

std::vector<std::string> segment_texts(const ExtractionResult& result) {
  std::vector<std::string> out;
  for (const auto& seg : result.segments) out.push_back(seg.text);
  return out;
}

}  // namespace

TEST_CASE("two sibling paragraphs become two segments") {
  auto result = extract_text(doc_of("<p>Voraussetzungen</p><p>Programmierung</p>"));
  CHECK(segment_texts(result) ==
        std::vector<std::string>{"Voraussetzungen", "Programmierung"});
  CHECK_FALSE(result.segments[0].is_title);
  CHECK_FALSE(result.segments[1].is_title);
}

TEST_CASE("only innermost separator elements split") {
  auto result = extract_text(doc_of("<div><div><p>A</p><p>B</p></div></div>"));
  CHECK(segment_texts(result) == std::vector<std::string>{"A", "B"});
}

TEST_CASE("empty input yields no segments") {
  auto result = extract_text(doc_of(""));
  CHECK(result.normalized_text.empty());
  CHECK(result.segments.empty());
}

TEST_CASE("headings are titles, scripts and comments are dropped") {
  auto result = extract_text(doc_of(
      "<body><script>ignore()</script><!-- weg --><h2>Inhalt</h2><p>Mehr Text</p></body>"));
  REQUIRE(result.segments.size() == 2);
  CHECK(result.segments[0].text == "Inhalt");
  CHECK(result.segments[0].is_title);
  CHECK(result.segments[0].source_tag == "h2");
  CHECK(result.segments[1].text == "Mehr Text");
  CHECK_FALSE(result.segments[1].is_title);
}

TEST_CASE("segment text equals the normalized-text slice") {
  auto result = extract_text(doc_of(
      "<div>intro <b>bold</b><p>Eins  und   zwei</p>tail</div>"));
  for (const auto& seg : result.segments) {
    CHECK(seg.text ==
          result.normalized_text.substr(seg.char_span.start, seg.char_span.length()));
  }
  // Mixed element: direct text splits around the inner paragraph.
  CHECK(segment_texts(result) ==
        std::vector<std::string>{"intro bold", "Eins und zwei", "tail"});
}

TEST_CASE("plain text in a single body is one segment (idempotence)") {
  auto result = extract_text(doc_of("<body>Nur   ein Text</body>"));
  REQUIRE(result.segments.size() == 1);
  CHECK(result.segments[0].text == "Nur ein Text");
}

// ---------------------------------------------------------------------------
// Synthetic-suite oracle: documents are generated from an explicit tree, the
// expected segments are computed from that tree directly, and the extractor
// must reproduce them from the rendered HTML.
// ---------------------------------------------------------------------------

namespace {

struct TreeNode {
  std::string tag;  // empty = text node
  std::string text;
  std::vector<TreeNode> children;
};

struct ExpectedSegment {
  std::string text;
  bool is_title;
};

class SyntheticDoc {
 public:
  explicit SyntheticDoc(std::uint32_t seed) : rng_(seed) {
    root_.tag = "body";
    int sections = 1 + static_cast<int>(rng_() % 5);
    for (int i = 0; i < sections; ++i) {
      root_.children.push_back(make_section(0));
    }
  }

  std::string html() const {
    std::string out;
    render(root_, out);
    return out;
  }

  // Independent oracle walk over the generator tree.
  std::vector<ExpectedSegment> expected() const {
    std::vector<ExpectedSegment> out;
    collect(root_, out);
    return out;
  }

 private:
  std::string word() {
    static const char* kWords[] = {"Alpha", "Beta",  "Gamma", "Delta", "Kurs",
                                   "Lernen", "Modul", "Thema", "Praxis", "Zürich"};
    return kWords[rng_() % 10];
  }

  TreeNode text_node(int words) {
    TreeNode node;
    for (int i = 0; i < words; ++i) {
      if (!node.text.empty()) node.text += ' ';
      node.text += word();
    }
    return node;
  }

  TreeNode inner_separator() {
    static const char* kTags[] = {"p", "li", "dd", "h2", "h3", "div"};
    TreeNode node;
    node.tag = kTags[rng_() % 6];
    int words = 1 + static_cast<int>(rng_() % 4);
    if (rng_() % 3 == 0) {
      // Inline wrapper inside the separator.
      TreeNode inline_node;
      inline_node.tag = rng_() % 2 == 0 ? "span" : "b";
      inline_node.children.push_back(text_node(words));
      node.children.push_back(std::move(inline_node));
    } else {
      node.children.push_back(text_node(words));
    }
    return node;
  }

  TreeNode make_section(int depth) {
    std::uint32_t pick = rng_() % 10;
    if (depth >= 2 || pick < 5) return inner_separator();
    TreeNode node;
    node.tag = depth == 0 && pick == 9 ? "section" : "div";
    if (pick < 8) {
      int kids = 1 + static_cast<int>(rng_() % 3);
      for (int i = 0; i < kids; ++i) node.children.push_back(make_section(depth + 1));
    } else {
      // Mixed content: text runs around an inner separator.
      node.children.push_back(text_node(1 + static_cast<int>(rng_() % 2)));
      node.children.push_back(inner_separator());
      node.children.push_back(text_node(1 + static_cast<int>(rng_() % 2)));
    }
    return node;
  }

  void render(const TreeNode& node, std::string& out) const {
    if (node.tag.empty()) {
      out += node.text;
      return;
    }
    out += "<" + node.tag + ">";
    for (const auto& child : node.children) render(child, out);
    out += "</" + node.tag + ">";
    out += "\n  ";  // inter-block noise the renderer must collapse
  }

  static bool contains_separator(const TreeNode& node) {
    static const std::set<std::string> kM = {"div", "p",  "li", "td", "th",
                                             "dt",  "dd", "summary", "legend",
                                             "h1", "h2", "h3", "h4", "h5", "h6"};
    for (const auto& child : node.children) {
      if (!child.tag.empty() && (kM.count(child.tag) > 0 || contains_separator(child))) {
        return true;
      }
    }
    return false;
  }

  static std::string subtree_text(const TreeNode& node) {
    if (node.tag.empty()) return node.text;
    std::string out;
    for (const auto& child : node.children) {
      std::string part = subtree_text(child);
      if (part.empty()) continue;
      if (!out.empty()) out += ' ';
      out += part;
    }
    return out;
  }

  static void collect(const TreeNode& node, std::vector<ExpectedSegment>& out) {
    static const std::set<std::string> kM = {"div", "p",  "li", "td", "th",
                                             "dt",  "dd", "summary", "legend",
                                             "h1", "h2", "h3", "h4", "h5", "h6"};
    bool is_m = !node.tag.empty() && kM.count(node.tag) > 0;
    if (is_m && !contains_separator(node)) {
      std::string text = subtree_text(node);
      if (!text.empty()) {
        out.push_back({text, node.tag[0] == 'h' && node.tag.size() == 2});
      }
      return;
    }
    // Gap runs: consecutive text children between separators.
    std::string gap;
    bool gap_title = !node.tag.empty() && node.tag[0] == 'h' && node.tag.size() == 2;
    auto flush = [&]() {
      if (!gap.empty()) {
        out.push_back({gap, gap_title});
        gap.clear();
      }
    };
    for (const auto& child : node.children) {
      if (child.tag.empty()) {
        if (!gap.empty()) gap += ' ';
        gap += child.text;
      } else if (child.tag == "span" || child.tag == "b") {
        if (!gap.empty()) gap += ' ';
        gap += subtree_text(child);
      } else {
        flush();
        collect(child, out);
      }
    }
    flush();
  }

  std::mt19937 rng_;
  TreeNode root_;
};

}  // namespace

TEST_CASE("20-document synthetic suite matches the tree oracle") {
  for (std::uint32_t seed = 1; seed <= 20; ++seed) {
    CAPTURE(seed);
    SyntheticDoc synthetic(seed);
    auto result = extract_text(doc_of(synthetic.html()));
    auto expected = synthetic.expected();

    REQUIRE(result.segments.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CAPTURE(i);
      CHECK(result.segments[i].text == expected[i].text);
      CHECK(result.segments[i].is_title == expected[i].is_title);
    }
    // Non-overlap, ordering, and exact slices.
    for (std::size_t i = 0; i < result.segments.size(); ++i) {
      const auto& seg = result.segments[i];
      CHECK(seg.char_span.start < seg.char_span.end);
      CHECK(seg.text == result.normalized_text.substr(seg.char_span.start,
                                                      seg.char_span.length()));
      if (i > 0) {
        CHECK(result.segments[i - 1].char_span.end <= seg.char_span.start);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Title detection and clustering
// ---------------------------------------------------------------------------

namespace {

TextSegment seg(std::string text, bool is_title = false) {
  TextSegment s;
  s.text = std::move(text);
  s.is_title = is_title;
  return s;
}

}  // namespace

TEST_CASE("detect_titles marks short segments containing a lexicon term") {
  std::vector<std::string> terms = {"Lehrinhalte", "Inhalt", "Voraussetzungen"};
  auto out = detect_titles({seg("Lehrinhalte"),
                            seg("Dieser Kurs vermittelt die Grundlagen der Programmierung"),
                            seg("Inhalt und Ziele"),
                            seg("Ohne Treffer")},
                           terms);
  CHECK(out[0].is_title);        // one word, exact term
  CHECK_FALSE(out[1].is_title);  // 8 words, over the 3-word bound
  CHECK(out[2].is_title);        // 3 words, contains "inhalt"
  CHECK_FALSE(out[3].is_title);
}

TEST_CASE("detect_titles uses the shipped lexicon") {
  auto store = edukg::ontology::load_ontology({testsupport::data_dir() / "title_lexicon.tsv"});
  auto terms = store.title_term_list();
  // Lexicon membership, checked independently of detect_titles.
  bool has_inhalt = false;
  for (const auto& t : terms) {
    if (edukg::text::normalize_match(t) == "inhalt") has_inhalt = true;
  }
  REQUIRE(has_inhalt);
  auto out = detect_titles({seg("Inhalt und Ziele")}, terms);
  CHECK(out[0].is_title);
}

TEST_CASE("detect_titles requires both the length bound and a lexicon hit") {
  std::vector<std::string> terms = {"Voraussetzungen"};
  auto out = detect_titles({seg("Kurze Notiz"), seg("Voraussetzungen und alle weiteren Punkte")},
                           terms);
  CHECK_FALSE(out[0].is_title);  // short but no term
  CHECK_FALSE(out[1].is_title);  // term but 5 words
}

TEST_CASE("build_clusters merges until the next title") {
  auto clusters = build_clusters({seg("T1", true), seg("b1"), seg("b2"),
                                  seg("T2", true), seg("b3")});
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].title->text == "T1");
  CHECK(clusters[0].body.size() == 2);
  CHECK(clusters[1].title->text == "T2");
  CHECK(clusters[1].body.size() == 1);
}

TEST_CASE("leading body segments form a title-less cluster") {
  // Oracle: a one-pass fold over the same input.
  std::vector<TextSegment> input = {seg("b0"), seg("T1", true), seg("b1")};
  std::size_t expected_clusters = 0;
  bool open = false;
  for (const auto& s : input) {
    if (s.is_title || !open) {
      ++expected_clusters;
      open = true;
    }
  }
  auto clusters = build_clusters(input);
  REQUIRE(clusters.size() == expected_clusters);
  CHECK_FALSE(clusters[0].title.has_value());
  CHECK(clusters[0].seg_type == SegmentType::Unknown);
  CHECK(clusters[0].body.size() == 1);
  CHECK(clusters[1].title->text == "T1");
}

TEST_CASE("build_clusters of nothing is nothing") {
  CHECK(build_clusters({}).empty());
}

TEST_CASE("segment coverage: clusters reproduce every segment exactly once") {
  auto result = extract_text(doc_of(
      "<h1>Kurs</h1><p>Intro</p><h2>Inhalt</h2><p>Eins</p><p>Zwei</p>"));
  auto clusters = build_clusters(result.segments);
  std::vector<std::string> collected;
  for (const auto& c : clusters) {
    if (c.title) collected.push_back(c.title->text);
    for (const auto& b : c.body) collected.push_back(b.text);
  }
  CHECK(collected == segment_texts(result));
  // Cluster spans are strictly increasing and non-overlapping.
  for (std::size_t i = 1; i < clusters.size(); ++i) {
    CHECK(clusters[i - 1].char_span.end <= clusters[i].char_span.start);
    CHECK(clusters[i - 1].char_span.start < clusters[i].char_span.start);
  }
}

TEST_CASE("classify_cluster picks the longest match with enum-order ties") {
  TermIndex index = {
      {"voraussetzungen", SegmentType::Prerequisite},
      {"lehrinhalte", SegmentType::CourseContent},
      {"inhalt", SegmentType::CourseContent},
      {"ziele", SegmentType::LearningObjective},
      {"inhalt und ziele", SegmentType::TargetGroup},
  };
  auto cluster_with_title = [](std::string title) {
    SegmentCluster c;
    c.title = TextSegment{};
    c.title->text = std::move(title);
    return c;
  };
  CHECK(classify_cluster(cluster_with_title("Voraussetzungen"), index) ==
        SegmentType::Prerequisite);
  CHECK(classify_cluster(cluster_with_title("Lehrinhalte"), index) ==
        SegmentType::CourseContent);
  CHECK(classify_cluster(cluster_with_title("Unsere Ziele"), index) ==
        SegmentType::LearningObjective);
  // Three-token sequence beats the single-token entries.
  CHECK(classify_cluster(cluster_with_title("Inhalt und Ziele"), index) ==
        SegmentType::TargetGroup);
  // Equal length (1 token each): enum order LearningObjective < CourseContent.
  TermIndex tie = {{"kompakt", SegmentType::CourseContent},
                   {"ueberblick", SegmentType::LearningObjective}};
  CHECK(classify_cluster(cluster_with_title("Überblick kompakt"), tie) ==
        SegmentType::LearningObjective);
  SegmentCluster untitled;
  CHECK(classify_cluster(untitled, index) == SegmentType::Unknown);
}

TEST_CASE("plain-text segmentation keeps the text's own coordinates") {
  std::string text = "Voraussetzungen\nMatura oder Berufserfahrung\n\nInhalte\nPython Grundlagen";
  std::vector<std::string> terms = {"Voraussetzungen", "Inhalte"};
  TermIndex index = {{"voraussetzungen", SegmentType::Prerequisite},
                     {"inhalte", SegmentType::CourseContent}};
  auto clusters = segment_plain_text(text, terms, index);
  REQUIRE(clusters.size() == 2);
  CHECK(clusters[0].seg_type == SegmentType::Prerequisite);
  CHECK(clusters[0].title->text == "Voraussetzungen");
  CHECK(clusters[1].seg_type == SegmentType::CourseContent);
  REQUIRE(clusters[1].body.size() == 1);
  const auto& body = clusters[1].body[0];
  CHECK(text.substr(body.char_span.start, body.char_span.length()) == "Python Grundlagen");
}

TEST_CASE("classification is deterministic across repeated calls") {
  TermIndex index = {{"inhalt", SegmentType::CourseContent}};
  SegmentCluster c;
  c.title = TextSegment{};
  c.title->text = "Inhalt";
  auto first = classify_cluster(c, index);
  for (int i = 0; i < 10; ++i) CHECK(classify_cluster(c, index) == first);
}
