#include "edukg/recognizer.hpp"

#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace edukg;
using namespace edukg::recognizer;

namespace {

AnnotatedDocument make_annotated(const std::string& html, const std::string& id = "d1") {
  auto store = testsupport::tiny_store();
  auto profile = testsupport::tiny_profile();
  HtmlDocument doc;
  doc.id = id;
  doc.html = html;
  AnnotatedDocument out;
  out.doc_id = id;
  out.clusters = segmenter::segment_document(doc, store.title_term_list(),
                                             store.term_index(), &out.text);
  out.mentions = linker::link_document(out.text, out.clusters, profile);
  return out;
}

std::string export_to_string(const std::vector<AnnotatedDocument>& corpus) {
  std::ostringstream out;
  export_silver(corpus, out);
  return out.str();
}

}  // namespace

TEST_CASE("silver export projects linked mentions as BIO tags") {
  auto doc = make_annotated("<h2>Lehrinhalte</h2><p>Grundlagen der Programmierung</p>");
  std::string exported = export_to_string({doc});
  CHECK(exported.find("# edukg-silver v1") == 0);
  CHECK(exported.find("Grundlagen\tO\nder\tO\nProgrammierung\tB-SKILL\n") != std::string::npos);
}

TEST_CASE("a two-token mention exports as B-X I-X") {
  auto doc = make_annotated("<p>Java SE lernen</p>");
  std::string exported = export_to_string({doc});
  CHECK(exported.find("Java\tB-SKILL\nSE\tI-SKILL\nlernen\tO\n") != std::string::npos);
}

TEST_CASE("empty corpus exports just the header") {
  CHECK(export_to_string({}) == "# edukg-silver v1\n");
}

TEST_CASE("documents without mentions are still exported, all O") {
  auto doc = make_annotated("<p>gar nichts bekanntes</p>");
  std::string exported = export_to_string({doc});
  CHECK(exported.find("gar\tO\nnichts\tO\nbekanntes\tO\n") != std::string::npos);
}

TEST_CASE("baseline recognizer picks capitalized runs typed by the cluster") {
  auto doc = make_annotated(
      "<h2>Lehrinhalte</h2><p>Einstieg in Quantencomputing und Python</p>");
  REQUIRE(doc.clusters.size() >= 1);
  auto found = recognize_document(doc, CueLexicon::defaults());
  // "Python" is linked, so only the unknown capitalized tokens remain.
  REQUIRE(found.size() == 2);
  CHECK(found[0].surface == "Einstieg");
  CHECK(found[1].surface == "Quantencomputing");
  CHECK(found[1].etype == EntityType::Topic);  // CourseContent -> Topic
  CHECK(found[1].origin == MentionOrigin::Recognized);
  CHECK(found[1].confidence == doctest::Approx(0.3));
}

TEST_CASE("baseline skips lowercase words and linked spans") {
  auto doc = make_annotated("<h2>Voraussetzungen</h2><p>nur Matura und etwas mehr</p>");
  auto found = recognize_document(doc, CueLexicon::defaults());
  // "Matura" is linked (excluded); everything else is lowercase except the title.
  for (const auto& m : found) {
    CHECK(m.surface != "Matura");
    CHECK(m.surface != "und");
  }
}

TEST_CASE("baseline runs cap at four tokens") {
  auto doc = make_annotated(
      "<h2>Lehrinhalte</h2><p>Eins Zwei Drei Vier Fuenf Sechs</p>");
  auto found = recognize_document(doc, CueLexicon::defaults());
  std::size_t longest = 0;
  for (const auto& m : found) {
    longest = std::max(longest, text::tokenize(m.surface).size());
  }
  CHECK(longest == 4);
}

TEST_CASE("unknown-typed clusters produce no baseline mentions") {
  auto doc = make_annotated("<p>Quantencomputing ohne Titel</p>");
  REQUIRE(doc.clusters.size() == 1);
  CHECK(doc.clusters[0].seg_type == SegmentType::Unknown);
  CHECK(recognize_document(doc, CueLexicon::defaults()).empty());
}

TEST_CASE("silver round-trip reproduces linked mentions as recognized ones") {
  std::vector<AnnotatedDocument> corpus = {
      make_annotated("<h2>Lehrinhalte</h2><p>Java SE und Python</p>"
                     "<h2>Voraussetzungen</h2><p>Matura</p>",
                     "a"),
      make_annotated("<p>Podcasting Design Python</p>", "b"),
  };
  std::istringstream in(export_to_string(corpus));
  auto imported = import_external(in, corpus);

  for (const auto& doc : corpus) {
    std::vector<Mention> linked;
    for (const auto& m : doc.mentions) {
      if (m.origin == MentionOrigin::Linked) linked.push_back(m);
    }
    const auto& back = imported[doc.doc_id];
    REQUIRE(back.size() == linked.size());
    for (std::size_t i = 0; i < linked.size(); ++i) {
      CHECK(back[i].char_span == linked[i].char_span);
      CHECK(back[i].etype == linked[i].etype);
      CHECK(back[i].origin == MentionOrigin::Recognized);
    }
  }
}

TEST_CASE("import decodes BIO sequences") {
  auto doc = make_annotated("<p>lernen Maschinelles Lernen</p>", "d1");
  std::istringstream in(
      "# edukg-silver v1\n# doc=d1\n# cluster=0\n"
      "lernen\tO\nMaschinelles\tB-SKILL\nLernen\tI-SKILL\n\n");
  auto imported = import_external(in, {doc});
  REQUIRE(imported["d1"].size() == 1);
  const auto& m = imported["d1"][0];
  CHECK(m.surface == "Maschinelles Lernen");
  CHECK(m.etype == EntityType::Skill);
}

TEST_CASE("token text mismatch aborts with the position") {
  auto doc = make_annotated("<p>eins zwei drei</p>", "d1");
  std::istringstream in(
      "# edukg-silver v1\n# doc=d1\n# cluster=0\n"
      "eins\tO\nZWEI\tO\ndrei\tO\n\n");
  CHECK_THROWS_WITH_AS(import_external(in, {doc}),
                       doctest::Contains("token position 1"), std::runtime_error);
}

TEST_CASE("an all-O file imports nothing") {
  auto doc = make_annotated("<p>eins zwei</p>", "d1");
  std::istringstream in("# edukg-silver v1\n# doc=d1\n# cluster=0\neins\tO\nzwei\tO\n\n");
  CHECK(import_external(in, {doc}).empty());
}

TEST_CASE("stray I tags are repaired as fresh mentions") {
  auto doc = make_annotated("<p>eins zwei</p>", "d1");
  std::istringstream in(
      "# edukg-silver v1\n# doc=d1\n# cluster=0\neins\tI-SKILL\nzwei\tI-TOPIC\n\n");
  ImportStats stats;
  auto imported = import_external(in, {doc}, &stats);
  REQUIRE(imported["d1"].size() == 2);
  CHECK(stats.repaired_tags == 2);
  CHECK(imported["d1"][0].etype == EntityType::Skill);
  CHECK(imported["d1"][1].etype == EntityType::Topic);
}

// ---------------------------------------------------------------------------
// NIL identifiers
// ---------------------------------------------------------------------------

namespace {

Mention recognized(const std::string& surface) {
  Mention m;
  m.surface = surface;
  m.origin = MentionOrigin::Recognized;
  return m;
}

}  // namespace

TEST_CASE("equal surfaces share one nil id; plural variants corefer") {
  auto rules = testsupport::shipped_rules();
  NilRegistry registry;
  auto out = assign_nil_ids(
      {recognized("Podcasting"), recognized("Podcastings"), recognized("Design"),
       recognized("Podcasting")},
      registry, rules);
  CHECK(out[0].entity_id == out[1].entity_id);  // plural stripped
  CHECK(out[0].entity_id == out[3].entity_id);
  CHECK(out[0].entity_id != out[2].entity_id);
  CHECK(out[0].entity_id.rfind("nil:", 0) == 0);
}

TEST_CASE("linked mentions pass through nil assignment untouched") {
  auto rules = testsupport::shipped_rules();
  NilRegistry registry;
  Mention linked;
  linked.surface = "Programmierung";
  linked.origin = MentionOrigin::Linked;
  linked.entity_id = "edu:prog";
  auto out = assign_nil_ids({linked}, registry, rules);
  CHECK(out[0].entity_id == "edu:prog");
  CHECK(registry.entries().empty());
}

TEST_CASE("nil assignment is idempotent and order-independent on id classes") {
  auto rules = testsupport::shipped_rules();
  auto classes_of = [&](std::vector<Mention> mentions) {
    NilRegistry registry;
    auto out = assign_nil_ids(std::move(mentions), registry, rules);
    // Partition by id: map surface -> set of co-identified surfaces.
    std::map<std::string, std::set<std::string>> by_id;
    for (const auto& m : out) by_id[m.entity_id].insert(rules.nil_key(m.surface));
    std::set<std::set<std::string>> classes;
    for (auto& [id, members] : by_id) classes.insert(members);
    return classes;
  };
  std::vector<Mention> forward = {recognized("Podcastings"), recognized("Design"),
                                  recognized("Podcasting")};
  std::vector<Mention> backward = {recognized("Podcasting"), recognized("Design"),
                                   recognized("Podcastings")};
  CHECK(classes_of(forward) == classes_of(backward));

  // Idempotence: re-running over already-assigned mentions changes nothing.
  NilRegistry registry;
  auto once = assign_nil_ids(forward, registry, rules);
  auto twice = assign_nil_ids(once, registry, rules);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].entity_id == twice[i].entity_id);
  }
}

TEST_CASE("registry merge keeps known keys and re-issues new ones") {
  auto rules = testsupport::shipped_rules();
  NilRegistry a;
  a.get_or_assign("alpha");
  NilRegistry b;
  b.get_or_assign("beta");
  b.get_or_assign("alpha");
  a.merge(b);
  CHECK(a.entries().size() == 2);
  CHECK(a.entries().at("alpha") == "nil:0");
  CHECK(a.entries().at("beta") == "nil:1");
}
