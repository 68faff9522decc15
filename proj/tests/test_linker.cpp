#include "edukg/linker.hpp"

#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace edukg;
using namespace edukg::linker;

namespace {

// One-cluster convenience wrapper.
std::vector<Mention> link_text(const std::string& text, const ElProfile& profile,
                               const LinkerWeights& weights = {}) {
  auto candidates = match_candidates(text, profile);
  return disambiguate(candidates, candidates, profile, weights);
}

}  // namespace

TEST_CASE("match_candidates finds a known surface form") {
  auto profile = testsupport::tiny_profile();
  std::string text = "Grundlagen der Programmierung";
  auto candidates = match_candidates(text, profile);
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].surface == "Programmierung");
  CHECK(candidates[0].entity_ids == std::vector<std::string>{"edu:prog"});
  CHECK(text.substr(candidates[0].char_span.start, candidates[0].char_span.length()) ==
        "Programmierung");
}

TEST_CASE("longest match wins over a shorter overlapping form") {
  OntologyStore store;
  EntityRecord machine{"e:machine", EntityType::Topic, "machine", {"machine"}, {}};
  EntityRecord ml{"e:ml", EntityType::Topic, "machine learning", {"machine learning"}, {}};
  store.by_id = {{"e:machine", 0}, {"e:ml", 1}};
  store.records = {machine, ml};
  auto profile = ontology::build_profile(store);

  auto candidates = match_candidates("we teach machine learning here", profile);
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].entity_ids == std::vector<std::string>{"e:ml"});
  CHECK(candidates[0].normalized == "machine learning");
}

TEST_CASE("text without known forms yields nothing") {
  auto profile = testsupport::tiny_profile();
  CHECK(match_candidates("vollkommen unbekannte woerter", profile).empty());
  CHECK(match_candidates("", profile).empty());
}

TEST_CASE("matching is normalization-aware (umlauts, case, plural variant)") {
  auto store = testsupport::tiny_store();
  store.variation_rules = testsupport::shipped_rules();
  auto profile = ontology::build_profile(store);
  // "PROGRAMMIERUNGEN" normalizes onto the generated plural variant.
  auto candidates = match_candidates("Kurs: PROGRAMMIERUNGEN!", profile);
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].entity_ids == std::vector<std::string>{"edu:prog"});
}

TEST_CASE("context-only forms come back flagged and never become mentions") {
  auto profile = testsupport::tiny_profile();
  auto candidates = match_candidates("Programmiersprache", profile);
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].context_only);
  auto mentions = disambiguate(candidates, candidates, profile);
  CHECK(mentions.empty());
}

TEST_CASE("unambiguous candidates resolve directly with confidence 1.0") {
  auto profile = testsupport::tiny_profile();
  auto mentions = link_text("Wir lernen Python im Kurs", profile);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].entity_id == "edu:python");
  CHECK(mentions[0].etype == EntityType::Skill);
  CHECK(mentions[0].confidence == doctest::Approx(1.0));
  CHECK(mentions[0].origin == MentionOrigin::Linked);
}

TEST_CASE("ambiguous Java resolves to the skill given skill context") {
  auto profile = testsupport::tiny_profile();
  // Cluster: unambiguous Skill "Python" + context term "Programmiersprache".
  // Hand-computed with defaults (w1, w2, w3) = (1.0, 0.5, 0.25):
  //   edu:java_skill: w1*1 (Python, same type) + w2*1 (context present)
  //                   + w3*(1 + 1) at document level           = 2.0
  //   edu:java_island: 0
  auto mentions = link_text("Java und Python als Programmiersprache", profile);
  REQUIRE(mentions.size() == 2);
  const Mention* java = nullptr;
  for (const auto& m : mentions) {
    if (m.surface == "Java") java = &m;
  }
  REQUIRE(java != nullptr);
  CHECK(java->entity_id == "edu:java_skill");
  CHECK(java->etype == EntityType::Skill);
  CHECK(java->confidence == doctest::Approx(1.0));  // 2.0 / 2.0
}

TEST_CASE("ambiguous form with no evidence takes the smallest id at 0.5") {
  auto profile = testsupport::tiny_profile();
  auto mentions = link_text("Java", profile);
  REQUIRE(mentions.size() == 1);
  CHECK(mentions[0].entity_id == "edu:java_island");  // lexicographically first
  CHECK(mentions[0].confidence == doctest::Approx(0.5));
}

TEST_CASE("document-level evidence alone can decide a cluster") {
  auto profile = testsupport::tiny_profile();
  // Cluster 1 holds the evidence; cluster 2 holds the ambiguous form.
  std::string text = "Python Programmierung\nJava";
  std::vector<SegmentCluster> clusters(2);
  clusters[0].char_span = {0, 21};
  clusters[1].char_span = {22, 26};
  auto mentions = link_document(text, clusters, profile);
  const Mention* java = nullptr;
  for (const auto& m : mentions) {
    if (m.surface == "Java") java = &m;
  }
  REQUIRE(java != nullptr);
  // Only w3 evidence: skill types seen at document level.
  CHECK(java->entity_id == "edu:java_skill");
  CHECK(java->cluster_ref == 1);
}

TEST_CASE("mention spans are pairwise disjoint and surfaces are matcher keys") {
  auto profile = testsupport::tiny_profile();
  std::string text = "Java SE und Java und Python und Programmierung Programmieren";
  auto mentions = link_text(text, profile);
  REQUIRE(!mentions.empty());
  for (std::size_t i = 0; i < mentions.size(); ++i) {
    CHECK(profile.forms.count(text::normalize_match(mentions[i].surface)) > 0);
    for (std::size_t j = i + 1; j < mentions.size(); ++j) {
      CHECK_FALSE(mentions[i].char_span.overlaps(mentions[j].char_span));
    }
  }
}

TEST_CASE("planted unambiguous forms are recalled perfectly") {
  auto profile = testsupport::tiny_profile();
  std::mt19937 rng(7);
  const std::vector<std::string> planted = {"Python", "Matura", "Podcasting", "Design"};
  const std::vector<std::string> filler = {"und", "mit", "dem", "zusammen", "xyzfoo"};
  for (int round = 0; round < 50; ++round) {
    std::string text;
    std::vector<std::string> expected;
    int n = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < n; ++i) {
      if (!text.empty()) text += ' ';
      if (rng() % 2 == 0) {
        const auto& p = planted[rng() % planted.size()];
        expected.push_back(p);
        text += p;
      } else {
        text += filler[rng() % filler.size()];
      }
    }
    auto mentions = link_text(text, profile);
    REQUIRE(mentions.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(mentions[i].surface == expected[i]);
      CHECK(mentions[i].confidence == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("identical inputs give identical mentions (determinism)") {
  auto profile = testsupport::tiny_profile();
  std::string text = "Java und Python als Programmiersprache; Matura als Voraussetzung";
  auto first = link_text(text, profile);
  for (int i = 0; i < 5; ++i) {
    auto again = link_text(text, profile);
    REQUIRE(again.size() == first.size());
    for (std::size_t m = 0; m < first.size(); ++m) {
      CHECK(again[m].entity_id == first[m].entity_id);
      CHECK(again[m].char_span == first[m].char_span);
      CHECK(again[m].confidence == doctest::Approx(first[m].confidence));
    }
  }
}

TEST_CASE("weights change the outcome as configured") {
  auto profile = testsupport::tiny_profile();
  // Zeroing all weights leaves no evidence: smallest id wins.
  LinkerWeights zero{0.0, 0.0, 0.0};
  auto mentions = link_text("Java und Python als Programmiersprache", profile, zero);
  const Mention* java = nullptr;
  for (const auto& m : mentions) {
    if (m.surface == "Java") java = &m;
  }
  REQUIRE(java != nullptr);
  CHECK(java->entity_id == "edu:java_island");
  CHECK(java->confidence == doctest::Approx(0.5));
}
