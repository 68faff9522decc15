#include "edukg/pipeline.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace edukg;
using namespace edukg::pipeline;

namespace {

namespace fs = std::filesystem;

PipelineConfig sample_config(const fs::path& out_dir) {
  auto config = PipelineConfig::from_file(testsupport::source_dir() / "data/sample_config.json");
  // Paths in the config file are relative to the repo root.
  config.input_dir = testsupport::source_dir() / config.input_dir;
  for (auto& p : config.ontology_paths) p = testsupport::source_dir() / p;
  config.output_dir = out_dir;
  config.profile_path = out_dir / "profile.json";
  config.report_path = out_dir / "report.json";
  return config;
}

std::ostringstream g_null;

}  // namespace

TEST_CASE("config parses fields and rejects bad weights") {
  auto config = PipelineConfig::from_json(R"({
    "input_dir": "docs",
    "ontology": ["a.tsv", "b.tsv"],
    "provider_map": {"p1": "edu:s1"},
    "linker_weights": [2.0, 1.0, 0.5],
    "output": {"dir": "o", "formats": ["nt"]},
    "workers": 3
  })", "<mem>");
  CHECK(config.input_dir == "docs");
  CHECK(config.ontology_paths.size() == 2);
  CHECK(config.provider_map.at("p1") == "edu:s1");
  CHECK(config.linker_weights.cluster_type == doctest::Approx(2.0));
  CHECK(config.output_formats == std::vector<std::string>{"nt"});
  CHECK(config.workers == 3);

  CHECK_THROWS_AS(PipelineConfig::from_json(R"({"linker_weights": [1.0]})", "<mem>"),
                  std::runtime_error);
  CHECK_THROWS_AS(PipelineConfig::from_json(R"({"workers": 0})", "<mem>"),
                  std::runtime_error);
}

TEST_CASE("load_corpus walks provider subdirectories and applies metadata") {
  auto corpus = load_corpus(testsupport::source_dir() / "data/sample_corpus");
  REQUIRE(corpus.size() == 8);
  std::map<std::string, const HtmlDocument*> by_id;
  for (const auto& doc : corpus) by_id[doc.id] = &doc;
  CHECK(by_id.at("c01")->provider_id == "sae");
  CHECK(by_id.at("c01")->url == "https://sae.edu/courses/c01.html");
  CHECK(by_id.at("t02")->provider_id == "techakademie");
  CHECK(by_id.at("b01")->provider_id == "bizschool");
  // Latin-1 page was transcoded on load.
  CHECK(by_id.at("b02")->html.find("F\xC3\xBChrung") != std::string::npos);
}

TEST_CASE("annotate on the running example routes entities by segment") {
  auto store = testsupport::tiny_store();
  Engine engine(testsupport::tiny_profile(), store, {}, CueLexicon::defaults(), false);
  HtmlDocument doc;
  doc.id = "c01";
  doc.url = "https://sae.edu/c01";
  doc.provider_id = "sae";
  doc.html =
      "<h2>Lehrinhalte</h2><p>Grundlagen der Programmierung</p>"
      "<h2>Voraussetzungen</h2><p>Programmierung und Matura</p>";
  auto annotated = engine.annotate(doc);
  REQUIRE(annotated.clusters.size() == 2);
  CHECK(annotated.clusters[0].seg_type == SegmentType::CourseContent);
  CHECK(annotated.clusters[1].seg_type == SegmentType::Prerequisite);

  auto assignments = slotfill::contextualize(doc.id, annotated.clusters,
                                             annotated.mentions, engine.schema());
  bool content = false;
  bool prereq = false;
  for (const auto& a : assignments) {
    if (a.entity_id == "edu:prog" && a.slot == SlotName::CourseContent) content = true;
    if (a.entity_id == "edu:prog" && a.slot == SlotName::Prerequisite) prereq = true;
  }
  CHECK(content);
  CHECK(prereq);
}

TEST_CASE("run_extraction over the sample corpus is deterministic") {
  auto config = sample_config(fs::temp_directory_path() / "edukg_run1");
  auto store = ontology::load_ontology(config.ontology_paths);
  Engine engine(ontology::build_profile(store), store, config.linker_weights,
                CueLexicon::defaults(), true);

  auto corpus = load_corpus(config.input_dir);
  std::ostringstream log;
  auto first = run_extraction(engine, corpus, config, log);
  auto second = run_extraction(engine, corpus, config, log);
  CHECK(first.report.documents == 8);
  CHECK(first.report.failed == 0);
  CHECK(kg::serialize_ntriples(first.triples) == kg::serialize_ntriples(second.triples));

  // Worker count must not change the output.
  auto config4 = config;
  config4.workers = 4;
  auto parallel = run_extraction(engine, corpus, config4, log);
  CHECK(kg::serialize_ntriples(parallel.triples) == kg::serialize_ntriples(first.triples));

  // Every document contributes statements and the report counts them.
  CHECK(first.report.statements.total == first.triples.size());
  CHECK(first.report.statements.by_predicate.count("course_content") > 0);

  // Recount per predicate straight from the triples.
  std::map<std::string, std::size_t> recount;
  for (const auto& t : first.triples) {
    std::string local = t.predicate.substr(t.predicate.find_last_of("#/") + 1);
    recount[local] += 1;
  }
  CHECK(recount == first.report.statements.by_predicate);
}

TEST_CASE("school slot comes from the provider map; missing mapping is reported") {
  auto config = sample_config(fs::temp_directory_path() / "edukg_run2");
  auto store = ontology::load_ontology(config.ontology_paths);
  Engine engine(ontology::build_profile(store), store, config.linker_weights,
                CueLexicon::defaults(), true);
  auto output = run_extraction(engine, load_corpus(config.input_dir), config, g_null);

  bool sae_school = false;
  for (const auto& t : output.triples) {
    if (t.subject == "https://sae.edu#c01" &&
        t.predicate == config.namespaces.edu + "school" &&
        t.object == config.namespaces.edu + "sae") {
      sae_school = true;
    }
  }
  CHECK(sae_school);
  // bizschool has no provider mapping and no School mention.
  bool b01_noschool = false;
  for (const auto& v : output.report.violations) {
    if (v.course_id == "b01" && v.slot == SlotName::School && v.below_min) {
      b01_noschool = true;
    }
  }
  CHECK(b01_noschool);
}

TEST_CASE("cmd_build_profile writes a loadable, reproducible profile") {
  auto out_dir = fs::temp_directory_path() / "edukg_profile_cmd";
  fs::remove_all(out_dir);
  fs::create_directories(out_dir);
  auto config = sample_config(out_dir);
  std::ostringstream log;
  REQUIRE(cmd_build_profile(config, log) == 0);
  auto profile = ElProfile::load(config.profile_path);
  CHECK(profile.entities.size() == 22);
  CHECK(log.str().find("surface keys") != std::string::npos);

  // Rebuild on unchanged files: identical hash.
  std::string hash = profile.version_hash;
  REQUIRE(cmd_build_profile(config, log) == 0);
  CHECK(ElProfile::load(config.profile_path).version_hash == hash);

  auto bad = config;
  bad.ontology_paths = {"/nonexistent/x.tsv"};
  CHECK_THROWS_AS(cmd_build_profile(bad, log), std::runtime_error);
}

TEST_CASE("cmd_extract writes byte-identical kg.nt across runs") {
  auto read_file = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), {});
  };
  auto dir1 = fs::temp_directory_path() / "edukg_extract1";
  auto dir2 = fs::temp_directory_path() / "edukg_extract2";
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  std::ostringstream log;
  REQUIRE(cmd_extract(sample_config(dir1), log) == 0);
  REQUIRE(cmd_extract(sample_config(dir2), log) == 0);
  auto nt1 = read_file(dir1 / "kg.nt");
  CHECK_FALSE(nt1.empty());
  CHECK(nt1 == read_file(dir2 / "kg.nt"));
  // The turtle output parses back to the same triple set.
  auto config = sample_config(dir1);
  CHECK(kg::parse_turtle(read_file(dir1 / "kg.ttl")) == kg::parse_ntriples(nt1));
}

TEST_CASE("extract can export the silver dataset alongside the KG") {
  auto out_dir = fs::temp_directory_path() / "edukg_silver_cmd";
  fs::remove_all(out_dir);
  auto config = sample_config(out_dir);
  config.silver_path = out_dir / "silver.tsv";
  std::ostringstream log;
  REQUIRE(cmd_extract(config, log) == 0);
  std::ifstream in(config.silver_path, std::ios::binary);
  std::string first_line;
  std::getline(in, first_line);
  CHECK(first_line == "# edukg-silver v1");
}

TEST_CASE("empty input directory produces an empty KG with zero counts") {
  auto in_dir = fs::temp_directory_path() / "edukg_empty_in";
  auto out_dir = fs::temp_directory_path() / "edukg_empty_out";
  fs::remove_all(in_dir);
  fs::remove_all(out_dir);
  fs::create_directories(in_dir);
  auto config = sample_config(out_dir);
  config.input_dir = in_dir;
  std::ostringstream log;
  REQUIRE(cmd_extract(config, log) == 0);
  std::ifstream nt(out_dir / "kg.nt", std::ios::binary);
  std::string content((std::istreambuf_iterator<char>(nt)), {});
  CHECK(content.empty());
}

TEST_CASE("cmd_eval with predictions from gold scores all tasks at 1.0") {
  namespace fs = std::filesystem;
  auto gold_dir = fs::temp_directory_path() / "edukg_eval_gold";
  auto out_dir = fs::temp_directory_path() / "edukg_eval_out";
  fs::remove_all(gold_dir);
  fs::remove_all(out_dir);
  fs::create_directories(gold_dir);
  {
    std::ofstream g(gold_dir / "d1.json");
    g << R"({"doc_id": "d1", "text": "Python Kurs mit Matura",
             "segments": [{"start": 0, "end": 11, "type": "course_content"}],
             "mentions": [{"start": 0, "end": 6, "etype": "skill", "entity_id": "edu:python"},
                          {"start": 16, "end": 22, "etype": "education", "entity_id": "edu:matura"}],
             "slots": [{"slot": "course_content", "entity_id": "edu:python"}]})";
  }
  auto config = sample_config(out_dir);
  EvalOptions options;
  options.gold_path = gold_dir;
  options.predictions_from_gold = true;
  options.out_dir = out_dir;
  std::ostringstream log;
  REQUIRE(cmd_eval(config, options, log) == 0);

  std::ifstream report_file(out_dir / "eval_report.json");
  std::string report((std::istreambuf_iterator<char>(report_file)), {});
  CHECK(report.find("\"f1\": 1.0") != std::string::npos);
  CHECK(report.find("\"f1\": 0.0") == std::string::npos);
  CHECK(log.str().find("T6") != std::string::npos);
}

TEST_CASE("cmd_eval runs the pipeline over gold html and writes fold reports") {
  namespace fs = std::filesystem;
  auto gold_dir = fs::temp_directory_path() / "edukg_eval_gold2";
  auto out_dir = fs::temp_directory_path() / "edukg_eval_out2";
  fs::remove_all(gold_dir);
  fs::remove_all(out_dir);
  fs::create_directories(gold_dir);
  for (int i = 0; i < 4; ++i) {
    std::ofstream g(gold_dir / ("d" + std::to_string(i) + ".json"));
    // Text as rendered by the segmenter from the html below.
    g << R"({"doc_id": "d)" << i << R"(",
             "html": "<h2>Lehrinhalte</h2><p>Grundlagen der Programmierung</p>",
             "text": "Lehrinhalte\nGrundlagen der Programmierung",
             "segments": [{"start": 0, "end": 41, "type": "course_content"}],
             "mentions": [{"start": 27, "end": 41, "etype": "skill", "entity_id": "edu:prog"}]})";
  }
  auto config = sample_config(out_dir);
  EvalOptions options;
  options.gold_path = gold_dir;
  options.tasks = {Task::T1, Task::T2, Task::T3, Task::T5};
  options.kfolds = 2;
  options.out_dir = out_dir;
  std::ostringstream log;
  REQUIRE(cmd_eval(config, options, log) == 0);
  CHECK(fs::exists(out_dir / "eval_fold_0.json"));
  CHECK(fs::exists(out_dir / "eval_fold_1.json"));
  CHECK(fs::exists(out_dir / "eval_report.json"));
  CHECK(fs::exists(out_dir / "eval_report.txt"));
}

TEST_CASE("to_prediction drops Unknown clusters and keeps provenance links") {
  auto store = testsupport::tiny_store();
  Engine engine(testsupport::tiny_profile(), store, {}, CueLexicon::defaults(), false);
  HtmlDocument doc;
  doc.id = "d";
  doc.html = "<p>Ohne Titel Python</p><h2>Lehrinhalte</h2><p>Programmierung</p>";
  auto annotated = engine.annotate(doc);
  auto assignments = slotfill::contextualize(doc.id, annotated.clusters,
                                             annotated.mentions, engine.schema());
  auto pred = to_prediction(annotated, assignments);
  // Only the classified cluster is a predicted segment.
  REQUIRE(pred.segments.size() == 1);
  CHECK(pred.segments[0].type == SegmentType::CourseContent);
  REQUIRE(!pred.slots.empty());
  bool any_linked = false;
  for (const auto& v : pred.slots) {
    if (v.mention_index >= 0) {
      REQUIRE(static_cast<std::size_t>(v.mention_index) < pred.mentions.size());
      CHECK(pred.mentions[static_cast<std::size_t>(v.mention_index)].entity_id == v.entity_id);
      any_linked = true;
    }
  }
  CHECK(any_linked);
}
