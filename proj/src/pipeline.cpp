#include "edukg/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "edukg/html.hpp"
#include "edukg/nif.hpp"
#include "edukg/slotfill.hpp"

namespace edukg {

using nlohmann::json;

PipelineConfig PipelineConfig::from_json(std::string_view json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw std::runtime_error(origin + ": " + e.what());
  }
  PipelineConfig config;
  config.input_dir = doc.value("input_dir", "");
  for (const auto& p : doc.value("ontology", json::array())) {
    config.ontology_paths.emplace_back(p.get<std::string>());
  }
  config.profile_path = doc.value("profile", "");
  if (doc.contains("provider_map")) {
    for (const auto& [provider, school] : doc["provider_map"].items()) {
      config.provider_map[provider] = school.get<std::string>();
    }
  }
  if (doc.contains("namespaces")) {
    const auto& ns = doc["namespaces"];
    config.namespaces.edu = ns.value("edu", config.namespaces.edu);
    config.namespaces.nil = ns.value("nil", config.namespaces.nil);
    config.namespaces.course = ns.value("course", config.namespaces.course);
  }
  if (doc.contains("linker_weights")) {
    const auto& w = doc["linker_weights"];
    if (!w.is_array() || w.size() != 3) {
      throw std::runtime_error(origin + ": linker_weights must be [w1, w2, w3]");
    }
    config.linker_weights.cluster_type = w[0].get<double>();
    config.linker_weights.cluster_context = w[1].get<double>();
    config.linker_weights.document = w[2].get<double>();
  }
  if (doc.contains("output")) {
    const auto& out = doc["output"];
    config.output_dir = out.value("dir", config.output_dir.string());
    if (out.contains("formats")) {
      config.output_formats.clear();
      for (const auto& f : out["formats"]) {
        config.output_formats.push_back(f.get<std::string>());
      }
    }
    config.report_path = out.value("report", "");
    config.silver_path = out.value("silver", "");
  }
  config.workers = doc.value("workers", 1u);
  if (config.workers < 1) throw std::runtime_error(origin + ": workers must be >= 1");
  config.seed = doc.value("seed", std::uint64_t{0});
  config.baseline_recognizer = doc.value("baseline_recognizer", true);
  config.external_annotations = doc.value("external_annotations", "");
  return config;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str(), path.string());
}

std::string RunReport::to_json() const {
  json doc;
  doc["profile_hash"] = profile_hash;
  doc["documents"] = documents;
  doc["failed"] = failed;
  doc["statements"] = {{"total", statements.total}};
  for (const auto& [predicate, count] : statements.by_predicate) {
    doc["statements"]["by_predicate"][predicate] = count;
  }
  json violations_json = json::array();
  for (const auto& v : violations) {
    violations_json.push_back({{"course_id", v.course_id},
                               {"slot", to_string(v.slot)},
                               {"kind", v.below_min ? "below_min" : "above_max"},
                               {"count", v.count},
                               {"bound", v.bound}});
  }
  doc["violations"] = std::move(violations_json);
  doc["errors"] = errors;
  return doc.dump(1);
}

namespace pipeline {

Engine::Engine(ElProfile profile, OntologyStore store, LinkerWeights weights,
               CueLexicon cues, bool baseline)
    : profile_(std::move(profile)),
      title_terms_(store.title_term_list()),
      term_index_(store.term_index()),
      schema_(ontology::slot_schema(store)),
      weights_(weights),
      cues_(std::move(cues)),
      baseline_(baseline) {}

void Engine::extract_entities(AnnotatedDocument& doc) const {
  doc.mentions = linker::link_document(doc.text, doc.clusters, profile_, weights_);
  if (baseline_) {
    auto recognized = recognizer::recognize_document(doc, cues_);
    doc.mentions.insert(doc.mentions.end(), recognized.begin(), recognized.end());
    std::sort(doc.mentions.begin(), doc.mentions.end(),
              [](const Mention& a, const Mention& b) { return a.char_span < b.char_span; });
  }
}

AnnotatedDocument Engine::annotate(const HtmlDocument& doc) const {
  AnnotatedDocument out;
  out.doc_id = doc.id;
  out.provider_id = doc.provider_id;
  out.url = doc.url;
  out.clusters = segmenter::segment_document(doc, title_terms_, term_index_, &out.text);
  extract_entities(out);
  return out;
}

AnnotatedDocument Engine::annotate_text(const std::string& doc_id, std::string text) const {
  AnnotatedDocument out;
  out.doc_id = doc_id;
  out.text = std::move(text);
  out.clusters = segmenter::segment_plain_text(out.text, title_terms_, term_index_);
  extract_entities(out);
  return out;
}

std::vector<HtmlDocument> load_corpus(const std::filesystem::path& input_dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(input_dir)) {
    throw std::runtime_error("input directory not found: " + input_dir.string());
  }
  struct Meta {
    std::string url;
    std::string provider;
  };
  std::map<std::string, Meta> meta;
  fs::path meta_path = input_dir / "corpus_meta.json";
  if (fs::exists(meta_path)) {
    std::ifstream in(meta_path, std::ios::binary);
    json doc = json::parse(std::string(std::istreambuf_iterator<char>(in), {}));
    for (const auto& [id, entry] : doc.items()) {
      meta[id] = {entry.value("url", ""), entry.value("provider_id", "")};
    }
  }

  std::vector<std::pair<fs::path, std::string>> files;  // path, provider
  for (const auto& entry : fs::directory_iterator(input_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".html") {
      files.emplace_back(entry.path(), "");
    } else if (entry.is_directory()) {
      for (const auto& sub : fs::directory_iterator(entry.path())) {
        if (sub.is_regular_file() && sub.path().extension() == ".html") {
          files.emplace_back(sub.path(), entry.path().filename().string());
        }
      }
    }
  }
  std::sort(files.begin(), files.end());

  std::vector<HtmlDocument> corpus;
  for (const auto& [path, provider] : files) {
    HtmlDocument doc;
    doc.id = path.stem().string();
    doc.provider_id = provider;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::string raw((std::istreambuf_iterator<char>(in)), {});
    doc.html = html::to_utf8(raw);
    auto it = meta.find(doc.id);
    if (it != meta.end()) {
      doc.url = it->second.url;
      if (!it->second.provider.empty()) doc.provider_id = it->second.provider;
    }
    corpus.push_back(std::move(doc));
  }
  return corpus;
}

ExtractionOutput run_extraction(const Engine& engine, std::vector<HtmlDocument> corpus,
                                const PipelineConfig& config, std::ostream& log) {
  ExtractionOutput output;
  output.report.profile_hash = engine.profile().version_hash;

  std::sort(corpus.begin(), corpus.end(),
            [](const HtmlDocument& a, const HtmlDocument& b) { return a.id < b.id; });

  // Document-level parallelism; results land in input order.
  std::vector<AnnotatedDocument> annotated(corpus.size());
  std::vector<std::string> failures(corpus.size());
  {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= corpus.size()) break;
        try {
          annotated[i] = engine.annotate(corpus[i]);
        } catch (const std::exception& e) {
          failures[i] = corpus[i].id + ": " + e.what();
        }
      }
    };
    unsigned n = std::max(1u, config.workers);
    std::vector<std::thread> threads;
    for (unsigned t = 1; t < n; ++t) threads.emplace_back(worker);
    worker();
    for (auto& t : threads) t.join();
  }

  // Plugged-in external annotations; Linked spans keep priority.
  if (!config.external_annotations.empty()) {
    auto imported = recognizer::import_external_file(config.external_annotations, annotated);
    for (auto& doc : annotated) {
      auto it = imported.find(doc.doc_id);
      if (it == imported.end()) continue;
      for (auto& m : it->second) {
        bool clashes = false;
        for (const auto& existing : doc.mentions) {
          if (existing.origin == MentionOrigin::Linked &&
              existing.char_span.overlaps(m.char_span)) {
            clashes = true;
            break;
          }
        }
        if (!clashes) doc.mentions.push_back(m);
      }
      std::sort(doc.mentions.begin(), doc.mentions.end(),
                [](const Mention& a, const Mention& b) { return a.char_span < b.char_span; });
    }
  }

  // NIL assignment is a deterministic corpus-wide pass.
  NilRegistry registry;
  for (std::size_t i = 0; i < annotated.size(); ++i) {
    if (!failures[i].empty()) {
      output.report.failed += 1;
      output.report.errors.push_back(failures[i]);
      log << "[skip] " << failures[i] << '\n';
      continue;
    }
    AnnotatedDocument& doc = annotated[i];
    doc.mentions = recognizer::assign_nil_ids(std::move(doc.mentions), registry, engine.rules());
    output.report.documents += 1;

    auto assignments = slotfill::contextualize(doc.doc_id, doc.clusters, doc.mentions,
                                               engine.schema());
    std::optional<std::string> provider_school;
    auto pit = config.provider_map.find(doc.provider_id);
    if (pit != config.provider_map.end()) provider_school = pit->second;
    if (auto school = slotfill::fill_school(doc.doc_id, provider_school, doc.mentions)) {
      assignments.push_back(std::move(*school));
    }
    auto violations = slotfill::validate_cardinality(assignments, engine.schema());
    output.report.violations.insert(output.report.violations.end(), violations.begin(),
                                    violations.end());
    output.assignments.insert(output.assignments.end(), assignments.begin(),
                              assignments.end());
    output.documents.push_back(std::move(doc));
  }

  std::map<std::string, std::string> course_iris;
  for (const auto& doc : output.documents) {
    course_iris[doc.doc_id] = config.namespaces.course_iri(doc.doc_id, doc.url);
  }
  output.triples = kg::to_triples(output.assignments, config.namespaces, course_iris);
  output.report.statements = kg::count_statements(output.triples, config.namespaces);
  return output;
}

int cmd_build_profile(const PipelineConfig& config, std::ostream& log) {
  if (config.ontology_paths.empty()) {
    log << "error: no ontology files configured\n";
    return 2;
  }
  auto store = ontology::load_ontology(config.ontology_paths);
  auto profile = ontology::build_profile(store);
  if (config.profile_path.empty()) {
    log << "error: no profile output path configured\n";
    return 2;
  }
  if (config.profile_path.has_parent_path()) {
    std::filesystem::create_directories(config.profile_path.parent_path());
  }
  profile.save(config.profile_path);
  std::size_t surface_keys = 0;
  for (const auto& [key, entry] : profile.forms) {
    if (!entry.entity_ids.empty()) ++surface_keys;
  }
  log << "profile written: " << config.profile_path.string() << '\n'
      << "  version_hash:   " << profile.version_hash << '\n'
      << "  entities:       " << profile.entities.size() << '\n'
      << "  surface keys:   " << surface_keys << '\n'
      << "  title terms:    " << store.title_terms.size() << '\n';
  return 0;
}

namespace {

Engine make_engine(const PipelineConfig& config) {
  auto store = ontology::load_ontology(config.ontology_paths);
  ElProfile profile;
  if (!config.profile_path.empty() && std::filesystem::exists(config.profile_path)) {
    profile = ElProfile::load(config.profile_path);
  } else {
    profile = ontology::build_profile(store);
  }
  // An external recognizer replaces the built-in baseline.
  bool baseline = config.baseline_recognizer && config.external_annotations.empty();
  return Engine(std::move(profile), std::move(store), config.linker_weights,
                CueLexicon::defaults(), baseline);
}

}  // namespace

int cmd_extract(const PipelineConfig& config, std::ostream& log) {
  Engine engine = make_engine(config);
  auto corpus = load_corpus(config.input_dir);
  auto output = run_extraction(engine, std::move(corpus), config, log);

  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  for (const auto& format : config.output_formats) {
    fs::path path = config.output_dir / ("kg." + format);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    if (format == "nt") {
      out << kg::serialize_ntriples(output.triples);
    } else if (format == "ttl") {
      out << kg::serialize_turtle(output.triples, config.namespaces);
    } else {
      throw std::runtime_error("unknown output format: " + format);
    }
    log << "wrote " << path.string() << '\n';
  }
  if (!config.silver_path.empty()) {
    if (config.silver_path.has_parent_path()) {
      fs::create_directories(config.silver_path.parent_path());
    }
    recognizer::export_silver_file(output.documents, config.silver_path);
    log << "wrote " << config.silver_path.string() << '\n';
  }
  fs::path report_path = config.report_path.empty()
                             ? config.output_dir / "report.json"
                             : config.report_path;
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  std::ofstream report(report_path, std::ios::binary);
  report << output.report.to_json();
  log << "wrote " << report_path.string() << '\n'
      << "documents: " << output.report.documents << " ok, " << output.report.failed
      << " failed; unique statements: " << output.report.statements.total << '\n';
  return output.report.failed == 0 ? 0 : 1;
}

DocPrediction to_prediction(const AnnotatedDocument& doc,
                            const std::vector<SlotAssignment>& assignments) {
  DocPrediction pred;
  pred.doc_id = doc.doc_id;
  for (const auto& cluster : doc.clusters) {
    if (cluster.seg_type == SegmentType::Unknown) continue;
    pred.segments.push_back({cluster.char_span, cluster.seg_type});
  }
  for (const auto& m : doc.mentions) {
    GoldMention gm;
    gm.span = m.char_span;
    gm.surface = m.surface;
    gm.etype = m.etype;
    gm.entity_id = m.entity_id;
    pred.mentions.push_back(std::move(gm));
  }
  for (const auto& a : assignments) {
    if (a.course_id != doc.doc_id) continue;
    DocPrediction::SlotValue value;
    value.slot = a.slot;
    value.entity_id = a.entity_id;
    for (std::size_t i = 0; i < doc.mentions.size(); ++i) {
      if (doc.mentions[i].char_span == a.provenance.char_span &&
          doc.mentions[i].cluster_ref == a.provenance.cluster_ref) {
        value.mention_index = static_cast<int>(i);
        break;
      }
    }
    pred.slots.push_back(std::move(value));
  }
  return pred;
}

int cmd_eval(const PipelineConfig& config, const EvalOptions& options, std::ostream& log) {
  auto gold = evalkit::load_gold(options.gold_path, options.partition);
  log << "gold documents: " << gold.size() << '\n';

  std::vector<DocPrediction> predictions;
  if (options.predictions_from_gold) {
    for (const auto& g : gold) {
      DocPrediction pred;
      pred.doc_id = g.doc_id;
      pred.segments = g.segments;
      pred.mentions = g.mentions;
      for (const auto& s : g.slots) pred.slots.push_back({s.slot, s.entity_id, -1});
      predictions.push_back(std::move(pred));
    }
  } else {
    Engine engine = make_engine(config);
    for (const auto& g : gold) {
      HtmlDocument doc;
      doc.id = g.doc_id;
      doc.provider_id = g.provider_id;
      doc.url = g.url;
      bool have_html = !g.html.empty();
      if (have_html) {
        doc.html = g.html;
      } else {
        std::filesystem::path html_path = config.input_dir / (g.doc_id + ".html");
        if (!config.input_dir.empty() && std::filesystem::exists(html_path)) {
          std::ifstream in(html_path, std::ios::binary);
          std::string raw((std::istreambuf_iterator<char>(in)), {});
          doc.html = html::to_utf8(raw);
          have_html = true;
        }
      }
      // Without HTML the stored text is segmented line-wise, so prediction
      // spans stay in the gold text's coordinates.
      auto annotated = have_html ? engine.annotate(doc)
                                 : engine.annotate_text(g.doc_id, g.text);
      annotated.provider_id = g.provider_id;
      NilRegistry registry;
      annotated.mentions =
          recognizer::assign_nil_ids(std::move(annotated.mentions), registry, engine.rules());
      auto assignments = slotfill::contextualize(annotated.doc_id, annotated.clusters,
                                                 annotated.mentions, engine.schema());
      std::optional<std::string> provider_school;
      auto pit = config.provider_map.find(annotated.provider_id);
      if (pit != config.provider_map.end()) provider_school = pit->second;
      if (auto school = slotfill::fill_school(annotated.doc_id, provider_school,
                                              annotated.mentions)) {
        assignments.push_back(std::move(*school));
      }
      predictions.push_back(to_prediction(annotated, assignments));
    }
  }

  namespace fs = std::filesystem;
  fs::path out_dir = options.out_dir.empty() ? config.output_dir : options.out_dir;
  fs::create_directories(out_dir);

  auto write_report = [&](const EvalReport& report, const std::string& stem) {
    std::ofstream json_out(out_dir / (stem + ".json"), std::ios::binary);
    json_out << report.to_json();
    std::ofstream table_out(out_dir / (stem + ".txt"), std::ios::binary);
    table_out << report.to_table();
  };

  if (options.kfolds == 0) {
    auto report = evalkit::evaluate_corpus(predictions, gold, options.tasks);
    write_report(report, "eval_report");
    log << report.to_table();
  } else {
    std::vector<std::string> ids;
    for (const auto& g : gold) ids.push_back(g.doc_id);
    auto folds = evalkit::kfold(ids, options.kfolds, config.seed);
    EvalReport aggregate;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      std::set<std::string> test_ids(folds[f].test.begin(), folds[f].test.end());
      std::vector<GoldDocument> fold_gold;
      for (const auto& g : gold) {
        if (test_ids.count(g.doc_id) > 0) fold_gold.push_back(g);
      }
      auto report = evalkit::evaluate_corpus(predictions, fold_gold, options.tasks);
      write_report(report, "eval_fold_" + std::to_string(f));
      aggregate.merge(report);
    }
    write_report(aggregate, "eval_report");
    log << aggregate.to_table();
  }
  return 0;
}

}  // namespace pipeline
}  // namespace edukg
