#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "edukg/evalkit.hpp"
#include "edukg/kg.hpp"
#include "edukg/recognizer.hpp"

namespace edukg {

// Declarative run configuration; flags override individual fields.
struct PipelineConfig {
  std::filesystem::path input_dir;
  std::vector<std::filesystem::path> ontology_paths;
  std::filesystem::path profile_path;
  std::map<std::string, std::string> provider_map;  // provider_id -> school id
  Namespace namespaces;
  LinkerWeights linker_weights;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> output_formats = {"nt", "ttl"};
  std::filesystem::path report_path;  // default: <output_dir>/report.json
  std::filesystem::path silver_path;  // optional token-labeled dataset export
  unsigned workers = 1;
  std::uint64_t seed = 0;
  bool baseline_recognizer = true;
  std::filesystem::path external_annotations;  // optional plugged-in BIO file

  static PipelineConfig from_file(const std::filesystem::path& path);
  static PipelineConfig from_json(std::string_view json_text, const std::string& origin);
};

struct RunReport {
  std::string profile_hash;
  std::size_t documents = 0;
  std::size_t failed = 0;
  StatementCounts statements;
  std::vector<CardinalityViolation> violations;
  std::vector<std::string> errors;

  std::string to_json() const;
};

namespace pipeline {

// Immutable per-run state shared by all workers.
class Engine {
 public:
  Engine(ElProfile profile, OntologyStore store, LinkerWeights weights,
         CueLexicon cues, bool baseline);

  // Segments, links and (optionally) baseline-recognizes one document.
  // NIL ids are assigned later, corpus-wide.
  AnnotatedDocument annotate(const HtmlDocument& doc) const;

  // Same pipeline over already-extracted text (line-based segmentation);
  // spans stay in the given text's coordinates.
  AnnotatedDocument annotate_text(const std::string& doc_id, std::string text) const;

  const ElProfile& profile() const { return profile_; }
  const SlotSchema& schema() const { return schema_; }
  const VariationRules& rules() const { return profile_.rules; }

 private:
  void extract_entities(AnnotatedDocument& doc) const;

  ElProfile profile_;
  std::vector<std::string> title_terms_;
  segmenter::TermIndex term_index_;
  SlotSchema schema_;
  LinkerWeights weights_;
  CueLexicon cues_;
  bool baseline_ = true;
};

// Corpus discovery: *.html directly in the input dir (provider_id = "") and
// one level of provider subdirectories. An optional corpus_meta.json maps
// doc ids to {"url": ..., "provider_id": ...}.
std::vector<HtmlDocument> load_corpus(const std::filesystem::path& input_dir);

struct ExtractionOutput {
  std::vector<AnnotatedDocument> documents;
  std::vector<SlotAssignment> assignments;
  std::set<Triple> triples;
  RunReport report;
};

// Full pipeline over a loaded corpus (used by extract and by tests).
ExtractionOutput run_extraction(const Engine& engine, std::vector<HtmlDocument> corpus,
                                const PipelineConfig& config, std::ostream& log);

int cmd_build_profile(const PipelineConfig& config, std::ostream& log);
int cmd_extract(const PipelineConfig& config, std::ostream& log);

struct EvalOptions {
  std::filesystem::path gold_path;
  Partition partition = Partition::P2;
  std::vector<Task> tasks = {Task::T1, Task::T2, Task::T3, Task::T4, Task::T5, Task::T6};
  std::size_t kfolds = 0;
  bool predictions_from_gold = false;  // feed the gold back in (harness check)
  std::filesystem::path out_dir;
};

int cmd_eval(const PipelineConfig& config, const EvalOptions& options, std::ostream& log);

// Prediction conversion used by cmd_eval and the acceptance suite.
DocPrediction to_prediction(const AnnotatedDocument& doc,
                            const std::vector<SlotAssignment>& assignments);

}  // namespace pipeline
}  // namespace edukg
