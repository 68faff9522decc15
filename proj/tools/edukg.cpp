// Command-line front end: build-profile, extract, eval, convert-nif.
// Exit codes: 0 ok, 1 data/processing errors, 2 usage errors.

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "edukg/nif.hpp"
#include "edukg/pipeline.hpp"

namespace {

// Swallows output when EDUKG_LOG=quiet.
class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return c; }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Education-offering knowledge extraction pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("-c,--config", config_path, "pipeline config file (JSON)");

  // Flag overrides shared by subcommands.
  std::string input_dir_flag;
  std::string profile_flag;
  std::string output_dir_flag;
  std::vector<std::string> ontology_flags;
  unsigned workers_flag = 0;

  auto add_overrides = [&](CLI::App* cmd) {
    cmd->add_option("--input-dir", input_dir_flag, "override config input_dir");
    cmd->add_option("--profile", profile_flag, "override config profile path");
    cmd->add_option("--output-dir", output_dir_flag, "override config output dir");
    cmd->add_option("--ontology", ontology_flags, "override config ontology files");
    cmd->add_option("--workers", workers_flag, "override config worker count");
  };

  auto* build = app.add_subcommand("build-profile", "compile the entity-linking profile");
  add_overrides(build);

  auto* extract = app.add_subcommand("extract", "run the extraction pipeline over a corpus");
  add_overrides(extract);

  auto* eval = app.add_subcommand("eval", "benchmark against a gold corpus");
  add_overrides(eval);
  std::string gold_path;
  std::string partition_str = "P2";
  std::vector<std::string> task_strs;
  std::size_t kfolds = 0;
  bool from_gold = false;
  std::string eval_out;
  eval->add_option("--gold", gold_path, "gold corpus directory or file")->required();
  eval->add_option("--partition", partition_str, "P1 or P2 (default P2)");
  eval->add_option("--tasks", task_strs, "subset of T1..T6 (default all)");
  eval->add_option("--kfolds", kfolds, "number of cross-validation folds (0 = none)");
  eval->add_flag("--predictions-from-gold", from_gold,
                 "evaluate the gold against itself (harness check)");
  eval->add_option("--out", eval_out, "report output directory");

  auto* convert = app.add_subcommand("convert-nif", "convert NIF Turtle files to gold JSON");
  std::vector<std::string> nif_inputs;
  std::string nif_out;
  convert->add_option("input", nif_inputs, "NIF .ttl files")->required();
  convert->add_option("-o,--out", nif_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0, usage errors exit 2
  }

  NullBuffer null_buffer;
  std::ostream null_stream(&null_buffer);
  const char* log_env = std::getenv("EDUKG_LOG");
  bool quiet = log_env != nullptr && std::string(log_env) == "quiet";
  std::ostream& log = quiet ? null_stream : std::cerr;

  try {
    if (convert->parsed()) {
      std::vector<edukg::GoldDocument> docs;
      for (const auto& input : nif_inputs) {
        auto converted = edukg::nif::convert_file(input);
        docs.insert(docs.end(), std::make_move_iterator(converted.begin()),
                    std::make_move_iterator(converted.end()));
      }
      edukg::nif::write_gold_dir(docs, nif_out);
      log << "converted " << docs.size() << " documents to " << nif_out << '\n';
      return 0;
    }

    edukg::PipelineConfig config;
    if (!config_path.empty()) {
      config = edukg::PipelineConfig::from_file(config_path);
    }
    if (!input_dir_flag.empty()) config.input_dir = input_dir_flag;
    if (!profile_flag.empty()) config.profile_path = profile_flag;
    if (!output_dir_flag.empty()) config.output_dir = output_dir_flag;
    if (!ontology_flags.empty()) {
      config.ontology_paths.assign(ontology_flags.begin(), ontology_flags.end());
    }
    if (workers_flag > 0) config.workers = workers_flag;

    if (build->parsed()) {
      return edukg::pipeline::cmd_build_profile(config, log);
    }
    if (extract->parsed()) {
      return edukg::pipeline::cmd_extract(config, log);
    }
    if (eval->parsed()) {
      edukg::pipeline::EvalOptions options;
      options.gold_path = gold_path;
      if (partition_str == "P1") {
        options.partition = edukg::Partition::P1;
      } else if (partition_str == "P2") {
        options.partition = edukg::Partition::P2;
      } else {
        std::cerr << "error: partition must be P1 or P2\n";
        return 2;
      }
      if (!task_strs.empty()) {
        options.tasks.clear();
        for (const auto& t : task_strs) {
          if (t == "T1") options.tasks.push_back(edukg::Task::T1);
          else if (t == "T2") options.tasks.push_back(edukg::Task::T2);
          else if (t == "T3") options.tasks.push_back(edukg::Task::T3);
          else if (t == "T4") options.tasks.push_back(edukg::Task::T4);
          else if (t == "T5") options.tasks.push_back(edukg::Task::T5);
          else if (t == "T6") options.tasks.push_back(edukg::Task::T6);
          else {
            std::cerr << "error: unknown task '" << t << "'\n";
            return 2;
          }
        }
      }
      options.kfolds = kfolds;
      options.predictions_from_gold = from_gold;
      options.out_dir = eval_out;
      return edukg::pipeline::cmd_eval(config, options, log);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
