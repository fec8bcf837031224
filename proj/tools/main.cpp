// gramseg: grammar-induction phrase segmentation toolkit.
//
//   gramseg run            run the dataset x algorithm x VCI experiment grid
//   gramseg compare        pairwise F1 matrix between annotations of one sequence
//   gramseg convert-essen  line-grouped tunes -> canonical JSONL dataset

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gramseg/harness.hpp"

namespace {

std::vector<gramseg::AlgorithmId> parse_algorithms(const std::string& list) {
  std::vector<gramseg::AlgorithmId> out;
  if (list == "all") {
    out.assign(gramseg::kAllAlgorithms.begin(), gramseg::kAllAlgorithms.end());
    return out;
  }
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    gramseg::AlgorithmId id = gramseg::parse_algorithm_id(item);
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  if (out.empty()) throw CLI::ValidationError("--algorithms", "no algorithms given");
  return out;
}

std::vector<int> parse_vcis(const std::string& list) {
  std::vector<int> out;
  if (list == "all") {
    for (int i = 1; i <= gramseg::kViewpointCombinationCount; ++i) out.push_back(i);
    return out;
  }
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    int vci = std::stoi(item);
    if (vci < 1 || vci > gramseg::kViewpointCombinationCount)
      throw CLI::ValidationError("--vcis", "index out of range: " + item);
    if (std::find(out.begin(), out.end(), vci) == out.end()) out.push_back(vci);
  }
  if (out.empty()) throw CLI::ValidationError("--vcis", "no combination indices given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grammar-induction phrase segmentation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from an INI/TOML file");

  // ---- run ----
  auto* run = app.add_subcommand("run", "run the experiment grid");
  std::vector<std::string> datasets;
  std::string algorithms = "all";
  std::string vcis = "all";
  double tau = 0.7;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::string out_dir;
  unsigned jobs = 0;
  bool emit_grammar = false;
  bool emit_annotations = false;
  bool ioi_from_durations = false;
  run->add_option("--dataset", datasets, "canonical JSONL dataset file(s)")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--algorithms", algorithms,
                  "comma list of lz78,sequitur,repair,longest_first,most_compressive or 'all'");
  run->add_option("--vcis", vcis, "comma list of viewpoint combination indices (1-31) or 'all'");
  run->add_option("--tau", tau, "fuzzy-match similarity threshold")->check(CLI::Range(0.0, 1.0));
  run->add_option("--sample", sample_count, "subsample each dataset to N sequences");
  run->add_option("--seed", seed, "seed for subsampling");
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_option("--jobs", jobs, "worker threads (default: hardware concurrency)");
  run->add_flag("--emit-grammar", emit_grammar, "write one grammar JSON per simulation");
  run->add_flag("--emit-annotations", emit_annotations,
                "write one discovered-annotation JSON per simulation");
  run->add_flag("--ioi-from-durations", ioi_from_durations,
                "compute ioi as duration difference instead of onset difference");

  // ---- compare ----
  auto* compare = app.add_subcommand("compare", "pairwise F1 matrix for one sequence");
  std::string sequence_path;
  std::vector<std::string> annotation_paths;
  int compare_vci = 2;
  double compare_tau = 0.7;
  std::string compare_out;
  compare->add_option("--sequence", sequence_path, "annotated sequence (JSON or JSONL)")
      ->required()
      ->check(CLI::ExistingFile);
  compare->add_option("--annotations", annotation_paths,
                      "extra annotation JSON file(s); the file stem names the row")
      ->check(CLI::ExistingFile);
  compare->add_option("--vci", compare_vci, "viewpoint combination index for similarity")
      ->check(CLI::Range(1, gramseg::kViewpointCombinationCount));
  compare->add_option("--tau", compare_tau, "fuzzy-match similarity threshold")
      ->check(CLI::Range(0.0, 1.0));
  compare->add_option("--out", compare_out, "write the CSV here instead of stdout");

  // ---- convert-essen ----
  auto* convert = app.add_subcommand("convert-essen",
                                     "convert line-grouped tunes to canonical JSONL");
  std::string essen_in;
  std::string essen_out;
  bool require_repeats = false;
  convert->add_option("input", essen_in, "line-grouped JSON input")
      ->required()
      ->check(CLI::ExistingFile);
  convert->add_option("--out", essen_out, "canonical JSONL output path")->required();
  convert->add_flag("--require-repeats", require_repeats,
                    "drop tunes without a repeated phrase");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      gramseg::ExperimentConfig config;
      for (const auto& p : datasets) config.datasets.emplace_back(p);
      config.algorithms = parse_algorithms(algorithms);
      config.vcis = parse_vcis(vcis);
      config.tau = tau;
      if (sample_count > 0) config.sample = gramseg::SamplePlan{sample_count, seed};
      config.out_dir = out_dir;
      config.jobs = jobs;
      config.emit_grammars = emit_grammar;
      config.emit_annotations = emit_annotations;
      config.ioi_mode = ioi_from_durations ? gramseg::IoiMode::duration_difference
                                           : gramseg::IoiMode::onset_difference;
      gramseg::GridOutput out = gramseg::run_grid(config);
      std::size_t failures = 0;
      for (const auto& r : out.results)
        if (!r.ok) ++failures;
      std::cerr << out.results.size() << " simulations, " << failures << " failed; results in "
                << out_dir << "\n";
      return failures == out.results.size() && !out.results.empty() ? 1 : 0;
    }

    if (compare->parsed()) {
      gramseg::AnnotatedSequence seq = gramseg::load_sequence_file(sequence_path);
      std::vector<std::pair<std::string, gramseg::Annotation>> extra;
      for (const auto& p : annotation_paths) {
        gramseg::Annotation a = gramseg::load_annotation_file(p);
        gramseg::validate_annotation(a, seq.events.size(), p);
        extra.emplace_back(std::filesystem::path(p).stem().string(), std::move(a));
      }
      std::string csv = gramseg::compare_annotations(seq, extra, compare_vci, compare_tau);
      if (compare_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(compare_out);
        if (!out) throw gramseg::IoError("cannot write " + compare_out);
        out << csv;
      }
      return 0;
    }

    if (convert->parsed()) {
      std::vector<gramseg::AnnotatedSequence> tunes = gramseg::load_essen_file(essen_in);
      std::vector<gramseg::AnnotatedSequence> kept;
      for (auto& tune : tunes) {
        if (require_repeats && !gramseg::has_repeated_pattern(tune.ground_truth)) continue;
        kept.push_back(std::move(tune));
      }
      gramseg::save_dataset_jsonl(kept, essen_out);
      std::cerr << "wrote " << kept.size() << " of " << tunes.size() << " tunes to " << essen_out
                << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
