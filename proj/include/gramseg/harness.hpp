#pragma once

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gramseg/evaluation.hpp"
#include "gramseg/induction.hpp"
#include "gramseg/io.hpp"
#include "gramseg/segmentation.hpp"
#include "gramseg/viewpoints.hpp"

namespace gramseg {

// -------- deterministic helpers --------

// splitmix64: the sampling generator. state advances by the golden-gamma
// constant; each output is a finalized mix of the new state. Documented in
// the README so subsets can be reproduced from other languages.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform value in [0, bound) by rejection, avoiding modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      std::uint64_t v = next();
      if (v >= threshold) return v % bound;
    }
  }

 private:
  std::uint64_t state_;
};

// Uniform sample without replacement of `count` indices out of `population`,
// via a partial Fisher-Yates shuffle; the result is sorted ascending.
inline std::vector<std::size_t> sample_indices(std::size_t population, std::size_t count,
                                               std::uint64_t seed) {
  if (count > population)
    throw std::invalid_argument("sample count exceeds population size");
  std::vector<std::size_t> indices(population);
  for (std::size_t i = 0; i < population; ++i) indices[i] = i;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(indices[i], indices[j]);
  }
  indices.resize(count);
  std::sort(indices.begin(), indices.end());
  return indices;
}

// Shortest round-trip decimal form, so values re-read from CSV parse back to
// the identical double.
inline std::string format_double(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

// -------- experiment records --------

struct SamplePlan {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  std::vector<std::filesystem::path> datasets;
  std::vector<AlgorithmId> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::vector<int> vcis;  // defaults to 1..31 when empty
  double tau = 0.7;
  std::optional<SamplePlan> sample;
  std::filesystem::path out_dir;  // no files written when empty
  unsigned jobs = 0;              // 0 = hardware concurrency
  bool emit_grammars = false;
  bool emit_annotations = false;
  IoiMode ioi_mode = IoiMode::onset_difference;
};

struct ExperimentResult {
  std::string dataset;
  std::string sequence_id;
  AlgorithmId algorithm = AlgorithmId::lz78;
  int vci = 0;
  bool ok = false;
  std::string error;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t grammar_size = 0;
  std::size_t rule_count = 0;
  std::size_t phrase_count = 0;
  std::size_t gt_phrase_count = 0;
  std::size_t matched_ground_truth = 0;
  std::size_t matched_discovered = 0;
  double runtime_ms = 0.0;
};

struct AggregateRow {
  std::string dataset;
  AlgorithmId algorithm = AlgorithmId::lz78;
  int vci = 0;
  double mean_f1 = 0.0;
  double var_f1 = 0.0;  // population variance
  double max_f1 = 0.0;
  std::size_t count = 0;
  std::size_t failures = 0;
};

struct GridOutput {
  std::vector<ExperimentResult> results;
  std::vector<AggregateRow> aggregates;
};

// -------- single simulation --------

// transform -> induce -> extract -> score against ground truth; similarity is
// computed over the same viewpoint-transformed sequence.
inline ExperimentResult run_simulation(const AnnotatedSequence& seq, AlgorithmId algorithm,
                                       int vci, double tau,
                                       IoiMode mode = IoiMode::onset_difference,
                                       Grammar<FeatureVector>* grammar_out = nullptr,
                                       Annotation* annotation_out = nullptr) {
  ExperimentResult r;
  r.sequence_id = seq.id;
  r.algorithm = algorithm;
  r.vci = vci;
  const auto started = std::chrono::steady_clock::now();
  try {
    const auto combination = vci_to_combination(vci);
    const std::vector<FeatureVector> tokens = transform(combination, seq.events, mode);
    Grammar<FeatureVector> grammar = induce(tokens, algorithm);
    Annotation discovered = extract_annotation(grammar, tokens.size());
    const FuzzyMatchResult matches = fuzzy_intersection(
        seq.ground_truth, discovered, std::span<const FeatureVector>(tokens), tau);
    const Scores scores = precision_recall_f1(seq.ground_truth, discovered,
                                              std::span<const FeatureVector>(tokens), tau);
    r.precision = scores.precision;
    r.recall = scores.recall;
    r.f1 = scores.f1;
    r.grammar_size = gramseg::grammar_size(grammar);
    r.rule_count = grammar.rule_count();
    r.phrase_count = discovered.phrases.size();
    r.gt_phrase_count = seq.ground_truth.phrases.size();
    r.matched_ground_truth = matches.matched_ground_truth;
    r.matched_discovered = matches.matched_discovered;
    r.ok = true;
    if (grammar_out != nullptr) *grammar_out = std::move(grammar);
    if (annotation_out != nullptr) *annotation_out = std::move(discovered);
  } catch (const std::exception& e) {
    r.ok = false;
    r.error = e.what();
  }
  r.runtime_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - started)
                     .count();
  return r;
}

namespace detail {

inline std::string sanitize_filename(const std::string& name) {
  std::string out;
  out.reserve(name.size());
  for (char c : name) {
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
        c == '.' || c == '-' || c == '_')
      out += c;
    else
      out += '_';
  }
  return out;
}

struct LoadedDataset {
  std::string name;
  std::vector<AnnotatedSequence> sequences;  // sorted by id, post-sampling
};

inline std::vector<LoadedDataset> load_grid_datasets(const ExperimentConfig& config) {
  if (config.datasets.empty())
    throw std::invalid_argument("no datasets configured");
  std::vector<LoadedDataset> out;
  for (const auto& path : config.datasets) {
    LoadedDataset ds;
    ds.name = path.stem().string();
    ds.sequences = load_dataset_jsonl(path);
    std::sort(ds.sequences.begin(), ds.sequences.end(),
              [](const AnnotatedSequence& a, const AnnotatedSequence& b) {
                return a.id < b.id;
              });
    if (config.sample) {
      if (config.sample->count > ds.sequences.size())
        throw std::invalid_argument("sample count " + std::to_string(config.sample->count) +
                                    " exceeds dataset size " +
                                    std::to_string(ds.sequences.size()));
      auto picked = sample_indices(ds.sequences.size(), config.sample->count,
                                   config.sample->seed);
      std::vector<AnnotatedSequence> subset;
      subset.reserve(picked.size());
      for (std::size_t i : picked) subset.push_back(std::move(ds.sequences[i]));
      ds.sequences = std::move(subset);
    }
    out.push_back(std::move(ds));
  }
  return out;
}

inline const std::vector<int>& default_vcis() {
  static const std::vector<int> all = [] {
    std::vector<int> v(kViewpointCombinationCount);
    for (int i = 0; i < kViewpointCombinationCount; ++i) v[static_cast<std::size_t>(i)] = i + 1;
    return v;
  }();
  return all;
}

}  // namespace detail

// -------- the grid --------

// Runs every (sequence, algorithm, vci) cell, in parallel over a fixed task
// list; row order, aggregation order, and all written files are independent
// of the parallelism degree. When out_dir is set, writes results.csv,
// aggregates.csv, summary.csv, timings.csv, run_metadata.json and the
// optional per-cell grammar/annotation JSON files.
inline GridOutput run_grid(const ExperimentConfig& config) {
  for (int vci : config.vcis.empty() ? detail::default_vcis() : config.vcis)
    if (vci < 1 || vci > kViewpointCombinationCount)
      throw std::invalid_argument("vci out of range: " + std::to_string(vci));
  if (config.tau < 0.0 || config.tau > 1.0)
    throw std::invalid_argument("tau must be within [0, 1]");
  if (config.algorithms.empty())
    throw std::invalid_argument("no algorithms configured");

  const std::vector<int>& vcis = config.vcis.empty() ? detail::default_vcis() : config.vcis;
  const auto datasets = detail::load_grid_datasets(config);

  const bool writing = !config.out_dir.empty();
  if (writing) {
    std::filesystem::create_directories(config.out_dir);
    if (config.emit_grammars)
      std::filesystem::create_directories(config.out_dir / "grammars");
    if (config.emit_annotations)
      std::filesystem::create_directories(config.out_dir / "annotations");
  }

  struct Cell {
    std::size_t dataset;
    std::size_t sequence;
    AlgorithmId algorithm;
    int vci;
  };
  std::vector<Cell> cells;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t s = 0; s < datasets[d].sequences.size(); ++s)
      for (AlgorithmId a : config.algorithms)
        for (int vci : vcis) cells.push_back({d, s, a, vci});

  std::vector<ExperimentResult> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const Cell& cell = cells[i];
      const auto& ds = datasets[cell.dataset];
      const AnnotatedSequence& seq = ds.sequences[cell.sequence];
      Grammar<FeatureVector> grammar;
      Annotation discovered;
      ExperimentResult r = run_simulation(
          seq, cell.algorithm, cell.vci, config.tau, config.ioi_mode,
          config.emit_grammars ? &grammar : nullptr,
          config.emit_annotations ? &discovered : nullptr);
      r.dataset = ds.name;
      if (r.ok && writing && (config.emit_grammars || config.emit_annotations)) {
        const std::string stem = detail::sanitize_filename(
            ds.name + "__" + seq.id + "__" + std::string(to_string(cell.algorithm)) +
            "__vci" + std::to_string(cell.vci));
        if (config.emit_grammars) {
          std::ofstream out(config.out_dir / "grammars" / (stem + ".json"));
          out << grammar_to_json(grammar).dump(2) << '\n';
        }
        if (config.emit_annotations) {
          std::ofstream out(config.out_dir / "annotations" / (stem + ".json"));
          out << annotation_to_json(discovered).dump(2) << '\n';
        }
      }
      results[i] = std::move(r);
    }
  };

  unsigned jobs = config.jobs != 0 ? config.jobs : std::thread::hardware_concurrency();
  if (jobs == 0) jobs = 1;
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  // Aggregate per (dataset, algorithm, vci), keyed by cell coordinates so the
  // bucket order matches the enumeration order.
  GridOutput out;
  out.results = std::move(results);
  const std::size_t na = config.algorithms.size();
  const std::size_t nv = vcis.size();
  std::vector<std::vector<double>> f1_buckets(datasets.size() * na * nv);
  std::vector<std::size_t> failure_buckets(f1_buckets.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    std::size_t ai = static_cast<std::size_t>(
        std::find(config.algorithms.begin(), config.algorithms.end(), cell.algorithm) -
        config.algorithms.begin());
    std::size_t vi = static_cast<std::size_t>(
        std::find(vcis.begin(), vcis.end(), cell.vci) - vcis.begin());
    std::size_t key = (cell.dataset * na + ai) * nv + vi;
    if (out.results[i].ok)
      f1_buckets[key].push_back(out.results[i].f1);
    else
      ++failure_buckets[key];
  }
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t ai = 0; ai < na; ++ai) {
      for (std::size_t vi = 0; vi < nv; ++vi) {
        std::size_t key = (d * na + ai) * nv + vi;
        AggregateRow row;
        row.dataset = datasets[d].name;
        row.algorithm = config.algorithms[ai];
        row.vci = vcis[vi];
        row.failures = failure_buckets[key];
        const std::vector<double>& f1s = f1_buckets[key];
        row.count = f1s.size();
        if (!f1s.empty()) {
          double sum = 0.0;
          for (double v : f1s) sum += v;
          row.mean_f1 = sum / static_cast<double>(f1s.size());
          double sq = 0.0;
          for (double v : f1s) sq += (v - row.mean_f1) * (v - row.mean_f1);
          row.var_f1 = sq / static_cast<double>(f1s.size());
          row.max_f1 = *std::max_element(f1s.begin(), f1s.end());
        }
        out.aggregates.push_back(std::move(row));
      }
    }
  }

  if (writing) {
    {
      std::ofstream csv(config.out_dir / "results.csv");
      csv << "dataset,sequence,algorithm,vci,status,precision,recall,f1,grammar_size,"
             "rule_count,phrase_count,gt_phrase_count,matched_gt,matched_discovered,error\n";
      for (const ExperimentResult& r : out.results) {
        csv << csv_escape(r.dataset) << ',' << csv_escape(r.sequence_id) << ','
            << to_string(r.algorithm) << ',' << r.vci << ',' << (r.ok ? "ok" : "error") << ',';
        if (r.ok)
          csv << format_double(r.precision) << ',' << format_double(r.recall) << ','
              << format_double(r.f1) << ',' << r.grammar_size << ',' << r.rule_count << ','
              << r.phrase_count << ',' << r.gt_phrase_count << ',' << r.matched_ground_truth
              << ',' << r.matched_discovered << ',';
        else
          csv << ",,,,,,,,,";
        csv << csv_escape(r.error) << '\n';
      }
    }
    {
      std::ofstream csv(config.out_dir / "timings.csv");
      csv << "dataset,sequence,algorithm,vci,runtime_ms\n";
      for (const ExperimentResult& r : out.results)
        csv << csv_escape(r.dataset) << ',' << csv_escape(r.sequence_id) << ','
            << to_string(r.algorithm) << ',' << r.vci << ',' << format_double(r.runtime_ms)
            << '\n';
    }
    {
      std::ofstream csv(config.out_dir / "aggregates.csv");
      csv << "dataset,algorithm,vci,mean_f1,var_f1,max_f1,count,failures\n";
      for (const AggregateRow& row : out.aggregates)
        csv << csv_escape(row.dataset) << ',' << to_string(row.algorithm) << ',' << row.vci
            << ',' << format_double(row.mean_f1) << ',' << format_double(row.var_f1) << ','
            << format_double(row.max_f1) << ',' << row.count << ',' << row.failures << '\n';
    }
    {
      // Best mean F1 over the configured combination indices.
      std::ofstream csv(config.out_dir / "summary.csv");
      csv << "dataset,algorithm,best_vci,best_mean_f1\n";
      for (const auto& ds : datasets) {
        for (AlgorithmId a : config.algorithms) {
          const AggregateRow* best = nullptr;
          for (const AggregateRow& row : out.aggregates) {
            if (row.dataset != ds.name || row.algorithm != a) continue;
            if (best == nullptr || row.mean_f1 > best->mean_f1) best = &row;
          }
          if (best != nullptr)
            csv << csv_escape(ds.name) << ',' << to_string(a) << ',' << best->vci << ','
                << format_double(best->mean_f1) << '\n';
        }
      }
    }
    {
      nlohmann::json meta;
      meta["tau"] = config.tau;
      meta["ioi_mode"] = config.ioi_mode == IoiMode::onset_difference ? "onset_difference"
                                                                      : "duration_difference";
      meta["precision"] = "matched_discovered / phrase_count";
      meta["recall"] = "matched_gt / gt_phrase_count";
      meta["variance"] = "population";
      meta["sampler"] = "splitmix64 partial fisher-yates over id-sorted sequences";
      if (config.sample) {
        meta["sample_count"] = config.sample->count;
        meta["sample_seed"] = config.sample->seed;
      }
      nlohmann::json algos = nlohmann::json::array();
      for (AlgorithmId a : config.algorithms) algos.push_back(std::string(to_string(a)));
      meta["algorithms"] = std::move(algos);
      meta["vcis"] = vcis;
      nlohmann::json names = nlohmann::json::array();
      for (const auto& ds : datasets) names.push_back(ds.name);
      meta["datasets"] = std::move(names);
      std::ofstream outjson(config.out_dir / "run_metadata.json");
      outjson << meta.dump(2) << '\n';
    }
  }
  return out;
}

// Pairwise F1 matrix over the sequence's ground truth plus any extra
// annotations, rendered as CSV with labels on both axes.
inline std::string compare_annotations(
    const AnnotatedSequence& seq,
    const std::vector<std::pair<std::string, Annotation>>& extra, int vci, double tau,
    IoiMode mode = IoiMode::onset_difference) {
  std::vector<std::pair<std::string, Annotation>> annotations;
  annotations.emplace_back("ground_truth", seq.ground_truth);
  annotations.insert(annotations.end(), extra.begin(), extra.end());
  const auto tokens = transform(vci_to_combination(vci), seq.events, mode);
  const auto matrix =
      pairwise_f1_matrix(annotations, std::span<const FeatureVector>(tokens), tau);

  std::string csv;
  for (const auto& [label, annotation] : annotations) {
    csv += ',';
    csv += csv_escape(label);
  }
  csv += '\n';
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    csv += csv_escape(annotations[i].first);
    for (std::size_t j = 0; j < annotations.size(); ++j) {
      csv += ',';
      csv += format_double(matrix[i][j]);
    }
    csv += '\n';
  }
  return csv;
}

}  // namespace gramseg
