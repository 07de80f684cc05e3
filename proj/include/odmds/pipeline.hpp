#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "odmds/baselines.hpp"
#include "odmds/corpus.hpp"
#include "odmds/embedding_store.hpp"
#include "odmds/gateway.hpp"
#include "odmds/perturbation.hpp"
#include "odmds/report.hpp"
#include "odmds/retrieval.hpp"

namespace odmds {

enum class RetrieverKind { kSparse, kDense };

struct PerturbationTemplate {
  PerturbationKind kind = PerturbationKind::kAddition;
  Selection selection = Selection::kRandom;
};

struct ExperimentConfig {
  std::filesystem::path dataset_path;
  std::string dataset_format = "jsonl";
  DatasetConfig dataset;

  RetrieverKind retriever = RetrieverKind::kSparse;
  Bm25Params bm25;
  std::optional<std::filesystem::path> index_path;
  std::optional<std::filesystem::path> embeddings_path;
  TopK top_k = TopK::kMax;

  std::vector<PerturbationTemplate> perturbations;
  std::vector<double> fractions;  // defaults to 0, 0.1, ..., 1.0
  SimilarityScorer::Kind similarity =
      SimilarityScorer::Kind::kLexicalUnigramCosine;

  SummarizerSpec summarizer;
  SummarizerSpec transformer = identity_transformer_spec();
  bool stem = true;

  std::filesystem::path output_dir = "results";
  std::uint64_t seed = 0;
  Split split = Split::kTest;
};

std::vector<double> default_fractions();

// Reads a JSON config. Relative paths resolve against the config's
// directory. ODMDS_SUMMARIZER_ENDPOINT and ODMDS_TRANSFORMER_ENDPOINT
// override the endpoints when set.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig config_from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
void apply_env_overrides(ExperimentConfig& config);
nlohmann::json to_json(const ExperimentConfig& config);

struct RetrievalInfo {
  std::size_t k = 0;
  double precision = 0.0;
  double recall = 0.0;
  ErrorTally errors;
};

struct PerturbationInfo {
  PerturbationSpec spec;
  std::vector<Provenance> provenance;
  std::vector<std::string> removed_doc_ids;
};

struct ExampleRecord {
  std::string condition;
  std::string example_id;
  std::optional<std::string> error;  // set when the example failed
  std::vector<std::string> input_doc_ids;
  std::string summary;
  std::string model_id;
  RougeTriple scores;
  double rouge_avg = 0.0;
  std::optional<RetrievalInfo> retrieval;
  std::optional<PerturbationInfo> perturbation;
  std::optional<double> delta_rouge_avg;

  bool ok() const { return !error.has_value(); }
};

nlohmann::json to_json(const ExampleRecord& record);
ExampleRecord record_from_json(const nlohmann::json& j);

struct DeltaSummary {
  std::size_t n = 0;
  double mean_delta = 0.0;
  double ci68 = 0.0;  // standard error of the per-example deltas
  std::vector<SignificanceRow> significance;
};

struct ExperimentResult {
  std::string condition;
  nlohmann::json config_snapshot;
  std::vector<ExampleRecord> records;  // evaluation-split order
  MetricReport report;                 // successful records only
  std::size_t failures = 0;
  std::optional<DeltaSummary> vs_baseline;
};

// Rebuilds the report from successful records.
MetricReport report_from_records(const std::vector<ExampleRecord>& records);

// Reads <dir>/records/<condition>.jsonl.
ExperimentResult load_result(const std::filesystem::path& output_dir,
                             const std::string& condition);
ExperimentResult load_result_file(const std::filesystem::path& records_file);

std::string sweep_condition_name(PerturbationKind kind, Selection selection,
                                 double fraction);

// Loads the dataset, builds or loads the index and the embedding store on
// demand, and runs conditions. Each condition writes
// <output_dir>/records/<condition>.jsonl plus .report.json/.report.csv;
// wall-clock data goes to <output_dir>/manifest.json only. Completed
// (condition, example) pairs found on disk are not recomputed.
class ExperimentRunner {
 public:
  explicit ExperimentRunner(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const Dataset& dataset() const { return dataset_; }
  const DocumentIndex& index();
  const EmbeddingStore& embeddings();

  // Ground-truth documents, truncated and summarized.
  ExperimentResult run_baseline();

  // Pseudo-query, rank, resolve k, summarize the top-k. Deltas against
  // `baseline` when given.
  ExperimentResult run_open_domain(const ExperimentResult* baseline = nullptr);

  // One result per (template, fraction). Writes sweep.csv with columns
  // kind,selection,fraction,mean_delta,ci68.
  std::vector<ExperimentResult> run_perturbation_sweep(
      const ExperimentResult& baseline);

  // Retrieves the top-k for every train example and writes a dataset file
  // with those documents as inputs.
  std::filesystem::path export_open_domain_trainset(
      std::optional<std::filesystem::path> out = std::nullopt);

  // Ranked lists for the evaluation split, cut at the resolved k or at
  // `cutoff` when given.
  std::vector<RankedRetrieval> retrieve(
      std::optional<std::size_t> cutoff = std::nullopt);

  struct RetrievalEval {
    std::string example_id;
    RetrievalInfo info;
  };
  std::vector<RetrievalEval> evaluate_retrieval();

  // Scores one heuristic baseline on the evaluation split.
  MetricReport run_heuristic_baseline(BaselineKind kind);

 private:
  struct Prepared {
    std::vector<Document> docs;
    std::optional<RetrievalInfo> retrieval;
    std::optional<PerturbationInfo> perturbation;
  };
  template <typename Prepare>
  ExperimentResult run_condition(const std::string& condition,
                                 Prepare&& prepare,
                                 const ExperimentResult* baseline);

  RankedRetrieval rank(const Example& example, std::size_t k);
  std::pair<std::vector<Document>, RetrievalInfo> retrieve_top_k(
      const Example& example);
  ExampleRecord finish_record(const std::string& condition,
                              const Example& example, Prepared prepared);
  void write_manifest_entry(const ExperimentResult& result, double seconds);

  ExperimentConfig config_;
  Dataset dataset_;
  std::optional<DocumentIndex> index_;
  std::optional<EmbeddingStore> embeddings_;
};

// Convenience wrappers around ExperimentRunner.
ExperimentResult run_baseline(const ExperimentConfig& config);
ExperimentResult run_open_domain(const ExperimentConfig& config,
                                 const ExperimentResult* baseline = nullptr);
std::vector<ExperimentResult> run_perturbation_sweep(
    const ExperimentConfig& config, const ExperimentResult& baseline);
std::filesystem::path export_open_domain_trainset(
    const ExperimentConfig& config,
    std::optional<std::filesystem::path> out = std::nullopt);

// Deltas of `condition` against `baseline` over examples that succeeded in
// both.
DeltaSummary compute_deltas(std::vector<ExampleRecord>& condition,
                            const ExperimentResult& baseline);

}  // namespace odmds
