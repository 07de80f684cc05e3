// odmds: command-line front end for open-domain MDS experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "odmds/baselines.hpp"
#include "odmds/corpus.hpp"
#include "odmds/errors.hpp"
#include "odmds/gateway.hpp"
#include "odmds/pipeline.hpp"
#include "odmds/report.hpp"
#include "odmds/retrieval.hpp"
#include "odmds/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace odmds;

namespace {

struct ConfigFlags {
  std::string config_path;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> split;
  std::optional<std::string> top_k;
  std::optional<std::string> retriever;
  std::optional<std::string> summarizer_endpoint;
  std::optional<std::size_t> max_input_tokens;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", config_path, "Experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    app->add_option("--output-dir", output_dir, "Override output_dir");
    app->add_option("--seed", seed, "Override seed");
    app->add_option("--split", split, "Override evaluation split")
        ->check(CLI::IsMember({"train", "validation", "test"}));
    app->add_option("--top-k", top_k, "Override top-k strategy")
        ->check(CLI::IsMember({"max", "mean", "oracle"}));
    app->add_option("--retriever", retriever, "Override retriever")
        ->check(CLI::IsMember({"sparse", "dense"}));
    app->add_option("--summarizer-endpoint", summarizer_endpoint,
                    "Override summarizer endpoint");
    app->add_option("--max-input-tokens", max_input_tokens,
                    "Override summarizer max input tokens");
  }

  ExperimentConfig load() const {
    auto c = load_config(config_path);
    if (output_dir) c.output_dir = *output_dir;
    if (seed) c.seed = *seed;
    if (split) c.split = parse_split(*split);
    if (top_k) c.top_k = parse_top_k(*top_k);
    if (retriever)
      c.retriever =
          *retriever == "dense" ? RetrieverKind::kDense : RetrieverKind::kSparse;
    if (summarizer_endpoint) c.summarizer.endpoint = *summarizer_endpoint;
    if (max_input_tokens) c.summarizer.max_input_tokens = *max_input_tokens;
    return c;
  }
};

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

void print_report(const std::string& title, const MetricReport& r,
                  std::size_t failures) {
  std::printf("%s: n=%zu failures=%zu  R1=%.2f R2=%.2f RL=%.2f R-Avg=%.2f\n",
              title.c_str(), r.per_example.size(), failures,
              100 * r.aggregate.rouge1.f1, 100 * r.aggregate.rouge2.f1,
              100 * r.aggregate.rougeL.f1, 100 * r.aggregate_rouge_avg);
}

void print_result(const ExperimentResult& r) {
  print_report(r.condition, r.report, r.failures);
  if (r.vs_baseline) {
    std::printf("  delta R-Avg vs baseline: %+.2f (ci68 %.2f, n=%zu)\n",
                100 * r.vs_baseline->mean_delta, 100 * r.vs_baseline->ci68,
                r.vs_baseline->n);
    for (const auto& row : r.vs_baseline->significance)
      std::printf("    %-9s delta %+.2f p=%.3g%s\n", row.metric.c_str(),
                  100 * row.mean_delta, row.test.p_value,
                  row.significant ? " *" : "");
  }
}

MetricReport load_any_report(const fs::path& path) {
  if (path.extension() == ".csv") {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return read_report_csv(in);
  }
  return load_result_file(path).report;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-domain multi-document summarization benchmark harness"};
  app.require_subcommand(1);

  // index
  auto* index_cmd = app.add_subcommand("index", "Build a document index");
  std::string dataset_path;
  std::string index_out;
  std::optional<std::size_t> max_input_docs;
  index_cmd->add_option("-d,--dataset", dataset_path, "Dataset JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  index_cmd->add_option("-o,--out", index_out, "Index file")->required();
  index_cmd->add_option("--max-input-docs", max_input_docs,
                        "Keep only the first N documents per example");

  // retrieve
  auto* retrieve_cmd =
      app.add_subcommand("retrieve", "Rank documents for every example");
  ConfigFlags retrieve_flags;
  retrieve_flags.attach(retrieve_cmd);
  std::optional<std::size_t> cutoff;
  std::string rankings_out;
  retrieve_cmd->add_option("--cutoff", cutoff,
                           "Fixed cutoff instead of the top-k strategy");
  retrieve_cmd->add_option("-o,--out", rankings_out, "Rankings CSV")
      ->required();

  // evaluate-retrieval
  auto* evalret_cmd = app.add_subcommand(
      "evaluate-retrieval", "P@K, R@K and retrieval error counts");
  ConfigFlags evalret_flags;
  evalret_flags.attach(evalret_cmd);
  std::string evalret_out;
  evalret_cmd->add_option("-o,--out", evalret_out, "Per-example CSV");

  // run-baseline
  auto* baseline_cmd = app.add_subcommand(
      "run-baseline", "Summarize ground-truth inputs and score them");
  ConfigFlags baseline_flags;
  baseline_flags.attach(baseline_cmd);

  // run-open-domain
  auto* open_cmd = app.add_subcommand(
      "run-open-domain", "Retrieve-then-summarize and score");
  ConfigFlags open_flags;
  open_flags.attach(open_cmd);
  std::string open_baseline;
  open_cmd->add_option("--baseline", open_baseline,
                       "Baseline records JSONL for deltas")
      ->check(CLI::ExistingFile);

  // perturb-sweep
  auto* sweep_cmd =
      app.add_subcommand("perturb-sweep", "Perturbation sweep over fractions");
  ConfigFlags sweep_flags;
  sweep_flags.attach(sweep_cmd);
  std::string sweep_baseline;
  sweep_cmd->add_option("--baseline", sweep_baseline,
                        "Baseline records JSONL (run first when omitted)")
      ->check(CLI::ExistingFile);

  // baselines
  auto* heur_cmd = app.add_subcommand("baselines", "Heuristic summary baselines");
  ConfigFlags heur_flags;
  heur_flags.attach(heur_cmd);
  std::string heur_kind = "all";
  heur_cmd->add_option("--kind", heur_kind,
                       "random_summary|all_lead|oracle_document|oracle_lead|"
                       "background_abstract|all");

  // export-trainset
  auto* export_cmd = app.add_subcommand(
      "export-trainset", "Write retrieved train inputs as a dataset file");
  ConfigFlags export_flags;
  export_flags.attach(export_cmd);
  std::string export_out;
  export_cmd->add_option("-o,--out", export_out, "Output dataset JSONL");

  // compare
  auto* compare_cmd =
      app.add_subcommand("compare", "Paired t-tests between two reports");
  std::string cmp_a;
  std::string cmp_b;
  std::string cmp_out;
  compare_cmd->add_option("a", cmp_a, "Report CSV or records JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("b", cmp_b, "Report CSV or records JSONL")
      ->required()
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("-o,--out", cmp_out, "Significance CSV");

  // stats
  auto* stats_cmd = app.add_subcommand(
      "stats", "Dataset statistics, binomial test or Fleiss' kappa");
  std::string stats_dataset;
  std::vector<std::size_t> binomial;
  std::string kappa_file;
  stats_cmd->add_option("-d,--dataset", stats_dataset, "Dataset JSONL")
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--binomial", binomial, "SUCCESSES FAILURES")
      ->expected(2);
  stats_cmd->add_option("--kappa", kappa_file,
                        "JSON matrix of rating counts (items x categories)")
      ->check(CLI::ExistingFile);

  // embed
  auto* embed_cmd = app.add_subcommand(
      "embed", "Populate an embedding store through a gateway /embed endpoint");
  ConfigFlags embed_flags;
  embed_flags.attach(embed_cmd);
  std::string embed_out;
  std::size_t embed_batch = 32;
  embed_cmd->add_option("-o,--out", embed_out, "Embedding store file")
      ->required();
  embed_cmd->add_option("--batch", embed_batch, "Texts per request");
  std::string embed_endpoint;
  embed_cmd->add_option("--endpoint", embed_endpoint, "Embedding endpoint URL")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*index_cmd) {
      DatasetConfig dc;
      dc.max_input_docs = max_input_docs;
      const auto ds = load_dataset(dataset_path, dc);
      const auto index = build_index(ds);
      index.save(index_out);
      std::printf("indexed %zu documents (%zu terms, avg length %.1f)\n",
                  index.size(), index.terms().size(), index.avg_doc_len());
    } else if (*retrieve_cmd) {
      ExperimentRunner runner(retrieve_flags.load());
      auto out = open_out(rankings_out);
      write_rankings_csv(runner.retrieve(cutoff), out);
    } else if (*evalret_cmd) {
      ExperimentRunner runner(evalret_flags.load());
      const auto rows = runner.evaluate_retrieval();
      double p = 0, r = 0, add = 0, del = 0, rep = 0;
      std::ostringstream csv;
      csv << "example_id,k,precision,recall,additions,deletions,replacements\n";
      for (const auto& row : rows) {
        const auto& i = row.info;
        csv << row.example_id << ',' << i.k << ',' << format_double(i.precision)
            << ',' << format_double(i.recall) << ',' << i.errors.additions
            << ',' << i.errors.deletions << ',' << i.errors.replacements
            << '\n';
        p += i.precision;
        r += i.recall;
        add += i.errors.additions;
        del += i.errors.deletions;
        rep += i.errors.replacements;
      }
      if (!evalret_out.empty()) open_out(evalret_out) << csv.str();
      const double n = static_cast<double>(rows.size());
      std::printf("n=%zu P@K=%.2f R@K=%.2f additions=%.0f deletions=%.0f "
                  "replacements=%.0f\n",
                  rows.size(), p / n, r / n, add, del, rep);
    } else if (*baseline_cmd) {
      ExperimentRunner runner(baseline_flags.load());
      print_result(runner.run_baseline());
    } else if (*open_cmd) {
      ExperimentRunner runner(open_flags.load());
      std::optional<ExperimentResult> base;
      if (!open_baseline.empty()) base = load_result_file(open_baseline);
      print_result(runner.run_open_domain(base ? &*base : nullptr));
    } else if (*sweep_cmd) {
      ExperimentRunner runner(sweep_flags.load());
      const ExperimentResult base = sweep_baseline.empty()
                                        ? runner.run_baseline()
                                        : load_result_file(sweep_baseline);
      for (const auto& r : runner.run_perturbation_sweep(base)) print_result(r);
    } else if (*heur_cmd) {
      ExperimentRunner runner(heur_flags.load());
      std::vector<BaselineKind> kinds;
      if (heur_kind == "all")
        kinds.assign(std::begin(kAllBaselines), std::end(kAllBaselines));
      else
        kinds.push_back(parse_baseline_kind(heur_kind));
      for (auto kind : kinds) {
        try {
          const auto report = runner.run_heuristic_baseline(kind);
          auto out = open_out(runner.config().output_dir /
                              ("baseline-" + std::string(to_string(kind)) +
                               ".csv"));
          write_report_csv(report, out);
          print_report(std::string(to_string(kind)), report, 0);
        } catch (const MissingField& e) {
          std::printf("%s: skipped (%s)\n", std::string(to_string(kind)).c_str(),
                      e.what());
        }
      }
    } else if (*export_cmd) {
      ExperimentRunner runner(export_flags.load());
      std::optional<fs::path> out;
      if (!export_out.empty()) out = export_out;
      std::printf("%s\n", runner.export_open_domain_trainset(out).c_str());
    } else if (*compare_cmd) {
      const auto rows = compare(load_any_report(cmp_a), load_any_report(cmp_b));
      if (!cmp_out.empty()) {
        auto out = open_out(cmp_out);
        write_significance_csv(rows, out);
      }
      for (const auto& r : rows)
        std::printf("%-9s a=%.2f b=%.2f delta=%+.2f t=%.4g p=%.3g%s\n",
                    r.metric.c_str(), 100 * r.mean_a, 100 * r.mean_b,
                    100 * r.mean_delta, r.test.statistic, r.test.p_value,
                    r.significant ? "  significant (p < 0.01)" : "");
    } else if (*stats_cmd) {
      if (!stats_dataset.empty()) {
        const auto ds = load_dataset(stats_dataset);
        auto line = [](const char* name, const DatasetStats& s) {
          std::printf("%-10s examples=%zu docs max=%zu mean=%.1f total=%zu\n",
                      name, s.num_examples, s.max_docs, s.mean_docs,
                      s.total_docs);
        };
        line("all", ds.stats());
        for (Split s : {Split::kTrain, Split::kValidation, Split::kTest})
          line(std::string(to_string(s)).c_str(), ds.split_stats(s));
      }
      if (!binomial.empty()) {
        const auto r = binomial_test(binomial[0], binomial[1]);
        std::printf("binomial n=%zu p=%.6g\n", r.n, r.p_value);
      }
      if (!kappa_file.empty()) {
        std::ifstream in(kappa_file);
        const auto m = json::parse(in).get<std::vector<std::vector<std::size_t>>>();
        std::printf("fleiss_kappa=%.6g\n", fleiss_kappa(m));
      }
    } else if (*embed_cmd) {
      const auto config = embed_flags.load();
      const auto ds = load_dataset(config.dataset_path, config.dataset);
      SummarizerSpec spec = config.summarizer;
      spec.endpoint = embed_endpoint;
      std::vector<std::pair<std::string, bool>> ids;  // (id, is_doc)
      std::vector<std::string> texts;
      for (const auto& ex : ds.examples()) {
        for (const auto& d : ex.input_docs) {
          ids.emplace_back(d.doc_id, true);
          texts.push_back(d.text);
        }
        ids.emplace_back(ex.example_id, false);
        texts.push_back(build_pseudo_query(ex, config.dataset).text);
      }
      std::optional<EmbeddingStore> store;
      for (std::size_t i = 0; i < texts.size(); i += embed_batch) {
        const std::size_t end = std::min(texts.size(), i + embed_batch);
        const auto vecs = embed_texts(
            spec, std::vector<std::string>(texts.begin() + i, texts.begin() + end));
        if (!store) store.emplace(vecs.front().size());
        for (std::size_t k = i; k < end; ++k) {
          if (ids[k].second)
            store->add_doc(ids[k].first, vecs[k - i]);
          else
            store->add_query(ids[k].first, vecs[k - i]);
        }
      }
      if (store) {
        auto out = open_out(embed_out);
        store->write(out);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
