#include "odmds/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "odmds/baselines.hpp"
#include "odmds/errors.hpp"
#include "odmds/stats.hpp"
#include "odmds/text.hpp"

namespace odmds {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<double> default_fractions() {
  std::vector<double> out;
  for (int i = 0; i <= 10; ++i) out.push_back(i / 10.0);
  return out;
}

// ---------------------------------------------------------------------------
// Config

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute() || base.empty()) return path;
  return base / path;
}

std::string_view similarity_name(SimilarityScorer::Kind k) {
  return k == SimilarityScorer::Kind::kEmbeddingDot ? "embedding" : "lexical";
}

}  // namespace

ExperimentConfig config_from_json(const json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  try {
    const json& d = j.at("dataset");
    c.dataset_path = resolve(base_dir, d.at("path").get<std::string>());
    c.dataset_format = d.value("format", c.dataset_format);
    if (c.dataset_format != "jsonl")
      throw InvalidArgument("unsupported dataset format '" + c.dataset_format +
                            "'");
    c.dataset.name = d.value("name", c.dataset_path.stem().string());
    const auto qf = d.value("query_field", std::string("reference_summary"));
    if (qf == "reference_summary")
      c.dataset.query_field = QueryField::kReferenceSummary;
    else if (qf == "additional_input")
      c.dataset.query_field = QueryField::kAdditionalInput;
    else
      throw InvalidArgument("unknown query_field '" + qf + "'");
    if (auto it = d.find("max_input_docs"); it != d.end() && !it->is_null())
      c.dataset.max_input_docs = it->get<std::size_t>();
    c.dataset.first_line_is_title = d.value("first_line_is_title", false);

    if (auto it = j.find("retriever"); it != j.end()) {
      const json& r = *it;
      const auto kind = r.value("kind", std::string("sparse"));
      if (kind == "sparse")
        c.retriever = RetrieverKind::kSparse;
      else if (kind == "dense")
        c.retriever = RetrieverKind::kDense;
      else
        throw InvalidArgument("unknown retriever '" + kind + "'");
      c.bm25.k1 = r.value("k1", c.bm25.k1);
      c.bm25.b = r.value("b", c.bm25.b);
      if (auto p = r.find("index"); p != r.end() && !p->is_null())
        c.index_path = resolve(base_dir, p->get<std::string>());
      if (auto p = r.find("embeddings"); p != r.end() && !p->is_null())
        c.embeddings_path = resolve(base_dir, p->get<std::string>());
    }
    c.top_k = parse_top_k(j.value("top_k", std::string("max")));

    if (auto it = j.find("perturbations"); it != j.end()) {
      if (it->is_string() && it->get<std::string>() == "all") {
        for (auto kind : kAllPerturbationKinds)
          for (auto sel : {Selection::kRandom, Selection::kOracle})
            c.perturbations.push_back({kind, sel});
      } else {
        for (const auto& p : *it)
          c.perturbations.push_back(
              {parse_perturbation_kind(p.at("kind").get<std::string>()),
               parse_selection(p.value("selection", std::string("random")))});
      }
    }
    c.fractions = j.value("fractions", default_fractions());
    for (double f : c.fractions)
      if (!(f >= 0.0 && f <= 1.0))
        throw InvalidArgument("fractions must lie in [0, 1]");
    const auto sim = j.value("similarity", std::string("lexical"));
    if (sim == "lexical")
      c.similarity = SimilarityScorer::Kind::kLexicalUnigramCosine;
    else if (sim == "embedding")
      c.similarity = SimilarityScorer::Kind::kEmbeddingDot;
    else
      throw InvalidArgument("unknown similarity '" + sim + "'");

    if (auto it = j.find("summarizer"); it != j.end())
      c.summarizer = summarizer_spec_from_json(*it);
    if (auto it = j.find("transformer"); it != j.end()) {
      json t = *it;
      if (!t.contains("endpoint")) t["endpoint"] = kBuiltinIdentity;
      if (!t.contains("id")) t["id"] = "transformer";
      c.transformer = summarizer_spec_from_json(t);
    }
    if (auto it = j.find("metrics"); it != j.end())
      c.stem = it->value("stem", true);
    c.output_dir = resolve(base_dir, j.value("output_dir", std::string("results")));
    c.seed = j.value("seed", std::uint64_t{0});
    c.split = parse_split(j.value("split", std::string("test")));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad experiment config: ") + e.what());
  }
  return c;
}

void apply_env_overrides(ExperimentConfig& config) {
  if (const char* s = std::getenv("ODMDS_SUMMARIZER_ENDPOINT"); s && *s)
    config.summarizer.endpoint = s;
  if (const char* t = std::getenv("ODMDS_TRANSFORMER_ENDPOINT"); t && *t)
    config.transformer.endpoint = t;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + ": " + e.what());
  }
  auto config = config_from_json(j, path.parent_path());
  apply_env_overrides(config);
  return config;
}

json to_json(const ExperimentConfig& c) {
  json perturbations = json::array();
  for (const auto& p : c.perturbations)
    perturbations.push_back(
        {{"kind", to_string(p.kind)}, {"selection", to_string(p.selection)}});
  return {
      {"dataset",
       {{"path", c.dataset_path.string()},
        {"format", c.dataset_format},
        {"name", c.dataset.name},
        {"query_field", c.dataset.query_field == QueryField::kAdditionalInput
                            ? "additional_input"
                            : "reference_summary"},
        {"max_input_docs", c.dataset.max_input_docs
                               ? json(*c.dataset.max_input_docs)
                               : json(nullptr)},
        {"first_line_is_title", c.dataset.first_line_is_title}}},
      {"retriever",
       {{"kind", c.retriever == RetrieverKind::kDense ? "dense" : "sparse"},
        {"k1", c.bm25.k1},
        {"b", c.bm25.b},
        {"index", c.index_path ? json(c.index_path->string()) : json(nullptr)},
        {"embeddings", c.embeddings_path ? json(c.embeddings_path->string())
                                         : json(nullptr)}}},
      {"top_k", to_string(c.top_k)},
      {"perturbations", std::move(perturbations)},
      {"fractions", c.fractions},
      {"similarity", similarity_name(c.similarity)},
      {"summarizer", to_json(c.summarizer)},
      {"transformer", to_json(c.transformer)},
      {"metrics", {{"stem", c.stem}}},
      {"output_dir", c.output_dir.string()},
      {"seed", c.seed},
      {"split", to_string(c.split)}};
}

// ---------------------------------------------------------------------------
// Records

namespace {

json score_json(const RougeScore& s) {
  return {{"p", s.precision}, {"r", s.recall}, {"f", s.f1}};
}

RougeScore score_from_json(const json& j) {
  return {j.at("p").get<double>(), j.at("r").get<double>(),
          j.at("f").get<double>()};
}

Provenance parse_provenance(std::string_view s) {
  for (auto p : {Provenance::kKept, Provenance::kAdded, Provenance::kDuplicated,
                 Provenance::kTransformed})
    if (to_string(p) == s) return p;
  throw InvalidArgument("unknown provenance '" + std::string(s) + "'");
}

}  // namespace

json to_json(const ExampleRecord& r) {
  json j = {{"condition", r.condition}, {"example_id", r.example_id}};
  if (r.error) {
    j["error"] = *r.error;
    return j;
  }
  j["input_doc_ids"] = r.input_doc_ids;
  j["summary"] = r.summary;
  j["model_id"] = r.model_id;
  j["scores"] = {{"rouge1", score_json(r.scores.rouge1)},
                 {"rouge2", score_json(r.scores.rouge2)},
                 {"rougeL", score_json(r.scores.rougeL)},
                 {"rouge_avg", r.rouge_avg}};
  if (r.retrieval)
    j["retrieval"] = {{"k", r.retrieval->k},
                      {"precision", r.retrieval->precision},
                      {"recall", r.retrieval->recall},
                      {"additions", r.retrieval->errors.additions},
                      {"deletions", r.retrieval->errors.deletions},
                      {"replacements", r.retrieval->errors.replacements}};
  if (r.perturbation) {
    json prov = json::array();
    for (auto p : r.perturbation->provenance) prov.push_back(to_string(p));
    j["perturbation"] = {{"spec", to_json(r.perturbation->spec)},
                         {"provenance", std::move(prov)},
                         {"removed_doc_ids", r.perturbation->removed_doc_ids}};
  }
  if (r.delta_rouge_avg) j["delta_rouge_avg"] = *r.delta_rouge_avg;
  return j;
}

ExampleRecord record_from_json(const json& j) {
  ExampleRecord r;
  r.condition = j.at("condition").get<std::string>();
  r.example_id = j.at("example_id").get<std::string>();
  if (auto it = j.find("error"); it != j.end()) {
    r.error = it->get<std::string>();
    return r;
  }
  r.input_doc_ids = j.at("input_doc_ids").get<std::vector<std::string>>();
  r.summary = j.at("summary").get<std::string>();
  r.model_id = j.value("model_id", std::string());
  const json& s = j.at("scores");
  r.scores = {score_from_json(s.at("rouge1")), score_from_json(s.at("rouge2")),
              score_from_json(s.at("rougeL"))};
  r.rouge_avg = s.at("rouge_avg").get<double>();
  if (auto it = j.find("retrieval"); it != j.end()) {
    RetrievalInfo info;
    info.k = it->at("k").get<std::size_t>();
    info.precision = it->at("precision").get<double>();
    info.recall = it->at("recall").get<double>();
    info.errors = {it->at("additions").get<std::size_t>(),
                   it->at("deletions").get<std::size_t>(),
                   it->at("replacements").get<std::size_t>()};
    r.retrieval = info;
  }
  if (auto it = j.find("perturbation"); it != j.end()) {
    PerturbationInfo info;
    info.spec = perturbation_spec_from_json(it->at("spec"));
    for (const auto& p : it->at("provenance"))
      info.provenance.push_back(parse_provenance(p.get<std::string>()));
    info.removed_doc_ids =
        it->at("removed_doc_ids").get<std::vector<std::string>>();
    r.perturbation = std::move(info);
  }
  if (auto it = j.find("delta_rouge_avg"); it != j.end())
    r.delta_rouge_avg = it->get<double>();
  return r;
}

MetricReport report_from_records(const std::vector<ExampleRecord>& records) {
  std::vector<ExampleScores> rows;
  for (const auto& r : records)
    if (r.ok()) rows.push_back({r.example_id, r.scores, r.rouge_avg});
  return make_report(std::move(rows));
}

namespace {

// Reads a records file, skipping lines that do not parse (a crash can leave
// a torn final line in a partial file).
std::vector<ExampleRecord> read_records(const fs::path& path, bool strict) {
  std::vector<ExampleRecord> out;
  std::ifstream in(path);
  if (!in) throw Error("cannot open records file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(record_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      if (strict) throw ParseError(lineno, e.what());
    }
  }
  return out;
}

void write_atomically(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

std::string now_iso8601() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace

ExperimentResult load_result_file(const fs::path& records_file) {
  ExperimentResult result;
  result.records = read_records(records_file, true);
  if (!result.records.empty()) result.condition = result.records.front().condition;
  for (const auto& r : result.records) result.failures += !r.ok();
  result.report = report_from_records(result.records);
  return result;
}

ExperimentResult load_result(const fs::path& output_dir,
                             const std::string& condition) {
  return load_result_file(output_dir / "records" / (condition + ".jsonl"));
}

std::string sweep_condition_name(PerturbationKind kind, Selection selection,
                                 double fraction) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%.2f", fraction);
  return "perturb-" + std::string(to_string(kind)) + "-" +
         std::string(to_string(selection)) + "-" + buf;
}

DeltaSummary compute_deltas(std::vector<ExampleRecord>& condition,
                            const ExperimentResult& baseline) {
  std::map<std::string, const ExampleRecord*> base;
  for (const auto& r : baseline.records)
    if (r.ok()) base[r.example_id] = &r;
  DeltaSummary out;
  std::vector<double> deltas;
  std::vector<ExampleScores> a;
  std::vector<ExampleScores> b;
  for (auto& r : condition) {
    if (!r.ok()) continue;
    auto it = base.find(r.example_id);
    if (it == base.end()) continue;
    r.delta_rouge_avg = r.rouge_avg - it->second->rouge_avg;
    deltas.push_back(*r.delta_rouge_avg);
    a.push_back({r.example_id, r.scores, r.rouge_avg});
    b.push_back({r.example_id, it->second->scores, it->second->rouge_avg});
  }
  out.n = deltas.size();
  out.mean_delta = mean(deltas);
  out.ci68 = standard_error(deltas);
  if (deltas.size() >= 2)
    out.significance = compare(make_report(std::move(a)), make_report(std::move(b)));
  return out;
}

// ---------------------------------------------------------------------------
// Runner

ExperimentRunner::ExperimentRunner(ExperimentConfig config)
    : config_(std::move(config)),
      dataset_(load_dataset(config_.dataset_path, config_.dataset)) {
  if (dataset_.examples_in(config_.split).empty())
    throw InvalidArgument("dataset has no examples in split '" +
                          std::string(to_string(config_.split)) + "'");
  if (config_.fractions.empty()) config_.fractions = default_fractions();
}

const DocumentIndex& ExperimentRunner::index() {
  if (!index_) {
    if (config_.index_path && fs::exists(*config_.index_path))
      index_ = DocumentIndex::load(*config_.index_path);
    else
      index_ = build_index(dataset_);
  }
  return *index_;
}

const EmbeddingStore& ExperimentRunner::embeddings() {
  if (!embeddings_) {
    if (!config_.embeddings_path)
      throw InvalidArgument("dense retrieval or embedding similarity needs "
                            "retriever.embeddings in the config");
    embeddings_ = EmbeddingStore::load(*config_.embeddings_path);
  }
  return *embeddings_;
}

RankedRetrieval ExperimentRunner::rank(const Example& example, std::size_t k) {
  if (config_.retriever == RetrieverKind::kDense)
    return dense_rank(embeddings(), example.example_id, k);
  return bm25_rank(index(), build_pseudo_query(example, config_.dataset), k,
                   config_.bm25);
}

std::pair<std::vector<Document>, RetrievalInfo>
ExperimentRunner::retrieve_top_k(const Example& example) {
  RetrievalInfo info;
  info.k = resolve_k(config_.top_k, dataset_, example);
  const auto ranked = rank(example, info.k);
  std::vector<Document> docs;
  std::set<std::string> retrieved;
  for (const auto& id : ranked.top_ids(info.k)) {
    const Document* d = index().find(id);
    if (!d)
      throw MissingVector("retrieved document '" + id +
                          "' is not in the document index");
    docs.push_back(*d);
    retrieved.insert(id);
  }
  std::set<std::string> gold;
  for (const auto& d : example.input_docs) gold.insert(d.doc_id);
  const auto pr = retrieval_pr_at_k(retrieved, gold);
  info.precision = pr.precision;
  info.recall = pr.recall;
  info.errors = count_retrieval_errors(retrieved, gold);
  return {std::move(docs), info};
}

ExampleRecord ExperimentRunner::finish_record(const std::string& condition,
                                              const Example& example,
                                              Prepared prepared) {
  ExampleRecord rec;
  rec.condition = condition;
  rec.example_id = example.example_id;
  rec.retrieval = prepared.retrieval;
  rec.perturbation = std::move(prepared.perturbation);
  std::vector<std::string> texts;
  for (const auto& d : prepared.docs) {
    rec.input_doc_ids.push_back(d.doc_id);
    texts.push_back(d.text);
  }
  SummaryRequest request;
  request.documents =
      truncate_inputs(texts, config_.summarizer.max_input_tokens);
  request.additional_input = example.additional_input;
  request.max_words = config_.summarizer.max_words_hint;
  request.request_id = condition + "/" + example.example_id;
  const auto response = summarize(config_.summarizer, request);
  rec.summary = response.summary;
  rec.model_id = response.model_id;
  rec.scores =
      score_summary(rec.summary, example.reference_summary, config_.stem);
  rec.rouge_avg = rec.scores.rouge_avg_f1();
  return rec;
}

template <typename Prepare>
ExperimentResult ExperimentRunner::run_condition(
    const std::string& condition, Prepare&& prepare,
    const ExperimentResult* baseline) {
  const auto started = std::chrono::steady_clock::now();
  const fs::path rec_dir = config_.output_dir / "records";
  fs::create_directories(rec_dir);
  const fs::path final_path = rec_dir / (condition + ".jsonl");
  const fs::path partial_path = rec_dir / (condition + ".partial.jsonl");

  const auto examples = dataset_.examples_in(config_.split);
  std::map<std::string, ExampleRecord> done;
  for (const auto& path : {final_path, partial_path}) {
    if (!fs::exists(path)) continue;
    for (auto& r : read_records(path, false))
      if (r.ok() && r.condition == condition)
        done.insert_or_assign(r.example_id, std::move(r));
  }

  std::vector<std::optional<ExampleRecord>> slots(examples.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (auto it = done.find(examples[i]->example_id); it != done.end()) {
      slots[i] = std::move(it->second);
      slots[i]->delta_rouge_avg.reset();
    } else {
      pending.push_back(i);
    }
  }

  if (!pending.empty()) {
    std::ofstream partial(partial_path, std::ios::app | std::ios::binary);
    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const std::size_t idx = next.fetch_add(1);
        if (idx >= pending.size()) return;
        const Example& ex = *examples[pending[idx]];
        ExampleRecord rec;
        try {
          rec = finish_record(condition, ex, prepare(ex));
        } catch (const std::exception& e) {
          rec = ExampleRecord{};
          rec.condition = condition;
          rec.example_id = ex.example_id;
          rec.error = e.what();
        }
        std::lock_guard lock(mu);
        partial << to_json(rec).dump() << '\n';
        partial.flush();
        slots[pending[idx]] = std::move(rec);
      }
    };
    const std::size_t n_workers =
        std::min(pending.size(), std::max<std::size_t>(
                                     1, config_.summarizer.max_in_flight));
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  }

  ExperimentResult result;
  result.condition = condition;
  result.config_snapshot = to_json(config_);
  for (auto& s : slots) result.records.push_back(std::move(*s));
  for (const auto& r : result.records) result.failures += !r.ok();
  if (baseline) result.vs_baseline = compute_deltas(result.records, *baseline);
  result.report = report_from_records(result.records);

  std::string body;
  for (const auto& r : result.records) body += to_json(r).dump() + "\n";
  write_atomically(final_path, body);
  fs::remove(partial_path);

  json report = to_json(result.report);
  report["condition"] = condition;
  report["failures"] = result.failures;
  if (result.vs_baseline) {
    report["vs_baseline"] = {{"n", result.vs_baseline->n},
                             {"mean_delta_rouge_avg", result.vs_baseline->mean_delta},
                             {"ci68", result.vs_baseline->ci68},
                             {"significance", to_json(result.vs_baseline->significance)}};
  }
  write_atomically(rec_dir / (condition + ".report.json"), report.dump(2) + "\n");
  std::ostringstream csv;
  write_report_csv(result.report, csv);
  write_atomically(rec_dir / (condition + ".report.csv"), csv.str());

  const double seconds = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();
  write_manifest_entry(result, seconds);
  return result;
}

void ExperimentRunner::write_manifest_entry(const ExperimentResult& result,
                                            double seconds) {
  const fs::path path = config_.output_dir / "manifest.json";
  json manifest = json::object();
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      manifest = json::parse(in);
    } catch (const json::exception&) {
      manifest = json::object();
    }
  }
  manifest["config"] = to_json(config_);
  manifest["updated_at"] = now_iso8601();
  manifest["conditions"][result.condition] = {
      {"examples", result.records.size()},
      {"failures", result.failures},
      {"seconds", seconds},
      {"finished_at", now_iso8601()}};
  write_atomically(path, manifest.dump(2) + "\n");
}

ExperimentResult ExperimentRunner::run_baseline() {
  return run_condition(
      "baseline",
      [](const Example& ex) { return Prepared{ex.input_docs, {}, {}}; },
      nullptr);
}

ExperimentResult ExperimentRunner::run_open_domain(
    const ExperimentResult* baseline) {
  // Load shared state before workers start.
  if (config_.retriever == RetrieverKind::kDense) embeddings();
  index();
  const std::string name =
      std::string("open-domain-") +
      (config_.retriever == RetrieverKind::kDense ? "dense" : "sparse") + "-" +
      std::string(to_string(config_.top_k));
  return run_condition(
      name,
      [this](const Example& ex) {
        auto [docs, info] = retrieve_top_k(ex);
        return Prepared{std::move(docs), info, {}};
      },
      baseline);
}

std::vector<ExperimentResult> ExperimentRunner::run_perturbation_sweep(
    const ExperimentResult& baseline) {
  index();
  const SimilarityScorer scorer =
      config_.similarity == SimilarityScorer::Kind::kEmbeddingDot
          ? SimilarityScorer::embedding(embeddings())
          : SimilarityScorer::lexical();
  const GatewayTransformer transformer(config_.transformer);
  auto templates = config_.perturbations;
  if (templates.empty())
    for (auto kind : kAllPerturbationKinds)
      for (auto sel : {Selection::kRandom, Selection::kOracle})
        templates.push_back({kind, sel});

  std::vector<ExperimentResult> results;
  std::string csv = "kind,selection,fraction,mean_delta,ci68\n";
  for (const auto& t : templates) {
    for (double fraction : config_.fractions) {
      const PerturbationSpec spec{t.kind, fraction, t.selection, config_.seed};
      auto result = run_condition(
          sweep_condition_name(t.kind, t.selection, fraction),
          [&](const Example& ex) {
            auto p = apply(spec, ex, *index_, scorer, &transformer);
            return Prepared{std::move(p.perturbed_docs),
                            {},
                            PerturbationInfo{spec, std::move(p.provenance),
                                             std::move(p.removed_doc_ids)}};
          },
          &baseline);
      const DeltaSummary d = result.vs_baseline.value_or(DeltaSummary{});
      char frac[16];
      std::snprintf(frac, sizeof frac, "%.2f", fraction);
      csv += std::string(to_string(t.kind)) + "," +
             std::string(to_string(t.selection)) + "," + frac + "," +
             format_double(d.mean_delta) + "," + format_double(d.ci68) + "\n";
      results.push_back(std::move(result));
    }
  }
  fs::create_directories(config_.output_dir);
  write_atomically(config_.output_dir / "sweep.csv", csv);
  return results;
}

fs::path ExperimentRunner::export_open_domain_trainset(
    std::optional<fs::path> out) {
  if (config_.retriever == RetrieverKind::kDense) embeddings();
  index();
  const fs::path path =
      out ? *out : config_.output_dir / (dataset_.name() + ".open-domain.train.jsonl");
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::vector<Example> exported;
  for (const Example* ex : dataset_.examples_in(Split::kTrain)) {
    auto [docs, info] = retrieve_top_k(*ex);
    Example e = *ex;
    e.input_docs.clear();
    for (std::size_t i = 0; i < docs.size(); ++i)
      e.input_docs.push_back(Document{make_doc_id(e.example_id, i),
                                      std::move(docs[i].text), e.example_id,
                                      e.split});
    exported.push_back(std::move(e));
  }
  Dataset ds(dataset_.name(), std::move(exported));
  validate(ds);
  std::ostringstream body;
  write_dataset(ds, body);
  write_atomically(path, body.str());
  return path;
}

std::vector<RankedRetrieval> ExperimentRunner::retrieve(
    std::optional<std::size_t> cutoff) {
  std::vector<RankedRetrieval> runs;
  for (const Example* ex : dataset_.examples_in(config_.split)) {
    const std::size_t k =
        cutoff ? *cutoff : resolve_k(config_.top_k, dataset_, *ex);
    runs.push_back(rank(*ex, k));
  }
  return runs;
}

std::vector<ExperimentRunner::RetrievalEval>
ExperimentRunner::evaluate_retrieval() {
  std::vector<RetrievalEval> out;
  for (const Example* ex : dataset_.examples_in(config_.split))
    out.push_back({ex->example_id, retrieve_top_k(*ex).second});
  return out;
}

MetricReport ExperimentRunner::run_heuristic_baseline(BaselineKind kind) {
  std::vector<ExampleScores> rows;
  for (const Example* ex : dataset_.examples_in(config_.split)) {
    const auto summary =
        run_baseline_kind(kind, *ex, dataset_, config_.dataset, config_.seed);
    const auto scores =
        score_summary(summary, ex->reference_summary, config_.stem);
    rows.push_back({ex->example_id, scores, scores.rouge_avg_f1()});
  }
  return make_report(std::move(rows));
}

ExperimentResult run_baseline(const ExperimentConfig& config) {
  return ExperimentRunner(config).run_baseline();
}

ExperimentResult run_open_domain(const ExperimentConfig& config,
                                 const ExperimentResult* baseline) {
  return ExperimentRunner(config).run_open_domain(baseline);
}

std::vector<ExperimentResult> run_perturbation_sweep(
    const ExperimentConfig& config, const ExperimentResult& baseline) {
  return ExperimentRunner(config).run_perturbation_sweep(baseline);
}

fs::path export_open_domain_trainset(const ExperimentConfig& config,
                                     std::optional<fs::path> out) {
  return ExperimentRunner(config).export_open_domain_trainset(std::move(out));
}

}  // namespace odmds
