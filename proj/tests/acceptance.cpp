// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "odmds/errors.hpp"
#include "odmds/metrics.hpp"
#include "odmds/perturbation.hpp"
#include "odmds/pipeline.hpp"
#include "odmds/retrieval.hpp"
#include "odmds/stats.hpp"
#include "odmds/text.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace odmds;
using namespace odmds::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Status { kPass, kFail, kSkip } status = kPass;
  std::string detail;
};

// Collects the first few failure messages of a criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (ok) return;
    ++failures_;
    if (failures_ <= 3) messages_ += (messages_.empty() ? "" : "; ") + what;
  }
  Outcome outcome(const std::string& summary) const {
    if (failures_ == 0)
      return {Outcome::kPass, summary + ", " + std::to_string(checks_) + " checks"};
    return {Outcome::kFail, std::to_string(failures_) + "/" +
                                std::to_string(checks_) + " failed: " + messages_};
  }

 private:
  std::size_t checks_ = 0;
  std::size_t failures_ = 0;
  std::string messages_;
};

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool close(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

Outcome metric_golden() {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  for (const char* s : {"a", "the cat sat", "Police arrested three men."}) {
    for (int n : {1, 2}) {
      if (n == 2 && std::string(s) == "a") continue;
      const auto r = rouge_n(s, s, n);
      c.expect(r.precision == 1 && r.recall == 1 && r.f1 == 1,
               std::string("rouge") + std::to_string(n) + " identity on '" + s + "'");
    }
    const auto l = rouge_l(s, s);
    c.expect(l.f1 == 1, std::string("rougeL identity on '") + s + "'");
  }
  const auto r1 = rouge_n("the cat sat", "the cat ran", 1);
  c.expect(close(r1.precision, 2.0 / 3, 1e-9) && close(r1.recall, 2.0 / 3, 1e-9) &&
               close(r1.f1, 2.0 / 3, 1e-9),
           "rouge1 'the cat sat' vs 'the cat ran'");
  const auto l = rouge_l("a b c d", "a c d b");
  c.expect(close(l.precision, 0.75, 1e-9) && close(l.recall, 0.75, 1e-9),
           "rougeL LCS example");
  c.expect(close(rouge_avg(0.493, 0.203, 0.254), 0.31666666666666665, 1e-9),
           "rouge_avg(0.493, 0.203, 0.254)");
  const double secs = seconds_since(start);
  c.expect(secs < 1.0, "runtime " + fmt("%.3f s", secs));
  return c.outcome("runtime " + fmt("%.3f s", secs));
}

Outcome statistics() {
  Check c;
  const double p1 = binomial_test(60, 23).p_value;
  const double p2 = binomial_test(69, 27).p_value;
  c.expect(p1 >= 5.9e-05 && p1 <= 6.1e-05, "binomial(60,23) = " + fmt("%.4g", p1));
  c.expect(p2 >= 2.1e-05 && p2 <= 2.2e-05, "binomial(69,27) = " + fmt("%.4g", p2));
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 40;
    const double shift = (trial % 4) * 0.3;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = noise(rng) + shift;
      b[i] = noise(rng);
    }
    const auto got = paired_t_test(a, b);
    const auto want = oracle::paired_t(a, b);
    const double dt = std::fabs(got.statistic - want.t) / std::max(1.0, std::fabs(want.t));
    const double dp = std::fabs(got.p_value - want.p);
    worst = std::max({worst, dt, dp});
    c.expect(dt <= 1e-9 && dp <= 1e-9, "t-test trial " + std::to_string(trial));
  }
  c.expect(fleiss_kappa({{3, 0}, {0, 3}, {3, 0}, {0, 3}}) == 1.0, "kappa perfect agreement");
  return c.outcome("p=" + fmt("%.3e", p1) + "/" + fmt("%.3e", p2) +
                   ", worst t-test deviation " + fmt("%.1e", worst));
}

std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_int_distribution<int> q(-8, 8);  // coarse values force ties
  std::vector<float> v(dim);
  for (auto& x : v) x = static_cast<float>(q(rng)) / 4.0f;
  return v;
}

Outcome retrieval_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  Check c;
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 50;
    std::vector<Document> docs;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string ex = "t" + std::to_string(rng() % 5);
      docs.push_back({ex + "#" + std::to_string(1000 + i), random_text(rng, 20, 1, 25), ex,
                      Split::kTest});
    }
    const auto index = build_index(docs);
    const std::string q = random_text(rng, 25, 1, 8);
    const auto got = bm25_rank(index, {"q", q}, n);
    const auto want = oracle::bm25(docs, q, n);
    bool same = got.ranked.size() == want.size();
    for (std::size_t i = 0; same && i < want.size(); ++i)
      same = got.ranked[i].doc_id == want[i].doc_id &&
             close(got.ranked[i].score, want[i].score, 1e-9 * std::max(1.0, want[i].score));
    c.expect(same, "bm25 trial " + std::to_string(trial));

    const std::size_t dim = 1 + rng() % 16;
    EmbeddingStore store(dim);
    store.add_query("q", random_vector(rng, dim));
    for (const auto& d : docs) store.add_doc(d.doc_id, random_vector(rng, dim));
    const auto dgot = dense_rank(store, "q", n);
    const auto dwant = oracle::dense(store, "q", n);
    same = dgot.ranked.size() == dwant.size();
    for (std::size_t i = 0; same && i < dwant.size(); ++i)
      same = dgot.ranked[i].doc_id == dwant[i].doc_id && dgot.ranked[i].score == dwant[i].score;
    c.expect(same, "dense trial " + std::to_string(trial));
  }
  const double secs = seconds_since(start);
  c.expect(secs < 30.0, "runtime " + fmt("%.1f s", secs));
  return c.outcome("1000 trials, runtime " + fmt("%.2f s", secs));
}

Outcome pr_and_tally() {
  Check c;
  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t universe = 1 + rng() % 30;
    std::set<std::string> retrieved, gold;
    const auto fill = [&](std::set<std::string>& s) {
      while (s.empty())
        for (std::size_t i = 0; i < universe; ++i)
          if (rng() % 3 == 0) s.insert("d" + std::to_string(i));
    };
    fill(retrieved);
    fill(gold);
    const auto pr = retrieval_pr_at_k(retrieved, gold);
    const double hit = static_cast<double>(oracle::intersection_size(retrieved, gold));
    const auto t = count_retrieval_errors(retrieved, gold);
    const auto o = oracle::pair_off(retrieved, gold);
    const std::string tag = "trial " + std::to_string(trial);
    c.expect(pr.precision == hit / static_cast<double>(retrieved.size()) &&
                 pr.recall == hit / static_cast<double>(gold.size()),
             "P/R " + tag);
    c.expect(t.additions == o.additions && t.deletions == o.deletions &&
                 t.replacements == o.replacements,
             "tally " + tag);
    c.expect(t.additions + t.replacements == oracle::difference_size(retrieved, gold) &&
                 t.deletions + t.replacements == oracle::difference_size(gold, retrieved),
             "identities " + tag);
  }
  return c.outcome("10000 pairs");
}

// Cosine of token counts computed from scratch.
double cosine(const std::string& a, const std::string& b) {
  std::map<std::string, double> ca, cb;
  for (const auto& t : text::tokenize(a)) ca[t] += 1;
  for (const auto& t : text::tokenize(b)) cb[t] += 1;
  double dot = 0, na = 0, nb = 0;
  for (const auto& [t, v] : ca) {
    na += v * v;
    if (auto it = cb.find(t); it != cb.end()) dot += v * it->second;
  }
  for (const auto& [t, v] : cb) nb += v * v;
  if (na == 0 || nb == 0) return 0;
  return dot / std::sqrt(na * nb);
}

std::map<std::string, int> multiset(const std::vector<Document>& docs) {
  std::map<std::string, int> m;
  for (const auto& d : docs) ++m[d.doc_id];
  return m;
}

Outcome perturbation_suite() {
  Check c;
  std::mt19937_64 rng(99);
  std::vector<Example> exs;
  for (int i = 0; i < 40; ++i) {
    std::vector<std::string> docs;
    const std::size_t n = 1 + rng() % 8;
    for (std::size_t j = 0; j < n; ++j) docs.push_back(random_text(rng, 40, 3, 30));
    exs.push_back(make_example("p" + pad2(i), docs, random_text(rng, 40, 3, 15),
                               static_cast<Split>(rng() % 3)));
  }
  const Dataset ds("perturb", exs);
  const auto index = build_index(ds);
  const auto scorer = SimilarityScorer::lexical();
  IdentityTransformer identity;

  // Fraction 0 is the identity for every kind.
  for (const auto& ex : ds.examples())
    for (auto kind : kAllPerturbationKinds)
      for (auto sel : {Selection::kRandom, Selection::kOracle}) {
        const auto out = apply({kind, 0.0, sel, 1}, ex, index, scorer, &identity);
        c.expect(out.perturbed_docs == ex.input_docs,
                 "fraction 0 " + std::string(to_string(kind)) + " on " + ex.example_id);
      }

  struct Case {
    PerturbationSpec spec;
    std::size_t example;
  };
  std::vector<Case> cases;
  for (int i = 0; i < 1200; ++i)
    cases.push_back({{kAllPerturbationKinds[rng() % 6], static_cast<double>(rng() % 21) / 20.0,
                      rng() % 2 ? Selection::kOracle : Selection::kRandom, rng() % 1000},
                     static_cast<std::size_t>(rng() % exs.size())});

  std::vector<PerturbedExample> first;
  for (const auto& cs : cases) {
    const Example& ex = ds.examples()[cs.example];
    const auto& spec = cs.spec;
    const std::string tag = std::string(to_string(spec.kind)) + "/" +
                            std::string(to_string(spec.selection)) + "/" +
                            fmt("%.2f", spec.fraction) + " on " + ex.example_id;
    const std::size_t d = ex.input_docs.size();
    const std::size_t n = n_from_fraction(spec.fraction, d, spec.kind);
    PerturbedExample out;
    try {
      out = apply(spec, ex, index, scorer, &identity);
    } catch (const std::exception& e) {
      c.expect(false, tag + " threw " + e.what());
      first.push_back({});
      continue;
    }
    std::size_t want = d;
    if (spec.kind == PerturbationKind::kAddition || spec.kind == PerturbationKind::kDuplication)
      want = d + n;
    if (spec.kind == PerturbationKind::kDeletion) want = d - n;
    c.expect(out.perturbed_docs.size() == want, "size law " + tag);
    c.expect(!out.perturbed_docs.empty(), "non-empty " + tag);
    if (spec.kind == PerturbationKind::kSorting || spec.kind == PerturbationKind::kBacktranslation)
      c.expect(multiset(out.perturbed_docs) == multiset(ex.input_docs), "multiset " + tag);
    if (spec.kind == PerturbationKind::kDuplication) {
      const auto m = multiset(out.perturbed_docs);
      std::size_t twice = 0;
      for (const auto& [id, k] : m) twice += k == 2;
      c.expect(twice == n && m.size() == d, "duplication counts " + tag);
    }
    for (std::size_t i = 0; i < out.perturbed_docs.size(); ++i)
      if (out.provenance[i] == Provenance::kAdded)
        c.expect(out.perturbed_docs[i].source_example_id != ex.example_id, "pool origin " + tag);

    if (spec.selection == Selection::kOracle) {
      const auto targets = select_targets(ex, n, Selection::kOracle, scorer, spec.seed);
      // The n least similar, ascending.
      std::vector<double> all;
      for (const auto& doc : ex.input_docs) all.push_back(cosine(doc.text, ex.reference_summary));
      std::sort(all.begin(), all.end());
      bool ordered = targets.size() == n;
      for (std::size_t i = 0; ordered && i < n; ++i)
        ordered = close(cosine(targets[i].text, ex.reference_summary), all[i], 1e-12);
      c.expect(ordered, "oracle targets ascending " + tag);
      if (spec.kind == PerturbationKind::kAddition || spec.kind == PerturbationKind::kReplacement) {
        const auto pool = select_pool_docs(index, ex, n, Selection::kOracle, scorer, spec.seed);
        std::vector<double> pool_all;
        for (const auto& doc : index.documents())
          if (doc.source_example_id != ex.example_id)
            pool_all.push_back(cosine(doc.text, ex.reference_summary));
        std::sort(pool_all.rbegin(), pool_all.rend());
        ordered = pool.size() == n;
        for (std::size_t i = 0; ordered && i < n; ++i)
          ordered = close(cosine(pool[i].text, ex.reference_summary), pool_all[i], 1e-12);
        c.expect(ordered, "oracle pool descending " + tag);
      }
      if (spec.kind == PerturbationKind::kSorting && n == d) {
        bool sorted = true;
        for (std::size_t i = 1; i < out.perturbed_docs.size(); ++i)
          sorted = sorted && cosine(out.perturbed_docs[i - 1].text, ex.reference_summary) >=
                                 cosine(out.perturbed_docs[i].text, ex.reference_summary) - 1e-12;
        c.expect(sorted, "oracle sort non-increasing " + tag);
      }
    }
    first.push_back(std::move(out));
  }

  // Same cases again, shuffled and spread over threads.
  std::vector<std::size_t> order(cases.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), std::mt19937_64(5));
  std::vector<PerturbedExample> second(cases.size());
  {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < 4; ++t)
      pool.emplace_back([&] {
        for (std::size_t k; (k = next++) < order.size();) {
          const auto& cs = cases[order[k]];
          try {
            second[order[k]] =
                apply(cs.spec, ds.examples()[cs.example], index, scorer, &identity);
          } catch (const std::exception&) {
          }
        }
      });
  }
  for (std::size_t i = 0; i < cases.size(); ++i)
    c.expect(first[i].perturbed_docs == second[i].perturbed_docs &&
                 first[i].provenance == second[i].provenance,
             "determinism case " + std::to_string(i));
  return c.outcome(std::to_string(cases.size() + ds.examples().size() * 12) + " cases");
}

Outcome perfect_retrieval() {
  Check c;
  TempDir dir;
  const auto ds = disjoint_dataset(20, 31);
  save_dataset(ds, dir / "data.jsonl");
  ExperimentConfig cfg;
  cfg.dataset_path = dir / "data.jsonl";
  cfg.output_dir = dir / "out";
  cfg.top_k = TopK::kOracle;
  ExperimentRunner runner(cfg);
  const auto base = runner.run_baseline();
  const auto open = runner.run_open_domain(&base);
  c.expect(open.records.size() == 20 && base.records.size() == 20, "20 records each");
  for (std::size_t i = 0; i < open.records.size() && i < base.records.size(); ++i) {
    const auto& r = open.records[i];
    const std::string tag = r.example_id;
    c.expect(r.ok() && base.records[i].ok(), "ok " + tag);
    c.expect(r.scores == base.records[i].scores && r.rouge_avg == base.records[i].rouge_avg,
             "scores equal " + tag);
    c.expect(r.retrieval && r.retrieval->precision == 1.0 && r.retrieval->recall == 1.0,
             "P@K = R@K = 1 " + tag);
  }
  return c.outcome("20 examples, mean delta " + fmt("%g", open.vs_baseline->mean_delta));
}

Outcome end_to_end_determinism() {
  Check c;
  TempDir dir;
  save_dataset(disjoint_dataset(5, 8), dir / "data.jsonl");
  write_file(dir / "config.json", R"({
  "dataset": {"path": "data.jsonl", "name": "det"},
  "retriever": {"kind": "sparse"},
  "top_k": "mean",
  "fractions": [0, 0.5, 1],
  "summarizer": {"endpoint": "builtin:lead", "max_input_tokens": 40, "max_in_flight": 4},
  "seed": 17
})");
  const auto run = [&](const std::string& out) {
    const std::string cmd = std::string("\"") + ODMDS_CLI_PATH + "\" perturb-sweep -c \"" +
                            (dir / "config.json").string() + "\" --output-dir \"" +
                            (dir / out).string() + "\" > \"" + (dir / (out + ".log")).string() +
                            "\" 2>&1";
    return std::system(cmd.c_str());
  };
  c.expect(run("a") == 0, "first run exit status");
  c.expect(run("b") == 0, "second run exit status");
  std::size_t files = 0;
  if (fs::exists(dir / "a/records")) {
    for (const auto& entry : fs::directory_iterator(dir / "a/records")) {
      const auto name = entry.path().filename().string();
      if (entry.path().extension() != ".jsonl") continue;
      ++files;
      c.expect(read_file(entry.path()) == read_file(dir / "b/records" / name),
               "bytes differ in " + name);
    }
  }
  c.expect(files == 1 + 12 * 3, "expected 37 JSONL files, found " + std::to_string(files));
  c.expect(read_file(dir / "a/sweep.csv") == read_file(dir / "b/sweep.csv"), "sweep.csv");
  return c.outcome(std::to_string(files) + " JSONL files identical");
}

Outcome multinews_extended() {
  const char* path = std::getenv("ODMDS_MULTINEWS_PATH");
  if (!path || !*path)
    return {Outcome::kSkip, "set ODMDS_MULTINEWS_PATH to a canonical Multi-News JSONL"};
  Check c;
  TempDir dir;
  ExperimentConfig cfg;
  cfg.dataset_path = path;
  cfg.dataset.name = "multi_news";
  cfg.output_dir = dir / "out";
  std::string summary;
  for (auto [k, want_p, want_r] : {std::tuple{TopK::kMax, 0.22, 0.82},
                                   std::tuple{TopK::kMean, 0.64, 0.74}}) {
    cfg.top_k = k;
    ExperimentRunner r(cfg);
    double p = 0, rc = 0;
    const auto evals = r.evaluate_retrieval();
    for (const auto& e : evals) {
      p += e.info.precision;
      rc += e.info.recall;
    }
    p /= static_cast<double>(evals.size());
    rc /= static_cast<double>(evals.size());
    const std::string tag = std::string(to_string(k)) + "-k";
    c.expect(close(p, want_p, 0.02), tag + " P@K " + fmt("%.3f", p));
    c.expect(close(rc, want_r, 0.02), tag + " R@K " + fmt("%.3f", rc));
    summary += tag + " P/R " + fmt("%.3f", p) + "/" + fmt("%.3f", rc) + " ";
  }
  return c.outcome(summary);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"metric golden suite", metric_golden},
      {"statistics", statistics},
      {"retrieval oracle equivalence", retrieval_equivalence},
      {"P/R@K and error tally", pr_and_tally},
      {"perturbation invariants", perturbation_suite},
      {"perfect-retrieval fixed point", perfect_retrieval},
      {"end-to-end determinism", end_to_end_determinism},
      {"Multi-News retrieval (extended)", multinews_extended},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {Outcome::kFail, std::string("exception: ") + e.what()};
    }
    const char* tag = o.status == Outcome::kPass ? "PASS" : o.status == Outcome::kSkip ? "SKIP" : "FAIL";
    failed += o.status == Outcome::kFail;
    std::printf("%s  %s  (%s)\n", tag, name.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
