#include "odmds/report.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "odmds/errors.hpp"

namespace odmds {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

MetricReport make_report(std::vector<ExampleScores> per_example) {
  MetricReport r;
  r.per_example = std::move(per_example);
  const std::size_t n = r.per_example.size();
  if (n == 0) return r;
  auto avg = [&](auto field) {
    double s = 0.0;
    for (const auto& e : r.per_example) s += field(e);
    return s / static_cast<double>(n);
  };
  auto agg = [&](auto pick) {
    return RougeScore{avg([&](const ExampleScores& e) { return pick(e).precision; }),
                      avg([&](const ExampleScores& e) { return pick(e).recall; }),
                      avg([&](const ExampleScores& e) { return pick(e).f1; })};
  };
  r.aggregate.rouge1 = agg([](const ExampleScores& e) { return e.rouge.rouge1; });
  r.aggregate.rouge2 = agg([](const ExampleScores& e) { return e.rouge.rouge2; });
  r.aggregate.rougeL = agg([](const ExampleScores& e) { return e.rouge.rougeL; });
  r.aggregate_rouge_avg = avg([](const ExampleScores& e) { return e.rouge_avg; });
  return r;
}

namespace {

constexpr const char* kReportHeader =
    "example_id,rouge1_p,rouge1_r,rouge1_f,rouge2_p,rouge2_r,rouge2_f,"
    "rougeL_p,rougeL_r,rougeL_f,rouge_avg";
constexpr const char* kMeanRow = "__mean__";

void write_row(std::ostream& out, const std::string& id, const RougeTriple& t,
               double avg) {
  out << id;
  for (const RougeScore* s : {&t.rouge1, &t.rouge2, &t.rougeL})
    out << ',' << format_double(s->precision) << ','
        << format_double(s->recall) << ',' << format_double(s->f1);
  out << ',' << format_double(avg) << '\n';
}

json score_json(const RougeScore& s) {
  return {{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

}  // namespace

void write_report_csv(const MetricReport& report, std::ostream& out) {
  out << kReportHeader << '\n';
  for (const auto& e : report.per_example)
    write_row(out, e.example_id, e.rouge, e.rouge_avg);
  write_row(out, kMeanRow, report.aggregate, report.aggregate_rouge_avg);
}

MetricReport read_report_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<ExampleScores> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1) {
      if (line != kReportHeader)
        throw ParseError(lineno, "unexpected report header");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw ParseError(lineno, "expected 11 fields");
    if (f[0] == kMeanRow) continue;
    std::vector<double> v;
    try {
      for (std::size_t i = 1; i < f.size(); ++i) v.push_back(std::stod(f[i]));
    } catch (const std::exception&) {
      throw ParseError(lineno, "bad number");
    }
    rows.push_back(ExampleScores{
        f[0],
        RougeTriple{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}, {v[6], v[7], v[8]}},
        v[9]});
  }
  return make_report(std::move(rows));
}

json to_json(const MetricReport& report) {
  json rows = json::array();
  for (const auto& e : report.per_example)
    rows.push_back({{"example_id", e.example_id},
                    {"rouge1", score_json(e.rouge.rouge1)},
                    {"rouge2", score_json(e.rouge.rouge2)},
                    {"rougeL", score_json(e.rouge.rougeL)},
                    {"rouge_avg", e.rouge_avg}});
  return {{"n", report.per_example.size()},
          {"aggregate",
           {{"rouge1", score_json(report.aggregate.rouge1)},
            {"rouge2", score_json(report.aggregate.rouge2)},
            {"rougeL", score_json(report.aggregate.rougeL)},
            {"rouge_avg", report.aggregate_rouge_avg}}},
          {"per_example", std::move(rows)}};
}

std::vector<SignificanceRow> compare(const MetricReport& a,
                                     const MetricReport& b, double alpha) {
  std::map<std::string, const ExampleScores*> by_id;
  for (const auto& e : b.per_example) by_id[e.example_id] = &e;
  if (a.per_example.size() != b.per_example.size() ||
      by_id.size() != b.per_example.size())
    throw LengthMismatch("reports cover different example sets");
  std::vector<const ExampleScores*> pa;
  std::vector<const ExampleScores*> pb;
  for (const auto& e : a.per_example) {
    auto it = by_id.find(e.example_id);
    if (it == by_id.end())
      throw LengthMismatch("example '" + e.example_id +
                           "' missing from the second report");
    pa.push_back(&e);
    pb.push_back(it->second);
  }
  using Getter = double (*)(const ExampleScores&);
  const std::pair<const char*, Getter> metrics[] = {
      {"rouge1_f", [](const ExampleScores& e) { return e.rouge.rouge1.f1; }},
      {"rouge2_f", [](const ExampleScores& e) { return e.rouge.rouge2.f1; }},
      {"rougeL_f", [](const ExampleScores& e) { return e.rouge.rougeL.f1; }},
      {"rouge_avg", [](const ExampleScores& e) { return e.rouge_avg; }},
  };
  std::vector<SignificanceRow> rows;
  for (const auto& [name, get] : metrics) {
    std::vector<double> xa;
    std::vector<double> xb;
    for (std::size_t i = 0; i < pa.size(); ++i) {
      xa.push_back(get(*pa[i]));
      xb.push_back(get(*pb[i]));
    }
    SignificanceRow row;
    row.metric = name;
    row.mean_a = mean(xa);
    row.mean_b = mean(xb);
    row.mean_delta = row.mean_a - row.mean_b;
    row.test = paired_t_test(xa, xb);
    row.significant = row.test.p_value < alpha;
    rows.push_back(row);
  }
  return rows;
}

json to_json(const std::vector<SignificanceRow>& rows) {
  json out = json::array();
  for (const auto& r : rows) {
    // JSON has no infinity; degenerate statistics are written as strings.
    json stat = std::isfinite(r.test.statistic)
                    ? json(r.test.statistic)
                    : json(r.test.statistic > 0 ? "inf" : "-inf");
    out.push_back({{"metric", r.metric},
                   {"mean_a", r.mean_a},
                   {"mean_b", r.mean_b},
                   {"mean_delta", r.mean_delta},
                   {"t", std::move(stat)},
                   {"p_value", r.test.p_value},
                   {"n", r.test.n},
                   {"significant", r.significant}});
  }
  return out;
}

void write_significance_csv(const std::vector<SignificanceRow>& rows,
                            std::ostream& out) {
  out << "metric,mean_a,mean_b,mean_delta,t,p_value,n,significant\n";
  for (const auto& r : rows)
    out << r.metric << ',' << format_double(r.mean_a) << ','
        << format_double(r.mean_b) << ',' << format_double(r.mean_delta) << ','
        << format_double(r.test.statistic) << ','
        << format_double(r.test.p_value) << ',' << r.test.n << ','
        << (r.significant ? "true" : "false") << '\n';
}

}  // namespace odmds
