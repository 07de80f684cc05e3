#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "odmds/metrics.hpp"
#include "odmds/stats.hpp"

namespace odmds {

struct ExampleScores {
  std::string example_id;
  RougeTriple rouge;
  double rouge_avg = 0.0;
};

// Per-example scores and their arithmetic means. Scores are in [0, 1].
struct MetricReport {
  std::vector<ExampleScores> per_example;
  RougeTriple aggregate;
  double aggregate_rouge_avg = 0.0;
};

MetricReport make_report(std::vector<ExampleScores> per_example);

// Header example_id,rouge1_p,rouge1_r,rouge1_f,rouge2_p,rouge2_r,rouge2_f,
// rougeL_p,rougeL_r,rougeL_f,rouge_avg; one row per example, then a row
// whose example_id is "__mean__".
void write_report_csv(const MetricReport& report, std::ostream& out);
MetricReport read_report_csv(std::istream& in);

nlohmann::json to_json(const MetricReport& report);

struct SignificanceRow {
  std::string metric;  // rouge1_f, rouge2_f, rougeL_f, rouge_avg
  double mean_a = 0.0;
  double mean_b = 0.0;
  double mean_delta = 0.0;  // a - b
  TestResult test;
  bool significant = false;
};

inline constexpr double kSignificanceLevel = 0.01;

// Paired t-tests of a against b per metric, matching examples by id. Throws
// LengthMismatch unless both reports cover the same example ids.
std::vector<SignificanceRow> compare(const MetricReport& a,
                                     const MetricReport& b,
                                     double alpha = kSignificanceLevel);

nlohmann::json to_json(const std::vector<SignificanceRow>& rows);
void write_significance_csv(const std::vector<SignificanceRow>& rows,
                            std::ostream& out);

// %.17g, so values round-trip exactly.
std::string format_double(double v);

}  // namespace odmds
