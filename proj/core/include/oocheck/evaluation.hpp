#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oocheck/types.hpp"

namespace oocheck {

struct SampleTimings {
  double retrieval_s = 0.0;  // search + embedding provider wall time
  double reasoning_s = 0.0;  // chat provider wall time
  double overhead_s = 0.0;   // everything else
  double total_s = 0.0;
};

struct PredictionRow {
  std::string id;
  std::optional<bool> gold_ooc;
  std::optional<Label> predicted;  // absent when the sample errored
  std::optional<int> confidence;
  std::optional<std::string> error;
  std::string trace_path;
  SampleTimings timings;
};

// Accuracy is kept as exact counts; the double accessors divide on demand
// and the *_rounded accessors apply the documented 4-decimal half-up
// rounding used in serialized reports.
struct EvalMetrics {
  std::size_t n_total = 0;
  std::size_t n_ooc = 0;
  std::size_t n_nooc = 0;
  std::size_t correct_ooc = 0;
  std::size_t correct_nooc = 0;
  std::size_t error_count = 0;

  std::size_t correct_total() const { return correct_ooc + correct_nooc; }
  std::optional<double> acc_all() const;
  std::optional<double> acc_ooc() const;
  std::optional<double> acc_nooc() const;
  std::optional<double> acc_all_rounded() const;
  std::optional<double> acc_ooc_rounded() const;
  std::optional<double> acc_nooc_rounded() const;
};

// Round-half-up to four decimals, computed in integer arithmetic so the
// result is identical everywhere.
double round_ratio_4dp(std::size_t numerator, std::size_t denominator);

// Newline-delimited records: {"id", "image_path", "caption", "ooc"}.
// Image paths resolve relative to the dataset file. Throws
// EDatasetMalformed (with the record locus) and EDuplicateId.
std::vector<DatasetRecord> load_dataset(const std::string& path);

// Counts correct predictions per class. Every gold id must have a row
// (EMissingPrediction otherwise); rows with errors count as incorrect.
EvalMetrics evaluate(const std::vector<PredictionRow>& predictions,
                     const std::vector<DatasetRecord>& gold);

struct EvalReport {
  EvalMetrics metrics;
  std::vector<PredictionRow> per_sample;  // sorted by id
  std::string config_fingerprint;
  double mean_latency_retrieval_s = 0.0;
  double mean_latency_reasoning_s = 0.0;
  double mean_latency_overhead_s = 0.0;
};

// Serializes the deterministic portion of the report (metrics, verdicts,
// fingerprint) to report.json and all wall-clock figures to timings.json,
// both written atomically. Throws EReportIO.
void write_report(const EvalReport& report, const std::string& report_dir);

// The one-line summary printed after a benchmark run:
// "all=<pct> ooc=<pct> nooc=<pct> n=<count>".
std::string summary_line(const EvalMetrics& metrics);

}  // namespace oocheck
