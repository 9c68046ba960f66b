#include "oocheck/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <json.hpp>

#include "oocheck/error.hpp"
#include "oocheck/text.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace oocheck {

double round_ratio_4dp(std::size_t numerator, std::size_t denominator) {
  // round-half-up of 10000 * numerator / denominator
  unsigned long long scaled =
      (20000ULL * numerator + denominator) / (2ULL * denominator);
  return static_cast<double>(scaled) / 10000.0;
}

std::optional<double> EvalMetrics::acc_all() const {
  if (n_total == 0) return std::nullopt;
  return static_cast<double>(correct_total()) / static_cast<double>(n_total);
}

std::optional<double> EvalMetrics::acc_ooc() const {
  if (n_ooc == 0) return std::nullopt;
  return static_cast<double>(correct_ooc) / static_cast<double>(n_ooc);
}

std::optional<double> EvalMetrics::acc_nooc() const {
  if (n_nooc == 0) return std::nullopt;
  return static_cast<double>(correct_nooc) / static_cast<double>(n_nooc);
}

std::optional<double> EvalMetrics::acc_all_rounded() const {
  if (n_total == 0) return std::nullopt;
  return round_ratio_4dp(correct_total(), n_total);
}

std::optional<double> EvalMetrics::acc_ooc_rounded() const {
  if (n_ooc == 0) return std::nullopt;
  return round_ratio_4dp(correct_ooc, n_ooc);
}

std::optional<double> EvalMetrics::acc_nooc_rounded() const {
  if (n_nooc == 0) return std::nullopt;
  return round_ratio_4dp(correct_nooc, n_nooc);
}

std::vector<DatasetRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(Errc::DatasetMalformed, "cannot open dataset file " + path);
  }
  fs::path base = fs::absolute(fs::path(path)).parent_path();

  std::vector<DatasetRecord> records;
  std::set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (normalize_whitespace(line).empty()) continue;
    std::string locus = path + ":" + std::to_string(line_no);
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(Errc::DatasetMalformed, locus + ": not valid JSON: " + e.what());
    }
    if (!doc.is_object()) {
      throw Error(Errc::DatasetMalformed, locus + ": record is not an object");
    }
    DatasetRecord record;
    for (const char* field : {"id", "image_path", "caption"}) {
      if (!doc.contains(field) || !doc[field].is_string() ||
          doc[field].get<std::string>().empty()) {
        throw Error(Errc::DatasetMalformed,
                    locus + ": missing or empty field '" + field + "'");
      }
    }
    record.id = doc["id"].get<std::string>();
    record.caption = doc["caption"].get<std::string>();
    if (!doc.contains("ooc") || !doc["ooc"].is_boolean()) {
      throw Error(Errc::DatasetMalformed,
                  locus + ": missing or non-boolean field 'ooc' (record " + record.id + ")");
    }
    record.ooc = doc["ooc"].get<bool>();

    fs::path image(doc["image_path"].get<std::string>());
    if (image.is_relative()) image = base / image;
    record.image_path = image.lexically_normal().string();
    if (!fs::exists(record.image_path)) {
      throw Error(Errc::DatasetMalformed,
                  locus + ": image path does not resolve for record " + record.id +
                      ": " + record.image_path);
    }

    if (!seen.insert(record.id).second) {
      throw Error(Errc::DuplicateId, locus + ": duplicate record id " + record.id);
    }
    records.push_back(std::move(record));
  }
  return records;
}

EvalMetrics evaluate(const std::vector<PredictionRow>& predictions,
                     const std::vector<DatasetRecord>& gold) {
  std::map<std::string, const PredictionRow*> by_id;
  std::set<std::string> gold_ids;
  for (const auto& record : gold) gold_ids.insert(record.id);
  for (const auto& row : predictions) {
    if (!gold_ids.count(row.id)) {
      throw Error(Errc::MissingPrediction,
                  "prediction references unknown sample id " + row.id);
    }
    by_id[row.id] = &row;
  }

  EvalMetrics metrics;
  for (const auto& record : gold) {
    auto it = by_id.find(record.id);
    if (it == by_id.end()) {
      throw Error(Errc::MissingPrediction, "no prediction for sample id " + record.id);
    }
    const PredictionRow& row = *it->second;
    ++metrics.n_total;
    if (record.ooc) {
      ++metrics.n_ooc;
    } else {
      ++metrics.n_nooc;
    }
    if (row.error) ++metrics.error_count;
    if (!row.predicted) continue;  // errored samples count as incorrect
    bool predicted_ooc = *row.predicted == Label::OOC;
    if (predicted_ooc == record.ooc) {
      if (record.ooc) {
        ++metrics.correct_ooc;
      } else {
        ++metrics.correct_nooc;
      }
    }
  }
  return metrics;
}

namespace {

json metrics_to_json(const EvalMetrics& m) {
  json counts;
  counts["n_total"] = m.n_total;
  counts["n_ooc"] = m.n_ooc;
  counts["n_nooc"] = m.n_nooc;
  counts["correct_ooc"] = m.correct_ooc;
  counts["correct_nooc"] = m.correct_nooc;
  counts["errors"] = m.error_count;

  json accuracy;
  accuracy["all"] = m.acc_all_rounded() ? json(*m.acc_all_rounded()) : json(nullptr);
  accuracy["ooc"] = m.acc_ooc_rounded() ? json(*m.acc_ooc_rounded()) : json(nullptr);
  accuracy["nooc"] = m.acc_nooc_rounded() ? json(*m.acc_nooc_rounded()) : json(nullptr);

  json out;
  out["counts"] = std::move(counts);
  out["accuracy"] = std::move(accuracy);
  return out;
}

void write_atomic(const fs::path& target, const std::string& body) {
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw Error(Errc::ReportIO, "cannot write " + target.string());
    }
    out.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!out) {
      throw Error(Errc::ReportIO, "write failed for " + target.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    throw Error(Errc::ReportIO, "cannot publish " + target.string() + ": " + ec.message());
  }
}

double round_seconds(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", value);
  return std::atof(buf);
}

}  // namespace

void write_report(const EvalReport& report, const std::string& report_dir) {
  std::error_code ec;
  fs::create_directories(report_dir, ec);
  if (ec) {
    throw Error(Errc::ReportIO, "cannot create report dir " + report_dir);
  }

  json main_doc;
  main_doc["schema"] = "oocheck-report-v1";
  main_doc["config_fingerprint"] = report.config_fingerprint;
  json metrics = metrics_to_json(report.metrics);
  main_doc["counts"] = metrics["counts"];
  main_doc["accuracy"] = metrics["accuracy"];

  auto rows = json::array();
  for (const auto& row : report.per_sample) {
    json r;
    r["id"] = row.id;
    r["gold"] = row.gold_ooc
                    ? json(std::string(label_name(*row.gold_ooc ? Label::OOC : Label::NOOC)))
                    : json(nullptr);
    r["predicted"] = row.predicted ? json(std::string(label_name(*row.predicted))) : json(nullptr);
    r["confidence"] = row.confidence ? json(*row.confidence) : json(nullptr);
    r["error"] = row.error ? json(*row.error) : json(nullptr);
    r["trace"] = row.trace_path;
    rows.push_back(std::move(r));
  }
  main_doc["per_sample"] = std::move(rows);
  write_atomic(fs::path(report_dir) / "report.json", main_doc.dump(2) + "\n");

  json timing_doc;
  timing_doc["mean_latency_retrieval_s"] = round_seconds(report.mean_latency_retrieval_s);
  timing_doc["mean_latency_reasoning_s"] = round_seconds(report.mean_latency_reasoning_s);
  timing_doc["mean_latency_overhead_s"] = round_seconds(report.mean_latency_overhead_s);
  auto timing_rows = json::array();
  for (const auto& row : report.per_sample) {
    json r;
    r["id"] = row.id;
    r["retrieval_s"] = round_seconds(row.timings.retrieval_s);
    r["reasoning_s"] = round_seconds(row.timings.reasoning_s);
    r["overhead_s"] = round_seconds(row.timings.overhead_s);
    r["total_s"] = round_seconds(row.timings.total_s);
    timing_rows.push_back(std::move(r));
  }
  timing_doc["per_sample"] = std::move(timing_rows);
  write_atomic(fs::path(report_dir) / "timings.json", timing_doc.dump(2) + "\n");
}

std::string summary_line(const EvalMetrics& metrics) {
  auto pct = [](const std::optional<double>& value) -> std::string {
    if (!value) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", *value * 100.0);
    return buf;
  };
  return "all=" + pct(metrics.acc_all_rounded()) + " ooc=" + pct(metrics.acc_ooc_rounded()) +
         " nooc=" + pct(metrics.acc_nooc_rounded()) + " n=" + std::to_string(metrics.n_total);
}

}  // namespace oocheck
