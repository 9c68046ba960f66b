#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "oocheck/cache.hpp"
#include "oocheck/config.hpp"
#include "oocheck/digest.hpp"
#include "oocheck/error.hpp"
#include "oocheck/evaluation.hpp"
#include "oocheck/pipeline.hpp"
#include "oocheck/service.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oocheck;

namespace {

constexpr int kExitNooc = 0;
constexpr int kExitOoc = 1;
constexpr int kExitError = 2;

struct CommonFlags {
  std::string config_path;
  std::string cache_dir;
  bool offline = false;
  std::optional<int> top_k;
  std::optional<std::string> strategy;
  std::optional<double> theta;
  bool drop_text = false;
  bool drop_image = false;
  bool disable_domain = false;
};

LoadedConfig effective_config(const CommonFlags& flags) {
  LoadedConfig loaded = load_config(flags.config_path);
  Config& config = loaded.config;
  if (!flags.cache_dir.empty()) config.cache_dir = flags.cache_dir;
  if (flags.offline) config.offline = true;
  if (flags.top_k) config.top_k = *flags.top_k;
  if (flags.theta) config.filter.theta = *flags.theta;
  if (flags.strategy) {
    auto parsed = filter_strategy_from_name(*flags.strategy);
    if (!parsed) {
      throw Error(Errc::ConfigInvalid, "--strategy must be both, similarity or domain");
    }
    config.filter.strategy = *parsed;
  }
  if (flags.drop_text) config.filter.drop_text_evidence = true;
  if (flags.drop_image) config.filter.drop_image_evidence = true;
  if (flags.disable_domain) config.filter.disable_domain_filter = true;
  loaded.fingerprint = config_fingerprint(config);
  return loaded;
}

void add_common_flags(CLI::App* cmd, CommonFlags& flags, bool with_ablations) {
  cmd->add_option("--config", flags.config_path, "Config file (JSON)");
  cmd->add_option("--cache-dir", flags.cache_dir, "Cache store root");
  cmd->add_flag("--offline", flags.offline, "Serve provider responses from cache only");
  if (with_ablations) {
    cmd->add_option("--top-k", flags.top_k, "Candidates forwarded to the reasoner");
    cmd->add_option("--strategy", flags.strategy,
                    "Filter strategy: both|similarity|domain");
    cmd->add_option("--theta", flags.theta, "Similarity threshold");
    cmd->add_flag("--drop-text-evidence", flags.drop_text,
                  "Ablation: drop text-search evidence");
    cmd->add_flag("--drop-image-evidence", flags.drop_image,
                  "Ablation: drop image-search evidence");
    cmd->add_flag("--disable-domain-filter", flags.disable_domain,
                  "Ablation: keep all domains");
  }
}

void print_verdict_human(const VerificationOutcome& outcome, const std::string& trace_path) {
  const FinalVerdict& v = *outcome.verdict();
  std::cout << "label: " << label_name(v.label) << "\n";
  std::cout << "confidence: " << v.confidence << "\n";
  std::cout << "explanation: " << v.explanation << "\n";
  std::cout << "evidence:\n";
  std::printf("  %-6s %-6s %-22s %9s %10s %8s\n", "id", "origin", "domain", "text_sim",
              "visual_sim", "final");
  for (const auto& sc : outcome.top) {
    auto fmt = [](const std::optional<double>& value) {
      if (!value) return std::string("n/a");
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.4f", *value);
      return std::string(buf);
    };
    std::printf("  %-6s %-6s %-22s %9s %10s %8s\n", sc.candidate.id.c_str(),
                std::string(origin_name(sc.candidate.origin)).c_str(),
                sc.candidate.domain.c_str(), fmt(sc.scores->text_sim).c_str(),
                fmt(sc.scores->visual_sim).c_str(), fmt(sc.scores->final).c_str());
  }
  if (outcome.top.empty()) {
    std::cout << "  (no evidence reached the reasoner)\n";
  }
  std::cout << "trace: " << trace_path << "\n";
}

int cmd_verify(const CommonFlags& flags, const std::string& image,
               const std::string& caption, bool as_json) {
  LoadedConfig loaded = effective_config(flags);
  Pipeline pipeline(loaded.config, loaded.fingerprint);

  ClaimPair claim;
  claim.id = "cli";
  claim.image_ref = image;
  claim.caption = caption;

  VerificationOutcome outcome = pipeline.verify(claim);
  std::string trace = pipeline.serialize_trace(outcome);

  fs::path trace_dir(loaded.config.trace_dir);
  fs::create_directories(trace_dir);
  std::string trace_id = sha256_hex(trace).substr(0, 16);
  fs::path trace_path = trace_dir / (trace_id + ".json");
  {
    std::ofstream out(trace_path, std::ios::binary | std::ios::trunc);
    out.write(trace.data(), static_cast<std::streamsize>(trace.size()));
  }

  if (!outcome.verdict()) {
    std::cerr << "error: "
              << outcome.reasoning.trace.error.value_or("reasoning produced no verdict")
              << "\n";
    std::cerr << "trace: " << trace_path.string() << "\n";
    return kExitError;
  }

  if (as_json) {
    json doc;
    doc["verdict"] = {{"label", std::string(label_name(outcome.verdict()->label))},
                      {"confidence", outcome.verdict()->confidence},
                      {"explanation", outcome.verdict()->explanation},
                      {"evidence", outcome.verdict()->evidence_ids}};
    doc["trace"] = trace_path.string();
    std::cout << doc.dump(2) << "\n";
  } else {
    print_verdict_human(outcome, trace_path.string());
  }
  return outcome.verdict()->label == Label::OOC ? kExitOoc : kExitNooc;
}

int cmd_benchmark(const CommonFlags& flags, const std::string& dataset_path,
                  const std::string& report_dir, std::optional<int> jobs) {
  LoadedConfig loaded = effective_config(flags);
  Pipeline pipeline(loaded.config, loaded.fingerprint);
  auto dataset = load_dataset(dataset_path);

  BenchmarkOptions options;
  options.report_dir = report_dir;
  options.jobs = jobs.value_or(loaded.config.jobs);
  EvalReport report = run_benchmark(dataset, pipeline, options);
  std::cout << summary_line(report.metrics) << "\n";
  return 0;
}

int cmd_cache(const CommonFlags& flags, const std::string& action,
              const std::string& tarball) {
  LoadedConfig loaded = effective_config(flags);
  FileCache cache(loaded.config.cache_dir);
  if (action == "ls") {
    for (const auto& entry : cache.list()) {
      std::cout << entry.relative_path << " " << entry.bytes << "\n";
    }
    auto stats = cache.stats();
    std::cout << "total entries=" << stats.entries << " bytes=" << stats.bytes << "\n";
  } else if (action == "clear") {
    cache.clear();
    std::cout << "cache cleared: " << cache.root().string() << "\n";
  } else {
    if (tarball.empty()) {
      throw Error(Errc::ConfigInvalid, "cache export needs a tarball path");
    }
    cache.export_tar(tarball);
    std::cout << "exported " << cache.stats().entries << " entries to " << tarball << "\n";
  }
  return 0;
}

int cmd_serve(const CommonFlags& flags, const std::string& bind, int port) {
  LoadedConfig loaded = effective_config(flags);
  auto pipeline = std::make_shared<Pipeline>(loaded.config, loaded.fingerprint);
  VerificationService service(pipeline);
  if (!service.start(bind, port)) {
    std::cerr << "error: cannot bind " << bind << ":" << port << "\n";
    return kExitError;
  }
  std::cout << "serving on " << bind << ":" << port << " (POST /verify, GET /health)"
            << std::endl;
  while (true) {
    std::this_thread::sleep_for(std::chrono::seconds(3600));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Out-of-context image-caption verification pipeline"};
  app.require_subcommand(1);

  CommonFlags verify_flags;
  std::string verify_image, verify_caption;
  bool verify_json = false;
  auto* verify = app.add_subcommand("verify", "Verify one image-caption pair");
  verify->add_option("--image", verify_image, "Image path or URI")->required();
  verify->add_option("--caption", verify_caption, "Caption text")->required();
  verify->add_flag("--json", verify_json, "Machine-readable verdict");
  add_common_flags(verify, verify_flags, true);

  CommonFlags bench_flags;
  std::string bench_dataset, bench_report;
  std::optional<int> bench_jobs;
  auto* benchmark = app.add_subcommand("benchmark", "Run a dataset through the pipeline");
  benchmark->add_option("--dataset", bench_dataset, "Dataset file (JSON lines)")->required();
  benchmark->add_option("--report", bench_report, "Report output directory")->required();
  benchmark->add_option("--jobs", bench_jobs, "Worker pool size");
  add_common_flags(benchmark, bench_flags, true);

  CommonFlags cache_flags;
  std::string cache_tarball;
  auto* cache_cmd = app.add_subcommand("cache", "Inspect or manage the response cache");
  auto* cache_ls = cache_cmd->add_subcommand("ls", "List cache entries");
  auto* cache_clear = cache_cmd->add_subcommand("clear", "Remove all cache entries");
  auto* cache_export = cache_cmd->add_subcommand("export", "Export entries as a tarball");
  cache_export->add_option("tarball", cache_tarball, "Output tarball path")->required();
  cache_cmd->require_subcommand(1);
  for (auto* sub : {cache_ls, cache_clear, cache_export}) {
    add_common_flags(sub, cache_flags, false);
  }

  CommonFlags serve_flags;
  std::string serve_bind = "127.0.0.1";
  int serve_port = 8787;
  auto* serve = app.add_subcommand("serve", "Run the verification endpoint");
  serve->add_option("--bind", serve_bind, "Bind address");
  serve->add_option("--port", serve_port, "Bind port");
  add_common_flags(serve, serve_flags, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (verify->parsed()) {
      return cmd_verify(verify_flags, verify_image, verify_caption, verify_json);
    }
    if (benchmark->parsed()) {
      return cmd_benchmark(bench_flags, bench_dataset, bench_report, bench_jobs);
    }
    if (cache_cmd->parsed()) {
      std::string action =
          cache_ls->parsed() ? "ls" : (cache_clear->parsed() ? "clear" : "export");
      return cmd_cache(cache_flags, action, cache_tarball);
    }
    if (serve->parsed()) {
      return cmd_serve(serve_flags, serve_bind, serve_port);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
