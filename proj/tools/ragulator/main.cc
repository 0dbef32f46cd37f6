// ragulator: command-line entry points for every pipeline stage and the
// detection service. Successful commands print a JSON summary on stdout;
// failures print {"error": {...}} on stderr and exit with a distinct code.

#include <csignal>
#include <cstdio>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "ragulator/common/status.h"
#include "ragulator/common/strings.h"
#include "ragulator/service/commands.h"
#include "ragulator/service/config.h"
#include "ragulator/service/detector.h"
#include "ragulator/service/server.h"
#include "spdlog/sinks/stdout_color_sinks.h"
#include "spdlog/spdlog.h"

namespace ragulator::service {
namespace {

using Override = std::function<absl::Status(PipelineConfig&)>;

// Flags that set a config field when given on the command line.
class Overrides {
 public:
  template <typename T, typename Apply>
  void Add(CLI::App* cmd, const std::string& flag, const std::string& help, Apply apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = cmd->add_option(flag, *value, help);
    overrides_.push_back([opt, value, apply](PipelineConfig& c) -> absl::Status {
      if (opt->count() == 0) return absl::OkStatus();
      return apply(c, *value);
    });
  }

  void Path(CLI::App* cmd, const std::string& flag, std::string PipelineConfig::* member,
            const std::string& help) {
    Add<std::string>(cmd, flag, help, [member](PipelineConfig& c, const std::string& v) {
      c.*member = v;
      return absl::OkStatus();
    });
  }

  template <typename T>
  void Field(CLI::App* cmd, const std::string& flag, T PipelineConfig::* member,
             const std::string& help) {
    Add<T>(cmd, flag, help, [member](PipelineConfig& c, const T& v) {
      c.*member = v;
      return absl::OkStatus();
    });
  }

  template <typename E, typename Parse>
  void Enum(CLI::App* cmd, const std::string& flag, E PipelineConfig::* member, Parse parse,
            const std::string& help) {
    Add<std::string>(cmd, flag, help,
                     [member, parse](PipelineConfig& c, const std::string& v) -> absl::Status {
                       auto parsed = parse(v);
                       if (!parsed.ok()) return ConfigError(std::string(parsed.status().message()));
                       c.*member = *parsed;
                       return absl::OkStatus();
                     });
  }

  absl::Status Apply(PipelineConfig& config) const {
    for (const Override& o : overrides_) {
      if (absl::Status s = o(config); !s.ok()) return s;
    }
    return Validate(config);
  }

 private:
  std::vector<Override> overrides_;
};

absl::StatusOr<llm::TemplateName> ParseLabellingMethod(std::string_view s) {
  auto name = llm::ParseTemplateName(s);
  if (name.ok() && !llm::IsLabelTemplate(*name)) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", ToAbsl(s), "' is not a labelling template"));
  }
  return name;
}

int Fail(const absl::Status& status) {
  spdlog::error("{}", std::string(status.message()));
  std::cerr << ErrorJson(status) << std::endl;
  return static_cast<int>(ExitCodeFor(status));
}

int Succeed(const absl::StatusOr<std::string>& out) {
  if (!out.ok()) return Fail(out.status());
  std::cout << *out << std::endl;
  return 0;
}

// Blocks SIGINT and SIGTERM in every thread and stops the server when one
// arrives.
absl::Status Serve(const PipelineConfig& config) {
  auto detector = MakeDetector(config);
  if (!detector.ok()) return detector.status();
  for (const ProviderHealth& p : (*detector)->CheckProviders()) {
    if (!p.status.ok()) {
      return AttachProvider(
          PrefixStatus(p.status, absl::StrCat("provider ", p.name, " failed its health check: ")),
          p.name);
    }
    spdlog::info("provider {} healthy", p.name);
  }
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                              : std::max(1u, std::thread::hardware_concurrency());
  DetectServer server(**detector, {workers, 1});
  auto port = server.Bind(config.host, config.port);
  if (!port.ok()) return port.status();
  spdlog::info("{} detector listening on {}:{}", std::string((*detector)->Name()), config.host,
               *port);
  std::thread waiter([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {} received, stopping", sig);
    server.Stop();
  });
  const absl::Status status = server.Run();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  return status;
}

int Main(int argc, char** argv) {
  auto logger = spdlog::stderr_color_mt("ragulator");
  spdlog::set_default_logger(logger);

  CLI::App app{"Out-of-context sentence detection for retrieval-augmented generation."};
  app.require_subcommand(1);
  std::string config_path;
  std::string log_level = "info";
  app.add_option("--config", config_path, "JSON config file; RAGULATOR_* variables override it");
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));

  Overrides overrides;

  CLI::App* show = app.add_subcommand("config", "Print the effective configuration");

  CLI::App* datagen = app.add_subcommand("datagen", "Simulate sentence-context pairs");
  std::string kind = "summary";
  datagen->add_option("--kind", kind, "Record kind to simulate from")
      ->check(CLI::IsMember({"summary", "sts"}));
  overrides.Path(datagen, "--input", &PipelineConfig::corpus_path, "Corpus JSONL");
  overrides.Path(datagen, "--out", &PipelineConfig::pairs_path, "Pairs JSONL");
  overrides.Field(datagen, "--seed", &PipelineConfig::rng_seed, "RNG seed");
  overrides.Field(datagen, "--ooc-fraction", &PipelineConfig::ooc_fraction, "OOC share");
  overrides.Field(datagen, "--test-sources", &PipelineConfig::test_sources,
                  "Sources kept in the test split");

  CLI::App* label = app.add_subcommand("label", "Mark relevant context sentences with an LLM");
  overrides.Path(label, "--pairs", &PipelineConfig::pairs_path, "Pairs JSONL");
  overrides.Path(label, "--out", &PipelineConfig::labels_path, "Labels JSONL");
  overrides.Enum(label, "--method", &PipelineConfig::labelling_method, ParseLabellingMethod,
                 "label_0shot, label_0shot_cot, label_5shot or label_5shot_cot");
  overrides.Path(label, "--completion-url", &PipelineConfig::completion_url,
                 "Completion server base URL or 'stub'");
  overrides.Field(label, "--max-in-flight", &PipelineConfig::max_in_flight,
                  "Concurrent completion requests");

  CLI::App* featurize = app.add_subcommand("featurize", "Compute feature vectors");
  std::string split = "all";
  featurize->add_option("--split", split, "Split to featurize")
      ->check(CLI::IsMember({"train", "test", "all"}));
  overrides.Path(featurize, "--pairs", &PipelineConfig::pairs_path, "Pairs JSONL");
  overrides.Path(featurize, "--out", &PipelineConfig::features_path, "Features JSONL");
  overrides.Path(featurize, "--embed-url", &PipelineConfig::embed_url, "Embedding provider");
  overrides.Path(featurize, "--rerank-url", &PipelineConfig::rerank_url, "Reranker provider");

  CLI::App* train = app.add_subcommand("train", "Grid-search and fit the meta-classifier");
  overrides.Path(train, "--features", &PipelineConfig::features_path, "Features JSONL");
  overrides.Path(train, "--model", &PipelineConfig::model_path, "Model JSON output");
  overrides.Enum(train, "--kind", &PipelineConfig::model_kind, ensemble::ParseModelKind,
                 "random_forest or gradient_boosted");
  overrides.Field(train, "--folds", &PipelineConfig::cv_folds, "Cross-validation folds");
  overrides.Field(train, "--seed", &PipelineConfig::rng_seed, "RNG seed");

  CLI::App* score = app.add_subcommand("score", "Score feature rows with a trained model");
  overrides.Path(score, "--features", &PipelineConfig::features_path, "Features JSONL");
  overrides.Path(score, "--model", &PipelineConfig::model_path, "Model JSON");
  overrides.Path(score, "--out", &PipelineConfig::scores_path, "Scores JSONL");

  CLI::App* evaluate = app.add_subcommand("evaluate", "AUROC, AUPRC and F1 of a scores file");
  std::string format = "json";
  std::string name = "meta_classifier";
  evaluate->add_option("--format", format, "json or markdown");
  evaluate->add_option("--name", name, "Detector name in the report");
  overrides.Path(evaluate, "--scores", &PipelineConfig::scores_path, "Scores JSONL");
  overrides.Path(evaluate, "--out", &PipelineConfig::report_path, "Report output");
  overrides.Field(evaluate, "--threshold", &PipelineConfig::threshold, "F1 threshold");

  CLI::App* windows = app.add_subcommand("windows", "Window-level fine-tuning data");
  windows->require_subcommand(1);
  CLI::App* export_cmd = windows->add_subcommand("export", "Export labelled windows as JSONL");
  overrides.Path(export_cmd, "--pairs", &PipelineConfig::pairs_path, "Pairs JSONL");
  overrides.Path(export_cmd, "--labels", &PipelineConfig::labels_path, "Labels JSONL");
  overrides.Path(export_cmd, "--out", &PipelineConfig::windows_path, "Windows JSONL");
  overrides.Field(export_cmd, "--limit", &PipelineConfig::window_limit, "Window token limit");

  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP detection service");
  overrides.Path(serve, "--model", &PipelineConfig::model_path, "Model JSON");
  overrides.Enum(serve, "--detector", &PipelineConfig::detector, ParseDetectorKind,
                 "meta_classifier or window_scorer");
  overrides.Path(serve, "--host", &PipelineConfig::host, "Listen address");
  overrides.Field(serve, "--port", &PipelineConfig::port, "Listen port");
  overrides.Field(serve, "--threshold", &PipelineConfig::threshold, "Decision threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return Fail(ConfigError(absl::StrCat("usage: ", e.what())));
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  auto config = LoadConfig(config_path, ProcessEnv());
  if (!config.ok()) return Fail(config.status());
  if (absl::Status s = overrides.Apply(*config); !s.ok()) return Fail(s);

  if (*show) {
    PipelineConfig shown = *config;
    if (!shown.completion_token.empty()) shown.completion_token = "<redacted>";
    return Succeed(ConfigToJson(shown));
  }
  if (*datagen) {
    return Succeed(RunDatagen(*config, kind == "sts" ? datagen::RecordKind::kStsPair
                                                     : datagen::RecordKind::kSummaryPair));
  }
  if (*label) return Succeed(RunLabel(*config));
  if (*featurize) {
    std::optional<datagen::Split> which;
    if (split != "all") which = *datagen::ParseSplit(split);
    return Succeed(RunFeaturize(*config, which));
  }
  if (*train) return Succeed(RunTrain(*config));
  if (*score) return Succeed(RunScore(*config));
  if (*evaluate) {
    auto report_format = eval::ParseReportFormat(format);
    if (!report_format.ok())
      return Fail(ConfigError(std::string(report_format.status().message())));
    return Succeed(RunEvaluate(*config, *report_format, name));
  }
  if (*export_cmd) return Succeed(RunWindowsExport(*config));
  if (*serve) {
    const absl::Status s = Serve(*config);
    return s.ok() ? 0 : Fail(s);
  }
  return Fail(absl::InternalError("no command selected"));
}

}  // namespace
}  // namespace ragulator::service

int main(int argc, char** argv) { return ragulator::service::Main(argc, argv); }
