#include "ragulator/service/commands.h"

#include <map>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/io.h"
#include "ragulator/common/random.h"
#include "ragulator/common/status.h"
#include "ragulator/common/strings.h"
#include "ragulator/datagen/manifest.h"
#include "ragulator/datagen/simulate.h"
#include "ragulator/ensemble/train.h"
#include "ragulator/eval/metrics.h"
#include "ragulator/features/featurize.h"
#include "ragulator/llm/openai_client.h"
#include "ragulator/llm/tasks.h"
#include "ragulator/window/windows.h"

namespace ragulator::service {
namespace {

using Json = nlohmann::ordered_json;

absl::Status Require(const std::string& value, std::string_view key) {
  if (!value.empty()) return absl::OkStatus();
  return ConfigError(absl::StrCat("config: ", ToAbsl(key), " is required"));
}

absl::Status RequireLabels(std::span<const features::FeatureRow> rows) {
  for (const features::FeatureRow& r : rows) {
    if (!r.label)
      return absl::InvalidArgumentError(absl::StrCat("pair ", r.pair_id, " has no label"));
  }
  return absl::OkStatus();
}

Json ParamsJson(const ensemble::Hyperparams& p) {
  return Json{{"max_depth", p.max_depth},
              {"n_estimators", p.n_estimators},
              {"num_leaves", p.num_leaves},
              {"subsample", p.subsample}};
}

}  // namespace

std::string ManifestPath(const std::string& pairs_path) { return pairs_path + ".manifest.json"; }

absl::StatusOr<std::string> RunDatagen(const PipelineConfig& config, datagen::RecordKind kind) {
  if (auto s = Require(config.corpus_path, "corpus_path"); !s.ok()) return s;
  if (auto s = Require(config.pairs_path, "pairs_path"); !s.ok()) return s;
  auto all = datagen::ReadCorpusJsonl(config.corpus_path);
  if (!all.ok()) return all.status();
  std::vector<datagen::CorpusRecord> records;
  for (datagen::CorpusRecord& r : *all) {
    if (r.kind == kind) records.push_back(std::move(r));
  }
  if (records.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(config.corpus_path, ": no ", ToAbsl(datagen::ToString(kind)), " records"));
  }
  absl::StatusOr<datagen::SimulationResult> result =
      kind == datagen::RecordKind::kSummaryPair
          ? datagen::SimulateFromSummaries(records, config.rng_seed, config.ooc_fraction)
          : datagen::SimulateFromSts(records, datagen::BuildFillerPool(records), config.rng_seed);
  if (!result.ok()) return result.status();
  std::vector<datagen::SentenceContextPair> pairs = std::move(result->pairs);
  if (kind == datagen::RecordKind::kStsPair) {
    pairs = datagen::RebalanceSplits(std::move(pairs), config.ooc_fraction,
                                     DeriveSeed(config.rng_seed, 1));
  }
  if (!config.test_sources.empty()) {
    pairs = datagen::FilterTestSources(std::move(pairs), config.test_sources);
  }
  datagen::DatasetManifest manifest = datagen::BuildManifest(pairs, config.rng_seed);
  manifest.stats = result->stats;
  manifest.stats->pairs_out = pairs.size();
  if (auto s = datagen::WritePairsJsonl(config.pairs_path, pairs); !s.ok()) return s;
  const std::string manifest_path = ManifestPath(config.pairs_path);
  if (auto s = WriteFile(manifest_path, datagen::ManifestToJson(manifest) + "\n"); !s.ok()) {
    return s;
  }
  return Json{{"command", "datagen"},
              {"records", records.size()},
              {"pairs", pairs.size()},
              {"rejected_records", result->stats.rejected.size()},
              {"ratio_consistent", manifest.ratio_consistent},
              {"pairs_path", config.pairs_path},
              {"manifest_path", manifest_path}}
      .dump();
}

absl::StatusOr<std::string> RunLabel(const PipelineConfig& config) {
  if (auto s = Require(config.pairs_path, "pairs_path"); !s.ok()) return s;
  if (auto s = Require(config.labels_path, "labels_path"); !s.ok()) return s;
  auto pairs = datagen::ReadPairsJsonl(config.pairs_path);
  if (!pairs.ok()) return pairs.status();
  llm::OpenAiClientOptions client_options;
  client_options.base_url = config.completion_url;
  client_options.api_token = config.completion_token;
  client_options.model = config.completion_model;
  const std::unique_ptr<llm::CompletionClient> client = llm::MakeCompletionClient(client_options);
  llm::LabelOptions options;
  options.method = config.labelling_method;
  auto outcomes =
      llm::LabelPairs(*client, *pairs, options, static_cast<unsigned>(config.max_in_flight));
  if (!outcomes.ok()) return outcomes.status();
  std::size_t unlabellable = 0;
  std::size_t completions = 0;
  for (const llm::LabelOutcome& o : *outcomes) {
    unlabellable += o.unlabellable() ? 1 : 0;
    completions += static_cast<std::size_t>(o.completions);
  }
  if (auto s = llm::WriteLabelOutcomesJsonl(config.labels_path, *outcomes); !s.ok()) return s;
  return Json{{"command", "label"},
              {"method", std::string(llm::ToString(config.labelling_method))},
              {"labelled", outcomes->size() - unlabellable},
              {"unlabellable", unlabellable},
              {"completions", completions},
              {"labels_path", config.labels_path}}
      .dump();
}

absl::StatusOr<std::string> RunFeaturize(const PipelineConfig& config,
                                         std::optional<datagen::Split> split) {
  if (auto s = Require(config.pairs_path, "pairs_path"); !s.ok()) return s;
  if (auto s = Require(config.features_path, "features_path"); !s.ok()) return s;
  auto pairs = datagen::ReadPairsJsonl(config.pairs_path);
  if (!pairs.ok()) return pairs.status();
  if (split) {
    std::erase_if(*pairs, [&](const datagen::SentenceContextPair& p) { return p.split != *split; });
  }
  const auto embed = features::MakeEmbeddingProvider(config.embed_url);
  const auto rerank = features::MakeRerankerProvider(config.rerank_url);
  auto rows =
      features::FeaturizeAll(*pairs, *embed, *rerank, static_cast<unsigned>(config.threads));
  if (!rows.ok()) return rows.status();
  if (auto s = features::WriteFeaturesJsonl(config.features_path, *rows); !s.ok()) return s;
  return Json{{"command", "featurize"},
              {"split", split ? Json(std::string(datagen::ToString(*split))) : Json("all")},
              {"rows", rows->size()},
              {"features_path", config.features_path}}
      .dump();
}

absl::StatusOr<std::string> RunTrain(const PipelineConfig& config,
                                     std::optional<ensemble::HyperparamGrid> grid) {
  if (auto s = Require(config.features_path, "features_path"); !s.ok()) return s;
  if (auto s = Require(config.model_path, "model_path"); !s.ok()) return s;
  auto rows = features::ReadFeaturesJsonl(config.features_path);
  if (!rows.ok()) return rows.status();
  if (auto s = RequireLabels(*rows); !s.ok()) return s;
  const std::vector<ensemble::TrainingRow> training = ensemble::ToTrainingRows(*rows);
  if (!grid) {
    grid = config.model_kind == ensemble::ModelKind::kRandomForest
               ? ensemble::DefaultRandomForestGrid()
               : ensemble::DefaultGradientBoostedGrid();
  }
  auto result = ensemble::GridSearch(training, *grid, config.model_kind, config.cv_folds,
                                     config.rng_seed, static_cast<unsigned>(config.threads));
  if (!result.ok()) return result.status();
  if (auto s = ensemble::SaveModel(config.model_path, result->model); !s.ok()) return s;
  Json cv = Json::array();
  double best = 0.0;
  for (const ensemble::CellScore& c : result->cv_scores) {
    Json cell = ParamsJson(c.params);
    cell["mean_auroc"] = c.mean_auroc;
    cell["fold_auroc"] = c.fold_auroc;
    if (c.params == result->best_params) best = c.mean_auroc;
    cv.push_back(std::move(cell));
  }
  return Json{{"command", "train"},
              {"kind", std::string(ensemble::ToString(config.model_kind))},
              {"rows", training.size()},
              {"folds", config.cv_folds},
              {"best_params", ParamsJson(result->best_params)},
              {"best_mean_auroc", best},
              {"model_path", config.model_path},
              {"cv", std::move(cv)}}
      .dump();
}

absl::StatusOr<std::string> RunScore(const PipelineConfig& config) {
  if (auto s = Require(config.features_path, "features_path"); !s.ok()) return s;
  if (auto s = Require(config.model_path, "model_path"); !s.ok()) return s;
  if (auto s = Require(config.scores_path, "scores_path"); !s.ok()) return s;
  auto rows = features::ReadFeaturesJsonl(config.features_path);
  if (!rows.ok()) return rows.status();
  if (auto s = RequireLabels(*rows); !s.ok()) return s;
  auto model = ensemble::LoadModel(config.model_path);
  if (!model.ok()) return model.status();
  if (model->feature_names.size() != features::kNumFeatures) {
    return absl::InvalidArgumentError(absl::StrCat(config.model_path, ": model expects ",
                                                   model->feature_names.size(), " features"));
  }
  for (const features::FeatureRow& r : *rows) {
    if (!r.features.AllFinite()) {
      return absl::InvalidArgumentError(absl::StrCat("pair ", r.pair_id, ": non-finite feature"));
    }
  }
  const eval::TimedRun run = eval::RunTimed(rows->size(), [&](std::size_t i) {
    const auto x = (*rows)[i].features.ToArray();
    return model->PredictUnchecked(x);
  });
  std::vector<eval::ScoredExample> scored;
  scored.reserve(rows->size());
  for (std::size_t i = 0; i < rows->size(); ++i) {
    scored.push_back({(*rows)[i].pair_id, run.scores[i], static_cast<int>(*(*rows)[i].label), {}});
  }
  if (auto s = eval::WriteScoresJsonl(config.scores_path, scored); !s.ok()) return s;
  Json summary{{"command", "score"}, {"rows", scored.size()}, {"scores_path", config.scores_path}};
  if (auto eps = eval::Throughput(scored.size(), run.wall_seconds); eps.ok()) {
    summary["examples_per_second"] = *eps;
  }
  return summary.dump();
}

absl::StatusOr<std::string> RunEvaluate(const PipelineConfig& config, eval::ReportFormat format,
                                        const std::string& detector_name) {
  if (auto s = Require(config.scores_path, "scores_path"); !s.ok()) return s;
  auto scored = eval::ReadScoresJsonl(config.scores_path);
  if (!scored.ok()) return scored.status();
  std::optional<double> wall = 0.0;
  for (const eval::ScoredExample& e : *scored) {
    if (!e.latency_seconds) {
      wall.reset();
      break;
    }
    *wall += *e.latency_seconds;
  }
  if (wall && *wall <= 0.0) wall.reset();
  auto report = eval::Evaluate(detector_name, *scored, config.threshold, wall);
  if (!report.ok()) return report.status();
  const std::vector<eval::EvalReport> reports = {*report};
  std::string rendered = eval::RenderReports(reports, format);
  if (!config.report_path.empty()) {
    if (auto s = WriteFile(config.report_path, rendered); !s.ok()) return s;
  }
  return rendered;
}

absl::StatusOr<std::string> RunWindowsExport(const PipelineConfig& config) {
  if (auto s = Require(config.pairs_path, "pairs_path"); !s.ok()) return s;
  if (auto s = Require(config.windows_path, "windows_path"); !s.ok()) return s;
  auto pairs = datagen::ReadPairsJsonl(config.pairs_path);
  if (!pairs.ok()) return pairs.status();
  std::map<std::string, window::RelevanceAnnotation> annotations;
  if (!config.labels_path.empty()) {
    auto outcomes = llm::ReadLabelOutcomesJsonl(config.labels_path);
    if (!outcomes.ok()) return outcomes.status();
    for (llm::LabelOutcome& o : *outcomes) {
      if (o.annotation) annotations.emplace(o.pair_id, *std::move(o.annotation));
    }
  }
  const window::WhitespaceTokenizer tokenizer;
  std::vector<window::WindowExample> examples;
  std::size_t exported = 0;
  std::size_t too_long = 0;
  std::size_t unannotated = 0;
  for (const datagen::SentenceContextPair& pair : *pairs) {
    auto ws = window::BuildWindows(pair, tokenizer, config.window_limit);
    if (!ws.ok()) {
      if (!absl::IsInvalidArgument(ws.status())) return ws.status();
      ++too_long;
      continue;
    }
    std::optional<window::RelevanceAnnotation> annotation;
    if (const auto it = annotations.find(pair.pair_id); it != annotations.end()) {
      annotation = it->second;
    }
    auto labelled = window::PropagateLabels(*std::move(ws), annotation, pair.label);
    if (absl::IsFailedPrecondition(labelled.status())) {
      ++unannotated;
      continue;
    }
    if (!labelled.ok()) {
      return PrefixStatus(labelled.status(), absl::StrCat("pair ", pair.pair_id, ": "));
    }
    ++exported;
    for (window::WindowExample& e : window::ToExamples(*labelled, pair.sentence, pair.context)) {
      examples.push_back(std::move(e));
    }
  }
  if (auto s = window::WriteWindowExamplesJsonl(config.windows_path, examples); !s.ok()) return s;
  return Json{{"command", "windows"},
              {"pairs", exported},
              {"windows", examples.size()},
              {"skipped_sentence_too_long", too_long},
              {"skipped_unannotated", unannotated},
              {"windows_path", config.windows_path}}
      .dump();
}

ExitCode ExitCodeFor(const absl::Status& status) {
  if (status.ok()) return ExitCode::kOk;
  if (IsConfigError(status)) return ExitCode::kConfig;
  if (FailingProvider(status) || llm::IsTransient(status)) return ExitCode::kProvider;
  switch (status.code()) {
    case absl::StatusCode::kNotFound:
      return ExitCode::kMissingInput;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kFailedPrecondition:
      return ExitCode::kInvalidInput;
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
      return ExitCode::kOutput;
    default:
      return ExitCode::kInternal;
  }
}

std::string ErrorJson(const absl::Status& status) {
  Json error{{"code", absl::StatusCodeToString(status.code())},
             {"exit_code", static_cast<int>(ExitCodeFor(status))},
             {"message", std::string(status.message())}};
  if (auto provider = FailingProvider(status)) error["provider"] = *provider;
  return Json{{"error", std::move(error)}}.dump();
}

}  // namespace ragulator::service
