#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "ragulator/common/io.h"
#include "ragulator/common/status.h"
#include "ragulator/datagen/records.h"
#include "ragulator/ensemble/model.h"
#include "ragulator/eval/report.h"
#include "ragulator/features/featurize.h"
#include "ragulator/llm/tasks.h"
#include "ragulator/service/api.h"
#include "ragulator/service/commands.h"
#include "ragulator/service/config.h"
#include "ragulator/service/detector.h"
#include "ragulator/service/server.h"
#include "ragulator/text/sentences.h"
#include "ragulator/window/windows.h"
#include "testing/fixture.h"
#include "testing/generators.h"
#include "testing/oracles.h"

namespace ragulator::service {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;
using testing_util::MakeSentence;
using testing_util::MakeVocabulary;

EnvLookup MapEnv(std::map<std::string, std::string> vars) {
  return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
    const auto it = vars.find(name);
    if (it == vars.end()) return std::nullopt;
    return it->second;
  };
}

std::string Slurp(const std::string& path) {
  auto text = ReadFile(path);
  return text.ok() ? *text : std::string();
}

// Fresh per-process scratch directory.
fs::path ScratchDir(std::string_view name) {
  const fs::path dir = fs::path(::testing::TempDir()) /
                       ("ragulator_service_" + std::to_string(::getpid())) / std::string(name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::set<std::string> FilesIn(const fs::path& dir) {
  std::set<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) out.insert(e.path().filename().string());
  return out;
}

// --- config ---------------------------------------------------------------

TEST(Config, DefaultsRoundTrip) {
  const PipelineConfig defaults;
  EXPECT_EQ(*ParseConfigJson(ConfigToJson(defaults)), defaults);
  EXPECT_EQ(*ParseConfigJson("{}"), defaults);
  EXPECT_EQ(defaults.window_limit, 512);
  EXPECT_EQ(defaults.threshold, 0.5);
  EXPECT_EQ(defaults.ooc_fraction, 0.5);
}

TEST(Config, RandomConfigsRoundTrip) {
  std::mt19937_64 rng(61);
  const auto word = [&rng] { return testing_util::RandomText(rng, 3); };
  for (int iter = 0; iter < 300; ++iter) {
    PipelineConfig c;
    c.corpus_path = word();
    c.pairs_path = word();
    c.model_path = word();
    c.rng_seed = rng();
    c.ooc_fraction = static_cast<double>(rng() % 1001) / 1000.0;
    c.test_sources = {word(), word()};
    c.window_limit = 3 + static_cast<int>(rng() % 2000);
    c.threshold = (1.0 + static_cast<double>(rng() % 998)) / 1000.0;
    c.embed_url = word();
    c.completion_token = word();
    c.detector = rng() % 2 ? DetectorKind::kWindowScorer : DetectorKind::kMetaClassifier;
    c.model_kind =
        rng() % 2 ? ensemble::ModelKind::kGradientBoosted : ensemble::ModelKind::kRandomForest;
    c.labelling_method = llm::kLabelTemplates[rng() % 4];
    c.cv_folds = 2 + static_cast<int>(rng() % 19);
    c.max_in_flight = 1 + static_cast<int>(rng() % 256);
    c.threads = static_cast<int>(rng() % 64);
    c.port = static_cast<int>(rng() % 65536);
    const auto parsed = ParseConfigJson(ConfigToJson(c));
    ASSERT_TRUE(parsed.ok()) << parsed.status();
    ASSERT_EQ(*parsed, c);
  }
}

TEST(Config, RejectsUnknownKeysBadTypesAndRanges) {
  for (const char* json : {
           R"({"threshhold": 0.5})",
           R"({"threshold": "high"})",
           R"({"threshold": 0.0})",
           R"({"threshold": 1.0})",
           R"({"window_limit": 2})",
           R"({"window_limit": 1.5})",
           R"({"ooc_fraction": 1.5})",
           R"({"rng_seed": -1})",
           R"({"cv_folds": 1})",
           R"({"max_in_flight": 0})",
           R"({"port": 70000})",
           R"({"detector": "oracle"})",
           R"({"labelling_method": "judge_direct"})",
           R"({"test_sources": "pubmed"})",
           R"([1, 2])",
           "not json",
       }) {
    const auto parsed = ParseConfigJson(json);
    ASSERT_FALSE(parsed.ok()) << json;
    EXPECT_TRUE(IsConfigError(parsed.status())) << json;
  }
  EXPECT_THAT(ParseConfigJson(R"({"threshhold": 0.5})").status().message(),
              HasSubstr("unknown key 'threshhold'"));
}

TEST(Config, EnvironmentOverrides) {
  const auto c =
      ApplyEnvOverrides(PipelineConfig{}, MapEnv({{"RAGULATOR_COMPLETION_URL", "http://llm:8000"},
                                                  {"RAGULATOR_COMPLETION_TOKEN", "tok"},
                                                  {"RAGULATOR_THRESHOLD", "0.3"},
                                                  {"RAGULATOR_RNG_SEED", "18446744073709551615"},
                                                  {"RAGULATOR_TEST_SOURCES", "pubmed, mrpc,,snli"},
                                                  {"RAGULATOR_DETECTOR", "window_scorer"},
                                                  {"RAGULATOR_UNRELATED", "ignored"}}));
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->completion_url, "http://llm:8000");
  EXPECT_EQ(c->completion_token, "tok");
  EXPECT_EQ(c->threshold, 0.3);
  EXPECT_EQ(c->rng_seed, UINT64_MAX);
  EXPECT_EQ(c->test_sources, (std::vector<std::string>{"pubmed", "mrpc", "snli"}));
  EXPECT_EQ(c->detector, DetectorKind::kWindowScorer);

  for (const auto& [name, value] :
       std::map<std::string, std::string>{{"RAGULATOR_PORT", "abc"},
                                          {"RAGULATOR_THRESHOLD", "2"},
                                          {"RAGULATOR_CV_FOLDS", "2.5"}}) {
    const auto bad = ApplyEnvOverrides(PipelineConfig{}, MapEnv({{name, value}}));
    ASSERT_FALSE(bad.ok()) << name;
    EXPECT_TRUE(IsConfigError(bad.status()));
    EXPECT_THAT(bad.status().message(), HasSubstr(name));
  }
}

TEST(Config, LoadLayersFileThenEnvironment) {
  const fs::path dir = ScratchDir("config");
  const std::string path = (dir / "config.json").string();
  ASSERT_TRUE(WriteFile(path, R"({"threshold": 0.7, "port": 9000, "pairs_path": "p.jsonl"})").ok());
  const auto c = LoadConfig(path, MapEnv({{"RAGULATOR_PORT", "9001"}}));
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->threshold, 0.7);
  EXPECT_EQ(c->port, 9001);
  EXPECT_EQ(c->pairs_path, "p.jsonl");
  EXPECT_EQ(*LoadConfig("", MapEnv({})), PipelineConfig{});
  const auto missing = LoadConfig((dir / "absent.json").string(), MapEnv({}));
  EXPECT_TRUE(IsConfigError(missing.status()));
  EXPECT_EQ(ExitCodeFor(missing.status()), ExitCode::kConfig);
}

// --- detectors ------------------------------------------------------------

std::vector<std::string> Document(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                                  std::size_t sentences) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sentences; ++i) out.push_back(MakeSentence(rng, vocab, 12));
  return out;
}

std::string Join(const std::vector<std::string>& sentences) {
  std::string out;
  for (const std::string& s : sentences) out += (out.empty() ? "" : " ") + s;
  return out;
}

TEST(WindowScorerDetector, MinOverWindowsOfAllDocuments) {
  std::mt19937_64 rng(62);
  const auto doc_vocab = MakeVocabulary("alp", 50);
  const auto other_vocab = MakeVocabulary("zed", 50);
  const std::vector<std::string> long_doc = Document(rng, doc_vocab, 100);  // ~1300 tokens
  const std::vector<std::string> documents = {Join(Document(rng, other_vocab, 5)), "   ",
                                              Join(long_doc)};
  const WindowScorerDetector detector(std::make_unique<OverlapWindowClassifier>(), {});

  const auto copied = detector.Detect(long_doc[90], documents);
  ASSERT_TRUE(copied.ok()) << copied.status();
  EXPECT_EQ(copied->label, 0);
  EXPECT_NEAR(copied->probability, 0.01, 1e-12);
  EXPECT_EQ(copied->n_windows, 1u + 3u);
  EXPECT_FALSE(copied->features.has_value());

  const auto unrelated =
      detector.Detect(MakeSentence(rng, MakeVocabulary("qux", 30), 10), documents);
  EXPECT_EQ(unrelated->label, 1);
  EXPECT_NEAR(unrelated->probability, 0.99, 1e-12);

  const std::vector<std::string> blank = {"", " \n"};
  EXPECT_EQ(detector.Detect("A sentence here.", blank).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_EQ(detector.Detect("  ", documents).status().code(), absl::StatusCode::kInvalidArgument);
  std::string huge;
  for (int i = 0; i < 600; ++i) huge += "word ";
  EXPECT_EQ(detector.Detect(huge, documents).status().code(), absl::StatusCode::kInvalidArgument);
}

class FailingEmbedder : public features::EmbeddingProvider {
 public:
  absl::StatusOr<std::vector<std::vector<float>>> Embed(
      const std::vector<std::string>&) const override {
    return absl::UnavailableError("connection refused");
  }
  std::string_view Name() const override { return "broken-embed"; }
};

// A model trained on a few rows: low precision means OOC.
ensemble::TreeEnsembleModel PrecisionModel() {
  std::vector<ensemble::TrainingRow> rows;
  for (int i = 0; i < 40; ++i) {
    const double p = i / 39.0;
    rows.push_back({{p, 1.0, 1.0, p, p}, p < 0.5 ? 1 : 0});
  }
  return *ensemble::TrainRandomForest(rows, {3, 20, 31, 1.0}, 1);
}

TEST(MetaClassifierDetector, ReportsFeaturesOfMinimumWindow) {
  std::mt19937_64 rng(63);
  const auto doc = Document(rng, MakeVocabulary("bet", 40), 80);
  const std::vector<std::string> documents = {Join(doc)};
  const MetaClassifierDetector detector(
      PrecisionModel(), std::make_unique<features::HashedEmbeddingProvider>(),
      std::make_unique<features::OverlapRerankerProvider>(), {0.5, 512});
  const auto d = detector.Detect(doc[70], documents);
  ASSERT_TRUE(d.ok()) << d.status();
  EXPECT_EQ(d->n_windows, 2u);
  EXPECT_EQ(d->label, 0);
  ASSERT_TRUE(d->features.has_value());
  EXPECT_EQ(d->features->precision, 1.0);
  EXPECT_NEAR(d->features->max_embed_sim, 1.0, 1e-6);
  const auto unrelated =
      detector.Detect("Completely different words appear here today.", documents);
  EXPECT_EQ(unrelated->label, 1);
  EXPECT_EQ(unrelated->features->precision, 0.0);
}

TEST(HandleDetect, ArityErrorsAndProviderFailures) {
  const WindowScorerDetector detector(std::make_unique<OverlapWindowClassifier>(), {});
  const std::string doc = "The tower is tall. It was finished in 1889. Paris hosts it.";
  const DetectRequest request{{"The tower is tall.", "Bananas are yellow fruit."}, {doc}};
  const HttpReply ok = HandleDetect(detector, DetectRequestToJson(request));
  ASSERT_EQ(ok.status, 200) << ok.body;
  const auto results = *ParseDetectResponse(ok.body);
  ASSERT_EQ(results.size(), 2u);
  EXPECT_EQ(results[0].label, 0);
  EXPECT_EQ(results[1].label, 1);
  for (const SentenceDetection& r : results) {
    EXPECT_GE(r.probability, 0.0);
    EXPECT_LE(r.probability, 1.0);
  }
  EXPECT_EQ(HandleDetect(detector, DetectRequestToJson(request)).body, ok.body);
  EXPECT_EQ(HandleDetect(detector, R"({"sentences": [], "documents": ["x."]})").body,
            R"({"results":[]})");

  for (const char* bad :
       {R"({"sentences": ["a b c d e."], "documents": []})", R"({"sentences": ["a."]})",
        R"({"sentences": "a.", "documents": ["b."]})", R"({"sentences": ["a."], "documents": [1]})",
        R"({"sentences": ["a."], "documents": ["b."], "extra": 1})", "{",
        R"({"sentences": ["a."], "documents": ["  "]})"}) {
    const HttpReply r = HandleDetect(detector, bad);
    EXPECT_EQ(r.status, 400) << bad;
    EXPECT_TRUE(nlohmann::json::parse(r.body).contains("error")) << bad;
  }

  const MetaClassifierDetector broken(PrecisionModel(), std::make_unique<FailingEmbedder>(),
                                      std::make_unique<features::OverlapRerankerProvider>(), {});
  const HttpReply outage = HandleDetect(broken, DetectRequestToJson(request));
  EXPECT_EQ(outage.status, 502);
  const auto body = nlohmann::json::parse(outage.body);
  EXPECT_EQ(body["provider"], "broken-embed");
  EXPECT_THAT(body["error"].get<std::string>(), HasSubstr("sentence 0: window 0:"));

  const WindowScorerDetector remote(
      std::make_unique<HttpWindowClassifier>("http://127.0.0.1:1", std::chrono::seconds(2)), {});
  const HttpReply down = HandleDetect(remote, DetectRequestToJson(request));
  EXPECT_EQ(down.status, 502);
  EXPECT_EQ(nlohmann::json::parse(down.body)["provider"], "window_scorer");
}

TEST(HandleHealth, ListsProviders) {
  const MetaClassifierDetector good(PrecisionModel(),
                                    std::make_unique<features::HashedEmbeddingProvider>(),
                                    std::make_unique<features::OverlapRerankerProvider>(), {});
  const HttpReply ok = HandleHealth(good);
  EXPECT_EQ(ok.status, 200);
  const auto j = nlohmann::json::parse(ok.body);
  EXPECT_EQ(j["status"], "ok");
  EXPECT_EQ(j["detector"], "meta_classifier");
  EXPECT_EQ(j["providers"].size(), 2u);

  const MetaClassifierDetector bad(PrecisionModel(), std::make_unique<FailingEmbedder>(),
                                   std::make_unique<features::OverlapRerankerProvider>(), {});
  const HttpReply degraded = HandleHealth(bad);
  EXPECT_EQ(degraded.status, 503);
  const auto d = nlohmann::json::parse(degraded.body);
  EXPECT_EQ(d["status"], "degraded");
  EXPECT_EQ(d["providers"][0]["name"], "broken-embed");
  EXPECT_EQ(d["providers"][0]["ok"], false);
  EXPECT_EQ(d["providers"][1]["ok"], true);
}

TEST(HttpWindowClassifier, SpeaksWireProtocol) {
  httplib::Server server;
  nlohmann::json seen;
  server.Post("/classify", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    nlohmann::json probs = nlohmann::json::array();
    for (std::size_t i = 0; i < seen["contexts"].size(); ++i) probs.push_back(0.25 * (i + 1));
    res.set_content(nlohmann::json{{"probabilities", probs}}.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const HttpWindowClassifier client("http://127.0.0.1:" + std::to_string(port),
                                    std::chrono::seconds(5));
  const auto probs = client.Classify("s", {"a", "b"});
  ASSERT_TRUE(probs.ok()) << probs.status();
  EXPECT_EQ(*probs, (std::vector<double>{0.25, 0.5}));
  EXPECT_EQ(seen["sentence"], "s");
  EXPECT_EQ(seen["contexts"], (nlohmann::json{"a", "b"}));
  // Four windows get 1.0 as the fourth score, which is still in range; the
  // minimum is the first window.
  const WindowScorerDetector detector(
      std::make_unique<HttpWindowClassifier>("http://127.0.0.1:" + std::to_string(port),
                                             std::chrono::seconds(5)),
      {});
  const std::vector<std::string> docs = {"One two three four five.", "Six seven eight.",
                                         "Nine ten.", "Eleven twelve."};
  const auto d = detector.Detect("One two.", docs);
  ASSERT_TRUE(d.ok()) << d.status();
  EXPECT_EQ(d->probability, 0.25);
  EXPECT_EQ(d->n_windows, 4u);
  // A fifth window would be scored 1.25: rejected as a provider fault.
  const std::vector<std::string> five = {"a.", "b.", "c.", "d.", "e."};
  const auto bad = detector.Detect("One two.", five);
  EXPECT_EQ(FailingProvider(bad.status()), "window_scorer");
  server.stop();
  t.join();
}

TEST(DetectServer, ServesConcurrentRequestsDeterministically) {
  const WindowScorerDetector detector(std::make_unique<OverlapWindowClassifier>(), {});
  DetectServer server(detector, {4, 1});
  const auto port = server.Bind("127.0.0.1", 0);
  ASSERT_TRUE(port.ok()) << port.status();
  std::thread t([&] { ASSERT_TRUE(server.Run().ok()); });
  server.WaitUntilReady();

  const std::string body = DetectRequestToJson(
      {{"The tower is tall.", "Bananas are yellow.", "It was finished in 1889."},
       {"The tower is tall. It was finished in 1889.", "Paris hosts it."}});
  std::vector<std::string> replies(8);
  std::vector<std::thread> clients;
  for (std::size_t i = 0; i < replies.size(); ++i) {
    clients.emplace_back([&, i] {
      httplib::Client c("127.0.0.1", *port);
      const auto res = c.Post("/detect", body, "application/json");
      if (res && res->status == 200) replies[i] = res->body;
    });
  }
  for (auto& c : clients) c.join();
  const auto parsed = ParseDetectResponse(replies[0]);
  ASSERT_TRUE(parsed.ok()) << replies[0];
  EXPECT_EQ(parsed->size(), 3u);
  for (const std::string& r : replies) EXPECT_EQ(r, replies[0]);

  httplib::Client c("127.0.0.1", *port);
  const auto health = c.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  const auto bad =
      c.Post("/detect", R"({"sentences": ["x."], "documents": []})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  server.Stop();
  t.join();
}

TEST(DetectResponse, JsonRoundTrip) {
  std::vector<SentenceDetection> results = {
      {0.25, 0, 3, features::FeatureVector{1, 2, 3, 0.5, 0.1}}, {0.75, 1, 1, std::nullopt}};
  EXPECT_EQ(*ParseDetectResponse(DetectResponseToJson(results)), results);
  EXPECT_FALSE(ParseDetectResponse(R"({"results": [{"probability": 1}]})").ok());
}

// --- commands ---------------------------------------------------------------

ensemble::HyperparamGrid SmallGrid() { return {{2, 3}, {20}, {}, {}}; }

class PipelineTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = ScratchDir(::testing::UnitTest::GetInstance()->current_test_info()->name());
    config_.corpus_path = Path("corpus.jsonl");
    ASSERT_TRUE(WriteFile(config_.corpus_path,
                          testing_util::CorpusToJsonl(testing_util::MakeSeparableCorpus()))
                    .ok());
    config_.pairs_path = Path("pairs.jsonl");
    config_.rng_seed = 11;
  }

  std::string Path(std::string_view name) const { return (dir_ / std::string(name)).string(); }

  // datagen, featurize per split, train, score on the test split.
  void RunThroughScore() {
    ASSERT_TRUE(RunDatagen(config_, datagen::RecordKind::kSummaryPair).ok());
    config_.features_path = Path("train.features.jsonl");
    ASSERT_TRUE(RunFeaturize(config_, datagen::Split::kTrain).ok());
    config_.model_path = Path("model.json");
    const auto trained = RunTrain(config_, SmallGrid());
    ASSERT_TRUE(trained.ok()) << trained.status();
    config_.features_path = Path("test.features.jsonl");
    ASSERT_TRUE(RunFeaturize(config_, datagen::Split::kTest).ok());
    config_.scores_path = Path("scores.jsonl");
    const auto scored = RunScore(config_);
    ASSERT_TRUE(scored.ok()) << scored.status();
  }

  fs::path dir_;
  PipelineConfig config_;
};

TEST(Fixture, CheckedInCorpusMatchesGenerator) {
  auto on_disk = ReadFile(RAGULATOR_TEST_DATA_DIR "/synthetic_corpus.jsonl");
  ASSERT_TRUE(on_disk.ok()) << on_disk.status();
  EXPECT_EQ(*on_disk, testing_util::CorpusToJsonl(testing_util::MakeSeparableCorpus()));
}

TEST_F(PipelineTest, DatagenIsDeterministicAndWritesManifest) {
  const auto summary = RunDatagen(config_, datagen::RecordKind::kSummaryPair);
  ASSERT_TRUE(summary.ok()) << summary.status();
  const auto j = nlohmann::json::parse(*summary);
  EXPECT_EQ(j["records"], 60);
  EXPECT_EQ(j["pairs"], 180);
  EXPECT_EQ(FilesIn(dir_),
            (std::set<std::string>{"corpus.jsonl", "pairs.jsonl", "pairs.jsonl.manifest.json"}));
  const std::string first = Slurp(config_.pairs_path);
  const std::string manifest = Slurp(ManifestPath(config_.pairs_path));
  ASSERT_TRUE(RunDatagen(config_, datagen::RecordKind::kSummaryPair).ok());
  EXPECT_EQ(Slurp(config_.pairs_path), first);
  EXPECT_EQ(Slurp(ManifestPath(config_.pairs_path)), manifest);
  config_.rng_seed = 12;
  ASSERT_TRUE(RunDatagen(config_, datagen::RecordKind::kSummaryPair).ok());
  EXPECT_NE(Slurp(config_.pairs_path), first);

  EXPECT_EQ(RunDatagen(config_, datagen::RecordKind::kStsPair).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST_F(PipelineTest, TrainScoreEvaluateOnSeparableFixture) {
  RunThroughScore();
  const std::string model = Slurp(config_.model_path);
  // Retraining on the same features reproduces the model byte for byte.
  config_.features_path = Path("train.features.jsonl");
  config_.model_path = Path("model2.json");
  ASSERT_TRUE(RunTrain(config_, SmallGrid()).ok());
  EXPECT_EQ(Slurp(config_.model_path), model);

  config_.report_path = Path("report.json");
  const auto rendered = RunEvaluate(config_, eval::ReportFormat::kJson, "rf");
  ASSERT_TRUE(rendered.ok()) << rendered.status();
  const auto reports = *eval::ParseReportsJson(*rendered);
  ASSERT_EQ(reports.size(), 1u);
  EXPECT_EQ(Slurp(config_.report_path), *rendered);

  const auto scored = *eval::ReadScoresJsonl(config_.scores_path);
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& s : scored) {
    scores.push_back(s.score);
    labels.push_back(s.label);
  }
  EXPECT_NEAR(reports[0].auroc, testing_util::OracleAuroc(scores, labels), 1e-9);
  EXPECT_GE(reports[0].auroc, 95.0);
  EXPECT_EQ(reports[0].detector, "rf");
  EXPECT_FALSE(reports[0].examples_per_second.has_value());
}

TEST_F(PipelineTest, VerbatimSentenceIsInContextForTrainedModel) {
  RunThroughScore();
  config_.detector = DetectorKind::kMetaClassifier;
  const auto detector = MakeDetector(config_);
  ASSERT_TRUE(detector.ok()) << detector.status();
  const auto pairs = *datagen::ReadPairsJsonl(config_.pairs_path);
  const auto pair = std::find_if(pairs.begin(), pairs.end(), [](const auto& p) {
    return p.label == datagen::Label::kInContext && p.split == datagen::Split::kTest;
  });
  ASSERT_NE(pair, pairs.end());
  ASSERT_NE(pair->context.find(pair->sentence), std::string::npos);
  const std::vector<std::string> docs = {pair->context};
  const auto d = (*detector)->Detect(pair->sentence, docs);
  ASSERT_TRUE(d.ok()) << d.status();
  EXPECT_LT(d->probability, config_.threshold);
  EXPECT_EQ(d->label, 0);
  EXPECT_EQ(d->features->precision, 1.0);
}

TEST_F(PipelineTest, LabelThenExportWindows) {
  ASSERT_TRUE(RunDatagen(config_, datagen::RecordKind::kSummaryPair).ok());
  config_.labels_path = Path("labels.jsonl");
  const auto labelled = RunLabel(config_);
  ASSERT_TRUE(labelled.ok()) << labelled.status();
  EXPECT_EQ(nlohmann::json::parse(*labelled)["unlabellable"], 0);
  const auto outcomes = *llm::ReadLabelOutcomesJsonl(config_.labels_path);
  const auto pairs = *datagen::ReadPairsJsonl(config_.pairs_path);
  std::map<std::string, const datagen::SentenceContextPair*> by_id;
  for (const auto& p : pairs) by_id[p.pair_id] = &p;
  for (const llm::LabelOutcome& o : outcomes) {
    const datagen::SentenceContextPair& p = *by_id.at(o.pair_id);
    ASSERT_EQ(p.label, datagen::Label::kInContext);
    // The stub picks the context sentence identical to the candidate.
    const auto sentences = text::SplitSentenceTexts(p.context);
    ASSERT_EQ(o.annotation->relevant_sentence_indices.size(), 1u);
    EXPECT_EQ(sentences[o.annotation->relevant_sentence_indices[0]], p.sentence);
  }

  config_.windows_path = Path("windows.jsonl");
  config_.window_limit = 64;
  const auto exported = RunWindowsExport(config_);
  ASSERT_TRUE(exported.ok()) << exported.status();
  EXPECT_EQ(nlohmann::json::parse(*exported)["pairs"], pairs.size());
  std::map<std::string, std::vector<int>> labels;
  const auto examples = *window::ReadWindowExamplesJsonl(config_.windows_path);
  for (const window::WindowExample& e : examples) {
    labels[e.pair_id].push_back(*e.label);
  }
  ASSERT_EQ(labels.size(), pairs.size());
  for (const auto& [id, ls] : labels) {
    EXPECT_GT(ls.size(), 1u);
    if (by_id.at(id)->label == datagen::Label::kOutOfContext) {
      EXPECT_EQ(std::count(ls.begin(), ls.end(), 0), 0) << id;
    } else {
      EXPECT_EQ(std::count(ls.begin(), ls.end(), 0), 1) << id;
    }
  }

  // Without labels, multi-window in-context pairs are skipped.
  config_.labels_path.clear();
  const auto unlabelled = nlohmann::json::parse(*RunWindowsExport(config_));
  EXPECT_GT(unlabelled["skipped_unannotated"].get<int>(), 0);
}

TEST_F(PipelineTest, CommandsWriteOnlyConfiguredPaths) {
  RunThroughScore();
  config_.labels_path = Path("labels.jsonl");
  ASSERT_TRUE(RunLabel(config_).ok());
  config_.windows_path = Path("windows.jsonl");
  ASSERT_TRUE(RunWindowsExport(config_).ok());
  ASSERT_TRUE(RunEvaluate(config_, eval::ReportFormat::kMarkdownTable, "rf").ok());
  EXPECT_EQ(FilesIn(dir_),
            (std::set<std::string>{"corpus.jsonl", "pairs.jsonl", "pairs.jsonl.manifest.json",
                                   "train.features.jsonl", "test.features.jsonl", "model.json",
                                   "scores.jsonl", "labels.jsonl", "windows.jsonl"}));
}

TEST_F(PipelineTest, ErrorsMapToDistinctExitCodes) {
  PipelineConfig c = config_;
  c.corpus_path = Path("absent.jsonl");
  const auto missing = RunDatagen(c, datagen::RecordKind::kSummaryPair);
  EXPECT_EQ(ExitCodeFor(missing.status()), ExitCode::kMissingInput);

  c.corpus_path = Path("broken.jsonl");
  ASSERT_TRUE(WriteFile(c.corpus_path, "{\"kind\": \"summary_pair\"}\n").ok());
  const auto schema = RunDatagen(c, datagen::RecordKind::kSummaryPair);
  EXPECT_EQ(ExitCodeFor(schema.status()), ExitCode::kInvalidInput);

  c = config_;
  c.pairs_path.clear();
  const auto unset = RunDatagen(c, datagen::RecordKind::kSummaryPair);
  EXPECT_EQ(ExitCodeFor(unset.status()), ExitCode::kConfig);
  EXPECT_THAT(unset.status().message(), HasSubstr("pairs_path is required"));

  ASSERT_TRUE(RunDatagen(config_, datagen::RecordKind::kSummaryPair).ok());
  c = config_;
  c.features_path = Path("features.jsonl");
  c.embed_url = "http://127.0.0.1:1";
  const auto provider = RunFeaturize(c);
  EXPECT_EQ(ExitCodeFor(provider.status()), ExitCode::kProvider);
  const auto error = nlohmann::json::parse(ErrorJson(provider.status()));
  EXPECT_EQ(error["error"]["provider"], "embed");
  EXPECT_EQ(error["error"]["exit_code"], 5);
  EXPECT_EQ(error["error"]["code"], "UNAVAILABLE");

  c = config_;
  c.labels_path = Path("labels.jsonl");
  c.completion_url = "http://127.0.0.1:1";
  c.max_in_flight = 4;
  const auto completion = RunLabel(c);
  EXPECT_EQ(ExitCodeFor(completion.status()), ExitCode::kProvider);
  EXPECT_EQ(FailingProvider(completion.status()), "completion");

  c = config_;
  c.features_path = (dir_ / "corpus.jsonl" / "features.jsonl").string();
  EXPECT_EQ(ExitCodeFor(RunFeaturize(c).status()), ExitCode::kOutput);

  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), ExitCode::kOk);
  EXPECT_EQ(ExitCodeFor(absl::InternalError("x")), ExitCode::kInternal);
}

}  // namespace
}  // namespace ragulator::service
