#include "ragulator/service/detector.h"

#include <algorithm>
#include <cmath>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/status.h"
#include "ragulator/common/strings.h"
#include "ragulator/features/classical.h"
#include "ragulator/features/featurize.h"
#include "ragulator/text/preprocess.h"
#include "ragulator/window/windows.h"

namespace ragulator::service {
namespace {

constexpr std::string_view kHealthText = "Health check sentence.";

// Context slices of every window of every non-blank document.
absl::StatusOr<std::vector<std::string>> WindowSlices(std::string_view sentence,
                                                      std::span<const std::string> documents,
                                                      const window::TokenBudgetTokenizer& tokenizer,
                                                      int limit) {
  if (TrimAscii(sentence).empty()) return absl::InvalidArgumentError("empty sentence");
  std::vector<std::string> out;
  for (std::size_t d = 0; d < documents.size(); ++d) {
    const std::string& doc = documents[d];
    if (TrimAscii(doc).empty()) continue;
    auto ws = window::BuildWindows("", sentence, doc, tokenizer, limit);
    if (!ws.ok()) return PrefixStatus(ws.status(), absl::StrCat("document ", d, ": "));
    for (const window::Window& w : ws->windows) {
      out.push_back(doc.substr(w.context_char_start, w.context_char_end - w.context_char_start));
    }
  }
  if (out.empty()) return absl::InvalidArgumentError("no non-empty documents");
  return out;
}

SentenceDetection Aggregate(std::span<const double> probabilities, double threshold) {
  SentenceDetection d;
  d.n_windows = probabilities.size();
  d.probability = *std::min_element(probabilities.begin(), probabilities.end());
  d.label = d.probability >= threshold ? 1 : 0;
  return d;
}

}  // namespace

MetaClassifierDetector::MetaClassifierDetector(ensemble::TreeEnsembleModel model,
                                               std::unique_ptr<features::EmbeddingProvider> embed,
                                               std::unique_ptr<features::RerankerProvider> rerank,
                                               DetectorOptions options)
    : model_(std::move(model)),
      embed_(std::move(embed)),
      rerank_(std::move(rerank)),
      options_(options) {}

absl::StatusOr<SentenceDetection> MetaClassifierDetector::Detect(
    std::string_view sentence, std::span<const std::string> documents) const {
  auto slices = WindowSlices(sentence, documents, tokenizer_, options_.window_limit);
  if (!slices.ok()) return slices.status();
  std::vector<double> probabilities;
  std::vector<features::FeatureVector> fvs;
  for (std::size_t i = 0; i < slices->size(); ++i) {
    auto fv = features::Featurize(sentence, (*slices)[i], *embed_, *rerank_);
    if (!fv.ok()) return PrefixStatus(fv.status(), absl::StrCat("window ", i, ": "));
    auto p = model_.Predict(*fv);
    if (!p.ok()) return absl::InternalError(absl::StrCat("window ", i, ": ", p.status().message()));
    probabilities.push_back(*p);
    fvs.push_back(*fv);
  }
  SentenceDetection d = Aggregate(probabilities, options_.threshold);
  const auto argmin = std::min_element(probabilities.begin(), probabilities.end());
  d.features = fvs[static_cast<std::size_t>(argmin - probabilities.begin())];
  return d;
}

std::vector<ProviderHealth> MetaClassifierDetector::CheckProviders() const {
  const std::vector<std::string> probe = {std::string(kHealthText)};
  return {{std::string(embed_->Name()), embed_->Embed(probe).status()},
          {std::string(rerank_->Name()), rerank_->Score(kHealthText, probe).status()}};
}

absl::StatusOr<std::vector<double>> OverlapWindowClassifier::Classify(
    std::string_view sentence, const std::vector<std::string>& slices) const {
  const text::PreprocessedText candidate = text::Preprocess(sentence);
  std::vector<double> out;
  out.reserve(slices.size());
  for (const std::string& slice : slices) {
    const double precision = features::PrecisionScore(candidate, text::Preprocess(slice));
    out.push_back(std::clamp(1.0 - precision, 0.01, 0.99));
  }
  return out;
}

HttpWindowClassifier::HttpWindowClassifier(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {}

absl::StatusOr<std::vector<double>> HttpWindowClassifier::Classify(
    std::string_view sentence, const std::vector<std::string>& slices) const {
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  const nlohmann::json body = {{"sentence", sentence}, {"contexts", slices}};
  const auto res = client.Post("/classify", body.dump(), "application/json");
  if (!res) {
    return absl::UnavailableError(absl::StrCat("window_scorer unreachable at ", base_url_, ": ",
                                               httplib::to_string(res.error())));
  }
  if (res->status != 200) {
    return absl::UnavailableError(absl::StrCat("window_scorer returned HTTP ", res->status));
  }
  const auto reply = nlohmann::json::parse(res->body, nullptr, false);
  const auto probs = reply.is_object() ? reply.find("probabilities") : reply.end();
  if (reply.is_discarded() || !reply.is_object() || probs == reply.end() || !probs->is_array()) {
    return absl::InternalError("window_scorer returned malformed JSON");
  }
  std::vector<double> out;
  for (const auto& p : *probs) {
    if (!p.is_number()) return absl::InternalError("window_scorer returned a non-numeric score");
    out.push_back(p.get<double>());
  }
  return out;
}

std::unique_ptr<WindowClassifier> MakeWindowClassifier(const std::string& endpoint) {
  if (endpoint == "stub") return std::make_unique<OverlapWindowClassifier>();
  return std::make_unique<HttpWindowClassifier>(endpoint, std::chrono::seconds(30));
}

WindowScorerDetector::WindowScorerDetector(std::unique_ptr<WindowClassifier> classifier,
                                           DetectorOptions options)
    : classifier_(std::move(classifier)), options_(options) {}

absl::StatusOr<SentenceDetection> WindowScorerDetector::Detect(
    std::string_view sentence, std::span<const std::string> documents) const {
  auto slices = WindowSlices(sentence, documents, tokenizer_, options_.window_limit);
  if (!slices.ok()) return slices.status();
  auto probabilities = classifier_->Classify(sentence, *slices);
  if (!probabilities.ok()) return AttachProvider(probabilities.status(), classifier_->Name());
  if (probabilities->size() != slices->size()) {
    return AttachProvider(absl::InternalError(absl::StrCat(
                              ToAbsl(classifier_->Name()), " returned ", probabilities->size(),
                              " scores for ", slices->size(), " windows")),
                          classifier_->Name());
  }
  for (double p : *probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return AttachProvider(absl::InternalError(absl::StrCat(ToAbsl(classifier_->Name()),
                                                             " returned probability ", p)),
                            classifier_->Name());
    }
  }
  return Aggregate(*probabilities, options_.threshold);
}

std::vector<ProviderHealth> WindowScorerDetector::CheckProviders() const {
  const std::vector<std::string> probe = {std::string(kHealthText)};
  return {{std::string(classifier_->Name()), classifier_->Classify(kHealthText, probe).status()}};
}

absl::StatusOr<std::unique_ptr<Detector>> MakeDetector(const PipelineConfig& config) {
  const DetectorOptions options{config.threshold, config.window_limit};
  if (config.detector == DetectorKind::kWindowScorer) {
    return std::make_unique<WindowScorerDetector>(MakeWindowClassifier(config.window_scorer_url),
                                                  options);
  }
  if (config.model_path.empty()) {
    return ConfigError("config: model_path is required by the meta_classifier detector");
  }
  auto model = ensemble::LoadModel(config.model_path);
  if (!model.ok()) return model.status();
  return std::make_unique<MetaClassifierDetector>(
      *std::move(model), features::MakeEmbeddingProvider(config.embed_url),
      features::MakeRerankerProvider(config.rerank_url), options);
}

}  // namespace ragulator::service
