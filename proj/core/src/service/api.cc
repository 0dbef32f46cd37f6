#include "ragulator/service/api.h"

#include <optional>

#include <nlohmann/json.hpp>

#include "absl/strings/str_cat.h"
#include "ragulator/common/parallel.h"
#include "ragulator/common/status.h"

namespace ragulator::service {
namespace {

using Json = nlohmann::ordered_json;

std::string ErrorBody(absl::string_view message) {
  return Json{{"error", std::string(message.data(), message.size())}}.dump();
}

absl::StatusOr<std::vector<std::string>> StringList(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be an array of strings"));
  }
  std::vector<std::string> out;
  for (const Json& s : *it) {
    if (!s.is_string()) {
      return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be an array of strings"));
    }
    out.push_back(s.get<std::string>());
  }
  return out;
}

}  // namespace

absl::StatusOr<DetectRequest> ParseDetectRequest(std::string_view body) {
  const Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    return absl::InvalidArgumentError("request body is not a JSON object");
  }
  for (const auto& [key, value] : j.items()) {
    if (key != "sentences" && key != "documents") {
      return absl::InvalidArgumentError(absl::StrCat("unknown field '", key, "'"));
    }
  }
  DetectRequest request;
  auto sentences = StringList(j, "sentences");
  if (!sentences.ok()) return sentences.status();
  auto documents = StringList(j, "documents");
  if (!documents.ok()) return documents.status();
  if (documents->empty()) return absl::InvalidArgumentError("'documents' is empty");
  request.sentences = *std::move(sentences);
  request.documents = *std::move(documents);
  return request;
}

std::string DetectRequestToJson(const DetectRequest& request) {
  return Json{{"sentences", request.sentences}, {"documents", request.documents}}.dump();
}

std::string DetectResponseToJson(std::span<const SentenceDetection> results) {
  Json list = Json::array();
  for (const SentenceDetection& d : results) {
    Json r;
    r["probability"] = d.probability;
    r["label"] = d.label;
    r["n_windows"] = d.n_windows;
    if (d.features) {
      Json f = Json::object();
      const auto values = d.features->ToArray();
      for (std::size_t i = 0; i < features::kNumFeatures; ++i) {
        f[std::string(features::kFeatureNames[i])] = values[i];
      }
      r["features"] = std::move(f);
    } else {
      r["features"] = nullptr;
    }
    list.push_back(std::move(r));
  }
  return Json{{"results", std::move(list)}}.dump();
}

absl::StatusOr<std::vector<SentenceDetection>> ParseDetectResponse(std::string_view body) {
  const Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("results") || !j["results"].is_array()) {
    return absl::InvalidArgumentError("response must be an object with a 'results' array");
  }
  std::vector<SentenceDetection> out;
  for (const Json& r : j["results"]) {
    if (!r.is_object() || !r.contains("probability") || !r["probability"].is_number() ||
        !r.contains("label") || !r["label"].is_number_integer() || !r.contains("n_windows") ||
        !r["n_windows"].is_number_unsigned()) {
      return absl::InvalidArgumentError("malformed result entry");
    }
    SentenceDetection d;
    d.probability = r["probability"].get<double>();
    d.label = r["label"].get<int>();
    d.n_windows = r["n_windows"].get<std::size_t>();
    if (r.contains("features") && r["features"].is_object()) {
      std::array<double, features::kNumFeatures> values{};
      for (std::size_t i = 0; i < features::kNumFeatures; ++i) {
        const auto it = r["features"].find(std::string(features::kFeatureNames[i]));
        if (it == r["features"].end() || !it->is_number()) {
          return absl::InvalidArgumentError("malformed features object");
        }
        values[i] = it->get<double>();
      }
      d.features = features::FeatureVector::FromArray(values);
    }
    out.push_back(d);
  }
  return out;
}

absl::StatusOr<std::vector<SentenceDetection>> DetectAll(const Detector& detector,
                                                         const DetectRequest& request,
                                                         unsigned max_threads) {
  if (request.documents.empty()) return absl::InvalidArgumentError("'documents' is empty");
  std::vector<std::optional<absl::StatusOr<SentenceDetection>>> results(request.sentences.size());
  ParallelFor(
      request.sentences.size(),
      [&](std::size_t i) { results[i] = detector.Detect(request.sentences[i], request.documents); },
      std::max(1u, max_threads));
  std::vector<SentenceDetection> out;
  out.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (!results[i]->ok()) {
      return PrefixStatus(results[i]->status(), absl::StrCat("sentence ", i, ": "));
    }
    out.push_back(**std::move(results[i]));
  }
  return out;
}

HttpReply HandleDetect(const Detector& detector, std::string_view body, unsigned max_threads) {
  auto request = ParseDetectRequest(body);
  if (!request.ok()) return {400, ErrorBody(request.status().message())};
  auto results = DetectAll(detector, *request, max_threads);
  if (results.ok()) return {200, DetectResponseToJson(*results)};
  const absl::Status& s = results.status();
  if (const std::optional<std::string> provider = FailingProvider(s)) {
    return {502, Json{{"error", std::string(s.message())}, {"provider", *provider}}.dump()};
  }
  if (absl::IsInvalidArgument(s)) return {400, ErrorBody(s.message())};
  return {500, ErrorBody(s.message())};
}

HttpReply HandleHealth(const Detector& detector) {
  bool healthy = true;
  Json providers = Json::array();
  for (const ProviderHealth& p : detector.CheckProviders()) {
    Json entry{{"name", p.name}, {"ok", p.status.ok()}};
    if (!p.status.ok()) {
      healthy = false;
      entry["error"] = std::string(p.status.message());
    }
    providers.push_back(std::move(entry));
  }
  const Json body{{"status", healthy ? "ok" : "degraded"},
                  {"detector", std::string(detector.Name())},
                  {"providers", std::move(providers)}};
  return {healthy ? 200 : 503, body.dump()};
}

}  // namespace ragulator::service
