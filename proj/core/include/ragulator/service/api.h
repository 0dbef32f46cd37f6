#ifndef RAGULATOR_SERVICE_API_H_
#define RAGULATOR_SERVICE_API_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "ragulator/service/detector.h"

namespace ragulator::service {

// {"sentences": [...], "documents": [...]}; documents must be non-empty.
struct DetectRequest {
  std::vector<std::string> sentences;
  std::vector<std::string> documents;

  friend bool operator==(const DetectRequest&, const DetectRequest&) = default;
};

absl::StatusOr<DetectRequest> ParseDetectRequest(std::string_view body);
std::string DetectRequestToJson(const DetectRequest& request);

// {"results": [{"probability", "label", "n_windows", "features"}, ...]};
// features is an object keyed by feature name, or null.
std::string DetectResponseToJson(std::span<const SentenceDetection> results);
absl::StatusOr<std::vector<SentenceDetection>> ParseDetectResponse(std::string_view body);

// One detection per sentence, in order, at most `max_threads` at a time.
// The first failure is returned with "sentence <i>: " prefixed.
absl::StatusOr<std::vector<SentenceDetection>> DetectAll(const Detector& detector,
                                                         const DetectRequest& request,
                                                         unsigned max_threads = 1);

struct HttpReply {
  int status = 200;
  std::string body;
};

// 200 with the response; 400 for malformed requests; 502 with
// {"error", "provider"} when a provider fails; 500 otherwise.
HttpReply HandleDetect(const Detector& detector, std::string_view body, unsigned max_threads = 1);

// 200 {"status": "ok", ...} when every provider answers, else 503
// {"status": "degraded", ...}; each provider is listed with its error.
HttpReply HandleHealth(const Detector& detector);

}  // namespace ragulator::service

#endif  // RAGULATOR_SERVICE_API_H_
