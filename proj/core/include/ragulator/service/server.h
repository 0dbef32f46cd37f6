#ifndef RAGULATOR_SERVICE_SERVER_H_
#define RAGULATOR_SERVICE_SERVER_H_

#include <memory>
#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ragulator/service/detector.h"

namespace ragulator::service {

struct ServerOptions {
  unsigned worker_threads = 8;
  // Parallelism across the sentences of one request.
  unsigned per_request_threads = 1;
};

// POST /detect and GET /health over HTTP. The detector must outlive the
// server.
class DetectServer {
 public:
  DetectServer(const Detector& detector, ServerOptions options);
  ~DetectServer();
  DetectServer(const DetectServer&) = delete;
  DetectServer& operator=(const DetectServer&) = delete;

  // Port 0 binds a free port. Returns the bound port.
  absl::StatusOr<int> Bind(const std::string& host, int port);
  // Serves until Stop(); requires a successful Bind.
  absl::Status Run();
  void Stop();
  void WaitUntilReady();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ragulator::service

#endif  // RAGULATOR_SERVICE_SERVER_H_
