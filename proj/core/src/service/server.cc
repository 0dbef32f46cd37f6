#include "ragulator/service/server.h"

#include <httplib.h>

#include "absl/strings/str_cat.h"
#include "ragulator/service/api.h"

namespace ragulator::service {

struct DetectServer::Impl {
  httplib::Server server;
  bool bound = false;
};

DetectServer::DetectServer(const Detector& detector, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  const unsigned workers = std::max(1u, options.worker_threads);
  impl_->server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  const unsigned per_request = std::max(1u, options.per_request_threads);
  impl_->server.Post("/detect",
                     [&detector, per_request](const httplib::Request& req, httplib::Response& res) {
                       const HttpReply reply = HandleDetect(detector, req.body, per_request);
                       res.status = reply.status;
                       res.set_content(reply.body, "application/json");
                     });
  impl_->server.Get("/health", [&detector](const httplib::Request&, httplib::Response& res) {
    const HttpReply reply = HandleHealth(detector);
    res.status = reply.status;
    res.set_content(reply.body, "application/json");
  });
}

DetectServer::~DetectServer() { Stop(); }

absl::StatusOr<int> DetectServer::Bind(const std::string& host, int port) {
  int bound = -1;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (impl_->server.bind_to_port(host, port)) {
    bound = port;
  }
  if (bound < 0) {
    return absl::UnavailableError(absl::StrCat("cannot bind ", host, ":", port));
  }
  impl_->bound = true;
  return bound;
}

absl::Status DetectServer::Run() {
  if (!impl_->bound) return absl::FailedPreconditionError("server is not bound");
  if (!impl_->server.listen_after_bind()) return absl::InternalError("server stopped with error");
  return absl::OkStatus();
}

void DetectServer::Stop() { impl_->server.stop(); }

void DetectServer::WaitUntilReady() { impl_->server.wait_until_ready(); }

}  // namespace ragulator::service
