#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "securescan/pipeline.hpp"

namespace securescan {

struct ServiceResponse {
  int status = 200;
  nlohmann::json body;
};

/// POST /scan/url {"url"}, POST /scan/hash {"hash"}, GET /health.
/// A null scanner means no model is loaded: scans and health answer 503.
class ScanService {
 public:
  explicit ScanService(std::shared_ptr<const Scanner> scanner);
  ~ScanService();

  ScanService(const ScanService&) = delete;
  ScanService& operator=(const ScanService&) = delete;

  /// Transport-independent request handling (used by the HTTP layer and tests).
  ServiceResponse handle(std::string_view method, std::string_view path, std::string_view body) const;

  /// Binds the listener; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();

 private:
  struct Server;
  std::shared_ptr<const Scanner> scanner_;
  std::chrono::steady_clock::time_point started_;
  std::unique_ptr<Server> server_;
};

}  // namespace securescan
