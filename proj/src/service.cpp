#include "securescan/service.hpp"

#include <httplib.h>

#include "securescan/error.hpp"

namespace securescan {

struct ScanService::Server {
  httplib::Server http;
};

namespace {

ServiceResponse error_response(int status, std::string_view message) {
  return {status, {{"error", message}}};
}

int status_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyInput:
    case ErrorKind::MalformedUrl:
    case ErrorKind::InvalidArgument:
      return 400;
    case ErrorKind::ModelMissing:
      return 503;
    default:
      return 500;
  }
}

}  // namespace

ScanService::ScanService(std::shared_ptr<const Scanner> scanner)
    : scanner_(std::move(scanner)), started_(std::chrono::steady_clock::now()), server_(std::make_unique<Server>()) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    ServiceResponse r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server_->http.Post("/scan/url", route);
  server_->http.Post("/scan/hash", route);
  server_->http.Get("/health", route);
}

ScanService::~ScanService() { stop(); }

ServiceResponse ScanService::handle(std::string_view method, std::string_view path, std::string_view body) const {
  const auto t0 = std::chrono::steady_clock::now();

  if (method == "GET" && path == "/health") {
    if (!scanner_) return error_response(503, "model bundle not loaded");
    const auto& b = scanner_->bundle();
    double uptime = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    return {200,
            {{"status", "ok"},
             {"bundle_version", b.format_version},
             {"bundle_created_at", b.created_at},
             {"vocabulary_size", b.vectorizer.size()},
             {"file_model", b.file_model.has_value()},
             {"intel", scanner_->has_intel()},
             {"uptime_s", uptime}}};
  }

  const bool is_url = path == "/scan/url";
  if (method != "POST" || (!is_url && path != "/scan/hash")) return error_response(404, "no such endpoint");
  if (body.empty()) return error_response(400, "empty request body");

  nlohmann::json req = nlohmann::json::parse(body, nullptr, false);
  const char* field = is_url ? "url" : "hash";
  if (req.is_discarded() || !req.is_object()) return error_response(400, "body must be a JSON object");
  auto it = req.find(field);
  if (it == req.end() || !it->is_string()) return error_response(400, std::string("missing string field '") + field + "'");
  if (!scanner_) return error_response(503, "model bundle not loaded");

  try {
    const std::string value = it->get<std::string>();
    ScanInput in = is_url ? ScanInput::url(value, scanner_->config().tracking) : ScanInput::hash(value);
    Verdict v = scanner_->scan(in);
    nlohmann::json out = verdict_to_json(v);
    out["elapsed_ms"] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return {200, std::move(out)};
  } catch (const Error& e) {
    return error_response(status_for(e.kind()), e.what());
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

int ScanService::bind(const std::string& host, int port) {
  if (port == 0) return server_->http.bind_to_any_port(host);
  return server_->http.bind_to_port(host, port) ? port : -1;
}

bool ScanService::listen_after_bind() { return server_->http.listen_after_bind(); }

void ScanService::stop() {
  if (server_) server_->http.stop();
}

}  // namespace securescan
