#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

namespace securescan {

struct IntelReport {
  std::uint32_t malicious_engines = 0;
  std::uint32_t suspicious_engines = 0;
  std::uint32_t harmless_engines = 0;
  std::uint32_t undetected_engines = 0;
  std::vector<std::string> tags;
  std::int64_t last_analysis_ts = 0;
  std::string source;
  std::int64_t fetched_at = 0;

  bool operator==(const IntelReport&) const = default;
};

enum class LookupKind { Url, Hash };

/// Unpadded base64url (RFC 4648 section 5).
std::string base64url_encode(std::string_view bytes);
/// Accepts padded or unpadded input; throws InvalidArgument on bad characters.
std::string base64url_decode(std::string_view text);

/// Provider identifier for a URL: base64url of the exact string, no padding.
std::string url_identifier(std::string_view url);

/// MD5, SHA-1 or SHA-256 hex digest.
bool is_valid_hash(std::string_view value);

/// Parses a provider v3 object document (data.attributes.last_analysis_stats,
/// tags, last_analysis_date). Missing stats default to 0. Throws Transport when
/// the body is not a JSON object.
IntelReport parse_report(std::string_view body, std::string_view source, std::int64_t fetched_at);

struct ProviderResponse {
  int status = 0;
  std::string body;
};

/// Raw transport to a threat-intelligence backend. Throws Error(Transport) on
/// connection-level failures.
class IntelProvider {
 public:
  virtual ~IntelProvider() = default;
  virtual ProviderResponse fetch(LookupKind kind, const std::string& identifier) = 0;
  virtual std::string name() const = 0;
};

/// GET {base}/api/v3/urls/{id} and {base}/api/v3/files/{hash} with `x-apikey`.
class HttpProvider final : public IntelProvider {
 public:
  HttpProvider(std::string base_url, std::string api_key, double timeout_s = 10.0);
  ProviderResponse fetch(LookupKind kind, const std::string& identifier) override;
  std::string name() const override { return "virustotal"; }

 private:
  std::string base_url_;
  std::string api_key_;
  double timeout_s_;
};

/// Serves `<identifier>.json` files from a directory; anything absent is a 404.
class FixtureProvider final : public IntelProvider {
 public:
  explicit FixtureProvider(std::filesystem::path dir);
  ProviderResponse fetch(LookupKind kind, const std::string& identifier) override;
  std::string name() const override { return "fixtures"; }

 private:
  std::filesystem::path dir_;
};

std::unique_ptr<IntelProvider> mock_provider(const std::filesystem::path& fixture_dir);

/// Seconds since the epoch; injectable for tests.
using Clock = std::function<double()>;
Clock system_clock();

/// Sliding-window limiter: at most `limit` acquisitions in any `window_s`
/// interval. A limit of 0 disables limiting. Never blocks.
class RateLimiter {
 public:
  RateLimiter(std::uint32_t limit, double window_s, Clock clock);
  bool try_acquire();

 private:
  std::uint32_t limit_;
  double window_s_;
  Clock clock_;
  std::mutex mu_;
  std::deque<double> stamps_;
};

struct IntelConfig {
  std::string base_url = "https://www.virustotal.com";
  std::string api_key;
  double timeout_s = 10.0;
  std::uint32_t rate_limit_per_minute = 4;
  double rate_window_s = 60.0;
  double cache_ttl_s = 24 * 3600.0;
};

struct LookupResult {
  IntelReport report;
  bool from_cache = false;
};

/// Cache-then-limiter-then-provider lookup. Thread-safe; concurrent misses on
/// the same key share a single provider call.
class IntelClient {
 public:
  IntelClient(std::shared_ptr<IntelProvider> provider, IntelConfig config, Clock clock = system_clock());

  /// Throws InvalidArgument (bad hash / empty URL, before any network
  /// activity), AuthError, RateLimited, Transport. A 404 yields an all-zero
  /// report tagged "not-found".
  LookupResult lookup(LookupKind kind, std::string_view value);

  std::uint64_t provider_calls() const { return provider_calls_.load(); }
  std::uint64_t cache_hits() const { return cache_hits_.load(); }
  const IntelConfig& config() const { return config_; }

 private:
  struct CacheEntry {
    IntelReport report;
    double stored_at = 0;
  };

  IntelReport fetch_uncached(LookupKind kind, const std::string& id);

  std::shared_ptr<IntelProvider> provider_;
  IntelConfig config_;
  Clock clock_;
  RateLimiter limiter_;
  std::mutex mu_;
  std::map<std::string, CacheEntry> cache_;
  std::map<std::string, std::shared_future<IntelReport>> in_flight_;
  std::atomic<std::uint64_t> provider_calls_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
};

}  // namespace securescan
