#include "securescan/intel.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "securescan/error.hpp"

namespace securescan {
namespace {

constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

std::uint32_t count_field(const nlohmann::json& stats, const char* key) {
  auto it = stats.find(key);
  if (it == stats.end() || !it->is_number()) return 0;
  double v = it->get<double>();
  return v > 0 ? static_cast<std::uint32_t>(v) : 0;
}

std::string cache_key(LookupKind kind, const std::string& id) {
  return (kind == LookupKind::Url ? "url:" : "file:") + id;
}

}  // namespace

std::string base64url_encode(std::string_view bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= bytes.size(); i += 3) {
    std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) | (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                      static_cast<std::uint8_t>(bytes[i + 2]);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t v = static_cast<std::uint8_t>(bytes[i]) << 16;
    if (rest == 2) v |= static_cast<std::uint8_t>(bytes[i + 1]) << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    if (rest == 2) out += kAlphabet[(v >> 6) & 63];
  }
  return out;
}

std::string base64url_decode(std::string_view text) {
  while (!text.empty() && text.back() == '=') text.remove_suffix(1);
  if (text.size() % 4 == 1) throw Error(ErrorKind::InvalidArgument, "invalid base64url length");
  auto value = [](char c) -> std::uint32_t {
    if (c >= 'A' && c <= 'Z') return static_cast<std::uint32_t>(c - 'A');
    if (c >= 'a' && c <= 'z') return static_cast<std::uint32_t>(c - 'a' + 26);
    if (c >= '0' && c <= '9') return static_cast<std::uint32_t>(c - '0' + 52);
    if (c == '-') return 62;
    if (c == '_') return 63;
    throw Error(ErrorKind::InvalidArgument, "invalid base64url character");
  };
  std::string out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    acc = (acc << 6) | value(c);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out += static_cast<char>((acc >> bits) & 0xff);
    }
  }
  return out;
}

std::string url_identifier(std::string_view url) {
  if (url.empty()) throw Error(ErrorKind::EmptyInput, "empty URL");
  return base64url_encode(url);
}

bool is_valid_hash(std::string_view value) {
  if (value.size() != 32 && value.size() != 40 && value.size() != 64) return false;
  return std::all_of(value.begin(), value.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)); });
}

IntelReport parse_report(std::string_view body, std::string_view source, std::int64_t fetched_at) {
  nlohmann::json doc = nlohmann::json::parse(body, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded() || !doc.is_object())
    throw Error(ErrorKind::Transport, "provider response is not a JSON object");

  const nlohmann::json empty = nlohmann::json::object();
  const nlohmann::json* attrs = &empty;
  if (auto d = doc.find("data"); d != doc.end() && d->is_object()) {
    if (auto a = d->find("attributes"); a != d->end() && a->is_object()) attrs = &*a;
  }

  IntelReport r;
  r.source = source;
  r.fetched_at = fetched_at;
  if (auto s = attrs->find("last_analysis_stats"); s != attrs->end() && s->is_object()) {
    r.malicious_engines = count_field(*s, "malicious");
    r.suspicious_engines = count_field(*s, "suspicious");
    r.harmless_engines = count_field(*s, "harmless");
    r.undetected_engines = count_field(*s, "undetected");
  }
  if (auto t = attrs->find("tags"); t != attrs->end() && t->is_array()) {
    for (const auto& tag : *t)
      if (tag.is_string()) r.tags.push_back(tag.get<std::string>());
  }
  if (auto ts = attrs->find("last_analysis_date"); ts != attrs->end() && ts->is_number())
    r.last_analysis_ts = ts->get<std::int64_t>();
  return r;
}

HttpProvider::HttpProvider(std::string base_url, std::string api_key, double timeout_s)
    : base_url_(std::move(base_url)), api_key_(std::move(api_key)), timeout_s_(timeout_s) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

ProviderResponse HttpProvider::fetch(LookupKind kind, const std::string& identifier) {
  httplib::Client client(base_url_);
  const auto timeout = std::chrono::milliseconds(static_cast<long>(timeout_s_ * 1000));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const std::string path = (kind == LookupKind::Url ? "/api/v3/urls/" : "/api/v3/files/") + identifier;
  httplib::Headers headers{{"x-apikey", api_key_}, {"accept", "application/json"}};
  auto res = client.Get(path, headers);
  if (!res) throw Error(ErrorKind::Transport, "request failed: " + httplib::to_string(res.error()));
  return {res->status, res->body};
}

FixtureProvider::FixtureProvider(std::filesystem::path dir) : dir_(std::move(dir)) {}

ProviderResponse FixtureProvider::fetch(LookupKind, const std::string& identifier) {
  std::error_code ec;
  const auto file = dir_ / (identifier + ".json");
  if (identifier.size() > 240 || !std::filesystem::is_regular_file(file, ec)) return {404, {}};
  std::ifstream in(file, std::ios::binary);
  if (!in) return {404, {}};
  std::ostringstream buf;
  buf << in.rdbuf();
  return {200, buf.str()};
}

std::unique_ptr<IntelProvider> mock_provider(const std::filesystem::path& fixture_dir) {
  return std::make_unique<FixtureProvider>(fixture_dir);
}

Clock system_clock() {
  return [] {
    using namespace std::chrono;
    return duration<double>(system_clock::now().time_since_epoch()).count();
  };
}

RateLimiter::RateLimiter(std::uint32_t limit, double window_s, Clock clock)
    : limit_(limit), window_s_(window_s), clock_(std::move(clock)) {}

bool RateLimiter::try_acquire() {
  if (limit_ == 0) return true;
  std::lock_guard lock(mu_);
  const double now = clock_();
  while (!stamps_.empty() && now - stamps_.front() >= window_s_) stamps_.pop_front();
  if (stamps_.size() >= limit_) return false;
  stamps_.push_back(now);
  return true;
}

IntelClient::IntelClient(std::shared_ptr<IntelProvider> provider, IntelConfig config, Clock clock)
    : provider_(std::move(provider)),
      config_(std::move(config)),
      clock_(std::move(clock)),
      limiter_(config_.rate_limit_per_minute, config_.rate_window_s, clock_) {
  if (!provider_) throw Error(ErrorKind::InvalidArgument, "intel client needs a provider");
}

IntelReport IntelClient::fetch_uncached(LookupKind kind, const std::string& id) {
  if (!limiter_.try_acquire()) throw Error(ErrorKind::RateLimited, "local rate limit exhausted");
  ++provider_calls_;
  ProviderResponse resp = provider_->fetch(kind, id);
  const auto now = static_cast<std::int64_t>(std::floor(clock_()));
  switch (resp.status) {
    case 200:
      return parse_report(resp.body, provider_->name(), now);
    case 404: {
      IntelReport r;
      r.tags = {"not-found"};
      r.source = provider_->name();
      r.fetched_at = now;
      return r;
    }
    case 401:
    case 403:
      throw Error(ErrorKind::AuthError, "provider rejected the API key (HTTP " + std::to_string(resp.status) + ")");
    case 429:
      throw Error(ErrorKind::RateLimited, "provider quota exceeded (HTTP 429)");
    default:
      throw Error(ErrorKind::Transport, "unexpected provider status " + std::to_string(resp.status));
  }
}

LookupResult IntelClient::lookup(LookupKind kind, std::string_view value) {
  std::string id;
  if (kind == LookupKind::Hash) {
    if (!is_valid_hash(value))
      throw Error(ErrorKind::InvalidArgument, "hash must be 32, 40 or 64 hex characters");
    id.assign(value);
    std::transform(id.begin(), id.end(), id.begin(), [](unsigned char c) { return std::tolower(c); });
  } else {
    if (value.empty()) throw Error(ErrorKind::EmptyInput, "empty URL");
    id = url_identifier(value);
  }
  const std::string key = cache_key(kind, id);

  std::promise<IntelReport> promise;
  {
    std::unique_lock lock(mu_);
    if (auto it = cache_.find(key); it != cache_.end()) {
      if (clock_() - it->second.stored_at <= config_.cache_ttl_s) {
        ++cache_hits_;
        return {it->second.report, true};
      }
      cache_.erase(it);
    }
    if (auto it = in_flight_.find(key); it != in_flight_.end()) {
      auto shared = it->second;
      lock.unlock();
      return {shared.get(), false};  // rethrows the leader's error
    }
    in_flight_.emplace(key, promise.get_future().share());
  }

  try {
    IntelReport report = fetch_uncached(kind, id);
    {
      std::lock_guard lock(mu_);
      cache_[key] = {report, clock_()};
      in_flight_.erase(key);
    }
    promise.set_value(report);
    return {std::move(report), false};
  } catch (...) {
    {
      std::lock_guard lock(mu_);
      in_flight_.erase(key);
    }
    promise.set_exception(std::current_exception());
    throw;
  }
}

}  // namespace securescan
