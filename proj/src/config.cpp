#include "securescan/config.hpp"

#include <cstdlib>
#include <fstream>

#include "securescan/error.hpp"

namespace securescan {

AppConfig config_from_json(const nlohmann::json& doc, AppConfig cfg) {
  if (!doc.is_object()) throw Error(ErrorKind::InvalidArgument, "config must be a JSON object");
  try {
    if (auto t = doc.find("thresholds"); t != doc.end()) {
      cfg.thresholds.t_benign = t->value("benign", cfg.thresholds.t_benign);
      cfg.thresholds.t_gray_upper = t->value("gray_upper", cfg.thresholds.t_gray_upper);
      cfg.thresholds.t_malicious = t->value("malicious", cfg.thresholds.t_malicious);
    }
    cfg.consensus.engine_threshold = doc.value("engine_threshold", cfg.consensus.engine_threshold);
    cfg.consensus.not_found_suspicious = doc.value("not_found_suspicious", cfg.consensus.not_found_suspicious);
    cfg.reject_threshold = doc.value("reject_threshold", cfg.reject_threshold);
    if (auto r = doc.find("rules"); r != doc.end()) cfg.rules = RuleSet::from_json(*r);
    if (auto t = doc.find("tracking_params"); t != doc.end())
      cfg.tracking.keys = t->get<std::vector<std::string>>();
    cfg.intel.rate_limit_per_minute = doc.value("rate_limit_per_minute", cfg.intel.rate_limit_per_minute);
    cfg.intel.cache_ttl_s = doc.value("cache_ttl_s", cfg.intel.cache_ttl_s);
    cfg.intel.base_url = doc.value("intel_base_url", cfg.intel.base_url);
    cfg.intel.timeout_s = doc.value("intel_timeout_s", cfg.intel.timeout_s);
    cfg.intel.api_key = doc.value("api_key", cfg.intel.api_key);
    cfg.explain_top_k = doc.value("explain_top_k", cfg.explain_top_k);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::InvalidArgument, std::string("config: ") + e.what());
  }
  cfg.thresholds.validate();
  if (cfg.consensus.engine_threshold < 1) throw Error(ErrorKind::InvalidArgument, "engine_threshold must be >= 1");
  if (cfg.reject_threshold < 1) throw Error(ErrorKind::InvalidArgument, "reject_threshold must be >= 1");
  if (!(cfg.intel.cache_ttl_s > 0)) throw Error(ErrorKind::InvalidArgument, "cache_ttl_s must be positive");
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path, AppConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open config " + path.string());
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::InvalidArgument, "config " + path.string() + " is not valid JSON");
  return config_from_json(doc, std::move(base));
}

AppConfig config_from_environment() {
  AppConfig cfg;
  if (const char* path = std::getenv(kConfigEnv); path && *path) cfg = load_config(path, std::move(cfg));
  if (const char* key = std::getenv(kApiKeyEnv); key && *key) cfg.intel.api_key = key;
  return cfg;
}

}  // namespace securescan
