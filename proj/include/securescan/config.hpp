#pragma once

#include <filesystem>
#include <optional>

#include <json.hpp>

#include "securescan/corpus.hpp"
#include "securescan/decision.hpp"
#include "securescan/heuristics.hpp"
#include "securescan/intel.hpp"

namespace securescan {

inline constexpr const char* kApiKeyEnv = "SECURESCAN_VT_API_KEY";
inline constexpr const char* kConfigEnv = "SECURESCAN_CONFIG";

/// Runtime knobs shared by the CLI, the service and the evaluation harness.
struct AppConfig {
  ThresholdPolicy thresholds;
  ConsensusPolicy consensus;
  int reject_threshold = kDefaultRejectThreshold;
  RuleSet rules = RuleSet::defaults();
  TrackingDenyList tracking;
  IntelConfig intel;
  std::size_t explain_top_k = 5;
};

/// Keys (all optional): thresholds.{benign,gray_upper,malicious},
/// engine_threshold, not_found_suspicious, reject_threshold, rules[],
/// tracking_params[], rate_limit_per_minute, cache_ttl_s, intel_base_url,
/// intel_timeout_s, api_key, explain_top_k. Unknown keys are ignored.
AppConfig config_from_json(const nlohmann::json& doc, AppConfig base = {});
AppConfig load_config(const std::filesystem::path& path, AppConfig base = {});

/// Defaults, then the file named by SECURESCAN_CONFIG (if set), then the API
/// key from SECURESCAN_VT_API_KEY (if set).
AppConfig config_from_environment();

}  // namespace securescan
