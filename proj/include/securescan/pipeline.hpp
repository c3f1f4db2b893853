#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "securescan/bundle.hpp"
#include "securescan/config.hpp"
#include "securescan/decision.hpp"
#include "securescan/intel.hpp"

namespace securescan {

enum class InputKind { Url, Hash, File };

struct ScanInput {
  InputKind kind = InputKind::Url;
  std::string raw;                  // submitted URL or hash (trimmed)
  std::string normalized;           // lowercase URL / lowercase hex digest / SHA-256 of file bytes
  bool https_present = false;
  std::vector<std::uint8_t> bytes;  // file payload

  /// Throws EmptyInput or MalformedUrl.
  static ScanInput url(std::string_view raw, const TrackingDenyList& deny = {});
  /// Throws InvalidArgument unless the value is 32/40/64 hex characters.
  static ScanInput hash(std::string_view value);
  static ScanInput file(std::vector<std::uint8_t> bytes);
};

/// Result of Layers 1-2 only (no intel): what the latency budget covers.
struct ModelStage {
  HeuristicOutcome heuristics;
  std::optional<double> probability;
  std::optional<ThresholdOutcome> threshold;
};

/// Runs heuristics -> model -> threshold -> (gray zone only) intel. Holds the
/// bundle immutably; safe to share across threads.
class Scanner {
 public:
  Scanner(std::shared_ptr<const ModelBundle> bundle, AppConfig config,
          std::shared_ptr<IntelClient> intel = nullptr);

  Verdict scan(const ScanInput& input) const;
  Verdict scan_url(std::string_view raw) const { return scan(ScanInput::url(raw, config_.tracking)); }

  /// Normalize + heuristics + vectorize + predict + threshold for one URL.
  ModelStage model_stage(const ScanInput& url_input) const;

  const ModelBundle& bundle() const { return *bundle_; }
  const AppConfig& config() const { return config_; }
  bool has_intel() const { return intel_ != nullptr; }

 private:
  Verdict scan_url_input(const ScanInput& in) const;
  Verdict scan_file_input(const ScanInput& in) const;
  Verdict escalate(std::optional<double> p, LookupKind kind, const std::string& value) const;
  Verdict model_verdict(ThresholdOutcome t, double p, bool calibrated) const;

  std::shared_ptr<const ModelBundle> bundle_;
  AppConfig config_;
  std::shared_ptr<IntelClient> intel_;
};

nlohmann::json verdict_to_json(const Verdict& v);

}  // namespace securescan
