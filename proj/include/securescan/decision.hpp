#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "securescan/classifier.hpp"
#include "securescan/error.hpp"
#include "securescan/intel.hpp"

namespace securescan {

/// p <= t_benign is benign, p >= t_malicious is malicious, everything in
/// between (including (t_gray_upper, t_malicious)) escalates.
struct ThresholdPolicy {
  double t_benign = 0.45;
  double t_gray_upper = 0.55;
  double t_malicious = 0.60;

  /// Throws InvalidPolicy unless 0 < t_benign <= t_gray_upper <= t_malicious < 1.
  void validate() const;
};

enum class ThresholdOutcome { Benign, GrayZone, Malicious };

ThresholdOutcome map_threshold(double p, const ThresholdPolicy& policy);

enum class VerdictLabel { Benign, SafeVerified, Suspicious, Malicious };
enum class Layer { Heuristic, Model, Intel };

std::string_view to_string(VerdictLabel v);
std::string_view to_string(Layer l);
std::string_view to_string(ThresholdOutcome t);

struct IntelSummary {
  std::uint32_t malicious_engines = 0;
  std::uint32_t suspicious_engines = 0;
  std::uint32_t harmless_engines = 0;
  std::uint32_t undetected_engines = 0;
  std::vector<std::string> tags;
  std::int64_t last_analysis_ts = 0;
  std::string source;
  bool from_cache = false;
};

IntelSummary summarize(const IntelReport& r, bool from_cache = false);

struct Verdict {
  VerdictLabel label = VerdictLabel::Benign;
  std::optional<double> probability;
  Layer layer = Layer::Model;
  std::vector<std::string> reasons;
  std::optional<IntelSummary> intel_summary;
  Explanation explanation;
  bool calibrated = true;
};

/// Malicious and Suspicious count as malicious when scored against binary labels.
Label binary_label(VerdictLabel v);

struct IntelFailure {
  ErrorKind kind = ErrorKind::Transport;
  std::string message;
};

using IntelOutcome = std::variant<IntelReport, IntelFailure>;

struct ConsensusPolicy {
  std::uint32_t engine_threshold = 3;  // K
  bool not_found_suspicious = false;
};

/// Resolves a gray-zone probability with an intel lookup outcome. Never throws
/// for intel failures; they degrade to Suspicious ("intel-unavailable").
/// Hash lookups have no model probability and pass std::nullopt.
Verdict reconcile(std::optional<double> p, const IntelOutcome& intel, const ConsensusPolicy& policy = {});

}  // namespace securescan
