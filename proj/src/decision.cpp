#include "securescan/decision.hpp"

#include <algorithm>
#include <cmath>

#include "securescan/error.hpp"

namespace securescan {

void ThresholdPolicy::validate() const {
  if (!(0.0 < t_benign && t_benign <= t_gray_upper && t_gray_upper <= t_malicious && t_malicious < 1.0))
    throw Error(ErrorKind::InvalidPolicy, "thresholds must satisfy 0 < benign <= gray_upper <= malicious < 1");
}

ThresholdOutcome map_threshold(double p, const ThresholdPolicy& policy) {
  policy.validate();
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "probability outside [0,1]");
  if (p <= policy.t_benign) return ThresholdOutcome::Benign;
  if (p >= policy.t_malicious) return ThresholdOutcome::Malicious;
  return ThresholdOutcome::GrayZone;
}

std::string_view to_string(VerdictLabel v) {
  switch (v) {
    case VerdictLabel::Benign: return "benign";
    case VerdictLabel::SafeVerified: return "safe_verified";
    case VerdictLabel::Suspicious: return "suspicious";
    case VerdictLabel::Malicious: return "malicious";
  }
  return "unknown";
}

std::string_view to_string(Layer l) {
  switch (l) {
    case Layer::Heuristic: return "heuristic";
    case Layer::Model: return "model";
    case Layer::Intel: return "intel";
  }
  return "unknown";
}

std::string_view to_string(ThresholdOutcome t) {
  switch (t) {
    case ThresholdOutcome::Benign: return "benign";
    case ThresholdOutcome::GrayZone: return "gray_zone";
    case ThresholdOutcome::Malicious: return "malicious";
  }
  return "unknown";
}

IntelSummary summarize(const IntelReport& r, bool from_cache) {
  return {r.malicious_engines, r.suspicious_engines, r.harmless_engines, r.undetected_engines,
          r.tags,              r.last_analysis_ts,   r.source,           from_cache};
}

Label binary_label(VerdictLabel v) {
  return (v == VerdictLabel::Malicious || v == VerdictLabel::Suspicious) ? Label::Malicious : Label::Benign;
}

Verdict reconcile(std::optional<double> p, const IntelOutcome& intel, const ConsensusPolicy& policy) {
  Verdict v;
  v.probability = p;
  v.layer = Layer::Intel;

  if (const auto* failure = std::get_if<IntelFailure>(&intel)) {
    v.label = VerdictLabel::Suspicious;
    v.reasons = {"intel-unavailable", std::string(to_string(failure->kind))};
    IntelSummary s;
    s.source = "unavailable";
    v.intel_summary = s;
    return v;
  }

  const auto& report = std::get<IntelReport>(intel);
  v.intel_summary = summarize(report);
  const bool not_found = std::find(report.tags.begin(), report.tags.end(), "not-found") != report.tags.end();
  const std::uint32_t k = std::max<std::uint32_t>(policy.engine_threshold, 1);

  if (report.malicious_engines >= k) {
    v.label = VerdictLabel::Malicious;
    v.reasons = {"confirmed", std::to_string(report.malicious_engines) + " engines flagged malicious"};
  } else if (report.malicious_engines == 0) {
    if (not_found && policy.not_found_suspicious) {
      v.label = VerdictLabel::Suspicious;
      v.reasons = {"intel-not-found"};
    } else {
      v.label = VerdictLabel::SafeVerified;
      v.reasons = {not_found ? "intel-not-found" : "no-detections"};
    }
  } else {
    v.label = VerdictLabel::Suspicious;
    v.reasons = {"partial-detections", std::to_string(report.malicious_engines) + " engines flagged malicious"};
  }
  return v;
}

}  // namespace securescan
