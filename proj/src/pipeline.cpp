#include "securescan/pipeline.hpp"

#include <algorithm>
#include <cctype>

#include "securescan/error.hpp"

namespace securescan {
namespace {

std::string trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> explanation_reasons(const Explanation& e, bool positive, std::size_t n) {
  const auto& list = positive ? e.top_positive : e.top_negative;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < list.size() && i < n; ++i) out.push_back((positive ? "+" : "-") + list[i].term);
  return out;
}

nlohmann::json terms_json(const std::vector<TermContribution>& terms) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& t : terms) arr.push_back({{"term", t.term}, {"contribution", t.contribution}});
  return arr;
}

}  // namespace

ScanInput ScanInput::url(std::string_view raw, const TrackingDenyList& deny) {
  ScanInput in;
  in.kind = InputKind::Url;
  in.raw = trimmed(raw);
  NormalizedUrl n = normalize_url(in.raw, deny);
  in.normalized = std::move(n.text);
  in.https_present = n.https_present;
  return in;
}

ScanInput ScanInput::hash(std::string_view value) {
  ScanInput in;
  in.kind = InputKind::Hash;
  in.raw = trimmed(value);
  if (in.raw.empty()) throw Error(ErrorKind::EmptyInput, "empty hash");
  if (!is_valid_hash(in.raw)) throw Error(ErrorKind::InvalidArgument, "hash must be 32, 40 or 64 hex characters");
  in.normalized = in.raw;
  std::transform(in.normalized.begin(), in.normalized.end(), in.normalized.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return in;
}

ScanInput ScanInput::file(std::vector<std::uint8_t> bytes) {
  ScanInput in;
  in.kind = InputKind::File;
  in.normalized = sha256_hex(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  in.raw = in.normalized;
  in.bytes = std::move(bytes);
  return in;
}

Scanner::Scanner(std::shared_ptr<const ModelBundle> bundle, AppConfig config, std::shared_ptr<IntelClient> intel)
    : bundle_(std::move(bundle)), config_(std::move(config)), intel_(std::move(intel)) {
  if (!bundle_) throw Error(ErrorKind::ModelMissing, "scanner needs a model bundle");
  config_.thresholds.validate();
}

ModelStage Scanner::model_stage(const ScanInput& in) const {
  ModelStage stage;
  stage.heuristics = evaluate_rules(in.normalized, config_.rules, config_.reject_threshold);
  if (stage.heuristics.decision == HeuristicDecision::Reject) return stage;
  SparseVector x = bundle_->vectorizer.transform(in.normalized);
  stage.probability = predict_proba(bundle_->url_model, x).p;
  stage.threshold = map_threshold(*stage.probability, config_.thresholds);
  return stage;
}

Verdict Scanner::model_verdict(ThresholdOutcome t, double p, bool calibrated) const {
  Verdict v;
  v.layer = Layer::Model;
  v.probability = p;
  v.calibrated = calibrated;
  v.label = t == ThresholdOutcome::Malicious ? VerdictLabel::Malicious : VerdictLabel::Benign;
  return v;
}

Verdict Scanner::escalate(std::optional<double> p, LookupKind kind, const std::string& value) const {
  if (!intel_) return reconcile(p, IntelFailure{ErrorKind::Transport, "no intel provider configured"}, config_.consensus);
  try {
    LookupResult r = intel_->lookup(kind, value);
    Verdict v = reconcile(p, r.report, config_.consensus);
    if (v.intel_summary) v.intel_summary->from_cache = r.from_cache;
    return v;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::InvalidArgument || e.kind() == ErrorKind::EmptyInput) throw;
    return reconcile(p, IntelFailure{e.kind(), e.what()}, config_.consensus);
  }
}

Verdict Scanner::scan_url_input(const ScanInput& in) const {
  ModelStage stage = model_stage(in);
  if (stage.heuristics.decision == HeuristicDecision::Reject) {
    Verdict v;
    v.label = VerdictLabel::Malicious;
    v.layer = Layer::Heuristic;
    v.reasons = stage.heuristics.triggered;
    return v;
  }
  const double p = *stage.probability;
  const bool calibrated = bundle_->url_model.calibration.has_value();
  Explanation ex = explain(bundle_->url_model, bundle_->vectorizer, in.normalized, config_.explain_top_k);

  Verdict v;
  if (*stage.threshold == ThresholdOutcome::GrayZone) {
    v = escalate(p, LookupKind::Url, in.raw);
    v.reasons.push_back("gray-zone");
  } else {
    v = model_verdict(*stage.threshold, p, calibrated);
    v.reasons = explanation_reasons(ex, v.label == VerdictLabel::Malicious, 3);
  }
  v.calibrated = calibrated;
  v.explanation = std::move(ex);
  return v;
}

Verdict Scanner::scan_file_input(const ScanInput& in) const {
  if (!bundle_->file_model) throw Error(ErrorKind::ModelMissing, "bundle has no file model");
  const ModelParams& m = *bundle_->file_model;
  FileStaticFeatures f = file_static_features(in.bytes);
  Probability prob = predict_proba(m, file_feature_vector(f));
  ThresholdOutcome t = map_threshold(prob.p, config_.thresholds);
  Verdict v = t == ThresholdOutcome::GrayZone ? escalate(prob.p, LookupKind::Hash, in.normalized)
                                              : model_verdict(t, prob.p, prob.calibrated);
  v.calibrated = prob.calibrated;
  v.reasons.push_back("sha256:" + in.normalized);
  return v;
}

Verdict Scanner::scan(const ScanInput& input) const {
  switch (input.kind) {
    case InputKind::Url: return scan_url_input(input);
    case InputKind::Hash: return escalate(std::nullopt, LookupKind::Hash, input.normalized);
    case InputKind::File: return scan_file_input(input);
  }
  throw Error(ErrorKind::InvalidArgument, "unknown input kind");
}

nlohmann::json verdict_to_json(const Verdict& v) {
  nlohmann::json j{{"verdict", to_string(v.label)},
                   {"layer", to_string(v.layer)},
                   {"reasons", v.reasons},
                   {"calibrated", v.calibrated},
                   {"explanation",
                    {{"top_positive", terms_json(v.explanation.top_positive)},
                     {"top_negative", terms_json(v.explanation.top_negative)}}}};
  j["probability"] = v.probability ? nlohmann::json(*v.probability) : nlohmann::json(nullptr);
  if (v.intel_summary) {
    const auto& s = *v.intel_summary;
    j["intel"] = {{"malicious_engines", s.malicious_engines},   {"suspicious_engines", s.suspicious_engines},
                  {"harmless_engines", s.harmless_engines},     {"undetected_engines", s.undetected_engines},
                  {"tags", s.tags},                             {"last_analysis_ts", s.last_analysis_ts},
                  {"source", s.source},                         {"from_cache", s.from_cache}};
  }
  return j;
}

}  // namespace securescan
