#include "securescan/baselines.hpp"

#include <cstdio>
#include <sstream>

#include "securescan/error.hpp"

namespace securescan {

const BaselineRow& BaselineTable::row(std::string_view name) const {
  for (const auto& r : rows)
    if (r.name == name) return r;
  throw Error(ErrorKind::InvalidArgument, "no baseline row '" + std::string(name) + "'");
}

BaselineTable compare_baselines(const std::vector<LabeledSample>& samples,
                                std::shared_ptr<const ModelBundle> bundle, const AppConfig& config,
                                std::shared_ptr<IntelClient> intel) {
  Scanner model_only(bundle, config, nullptr);
  Scanner hybrid(bundle, config, intel);

  std::vector<Label> actual, heur, intel_pred, model_pred, hybrid_pred;
  for (const auto& s : samples) {
    actual.push_back(s.label);
    ScanInput in = ScanInput::url(s.text, config.tracking);

    HeuristicOutcome h = evaluate_rules(in.normalized, config.rules, config.reject_threshold);
    heur.push_back(h.decision == HeuristicDecision::Reject ? Label::Malicious : Label::Benign);

    Label ip = Label::Benign;
    if (intel) {
      try {
        if (intel->lookup(LookupKind::Url, in.raw).report.malicious_engines >= config.consensus.engine_threshold)
          ip = Label::Malicious;
      } catch (const Error&) {
      }
    }
    intel_pred.push_back(ip);

    model_pred.push_back(binary_label(model_only.scan(in).label));
    hybrid_pred.push_back(binary_label(hybrid.scan(in).label));
  }

  BaselineTable t;
  auto add = [&](std::string name, const std::vector<Label>& pred) {
    ConfusionMatrix cm = confusion(pred, actual);
    t.rows.push_back({std::move(name), cm, metrics(cm)});
  };
  add("heuristic_only", heur);
  add("intel_only", intel_pred);
  add("model_only", model_pred);
  add("hybrid", hybrid_pred);
  return t;
}

std::string format_baseline_table(const BaselineTable& t) {
  std::ostringstream out;
  char buf[64];
  out << "Metric              ";
  for (const auto& r : t.rows) {
    std::snprintf(buf, sizeof buf, "%16s", r.name.c_str());
    out << buf;
  }
  out << '\n';
  auto line = [&](const char* label, auto get, bool percent) {
    std::snprintf(buf, sizeof buf, "%-20s", label);
    out << buf;
    for (const auto& r : t.rows) {
      double v = get(r.metrics);
      if (percent) std::snprintf(buf, sizeof buf, "%15.1f%%", v * 100.0);
      else std::snprintf(buf, sizeof buf, "%16.4f", v);
      out << buf;
    }
    out << '\n';
  };
  line("Accuracy", [](const MetricsReport& m) { return m.accuracy; }, true);
  line("Precision", [](const MetricsReport& m) { return m.precision; }, false);
  line("Recall", [](const MetricsReport& m) { return m.recall; }, false);
  line("F1-Score", [](const MetricsReport& m) { return m.f1; }, false);
  line("False Positive Rate", [](const MetricsReport& m) { return m.fpr; }, true);
  return out.str();
}

nlohmann::json baseline_table_json(const BaselineTable& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : t.rows) {
    arr.push_back({{"name", r.name},
                   {"tp", r.confusion.tp},
                   {"fp", r.confusion.fp},
                   {"tn", r.confusion.tn},
                   {"fn", r.confusion.fn},
                   {"accuracy", r.metrics.accuracy},
                   {"precision", r.metrics.precision},
                   {"recall", r.metrics.recall},
                   {"f1", r.metrics.f1},
                   {"fpr", r.metrics.fpr},
                   {"balanced_accuracy", r.metrics.balanced_accuracy}});
  }
  return arr;
}

}  // namespace securescan
