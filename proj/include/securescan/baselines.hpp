#pragma once

#include <string>
#include <vector>

#include "securescan/eval.hpp"
#include "securescan/pipeline.hpp"

namespace securescan {

struct BaselineRow {
  std::string name;
  ConfusionMatrix confusion;
  MetricsReport metrics;
};

/// Rows in order: heuristic_only, intel_only, model_only, hybrid.
struct BaselineTable {
  std::vector<BaselineRow> rows;

  const BaselineRow& row(std::string_view name) const;
};

/// Scores every configuration on the same samples.
///  - heuristic_only: Reject -> malicious, Pass -> benign
///  - intel_only: malicious_engines >= K -> malicious (lookup failures -> benign)
///  - model_only: Layers 1-2 with no intel; gray zone stays Suspicious
///  - hybrid: full pipeline
/// Suspicious counts as malicious. `intel` may be null, in which case the
/// intel_only row flags nothing and hybrid equals model_only.
BaselineTable compare_baselines(const std::vector<LabeledSample>& samples,
                                std::shared_ptr<const ModelBundle> bundle, const AppConfig& config,
                                std::shared_ptr<IntelClient> intel);

/// Human-readable comparison laid out metric-by-row, configuration-by-column.
std::string format_baseline_table(const BaselineTable& t);
nlohmann::json baseline_table_json(const BaselineTable& t);

}  // namespace securescan
