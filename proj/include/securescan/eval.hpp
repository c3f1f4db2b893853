#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "securescan/corpus.hpp"

namespace securescan {

/// Positive class is Malicious.
struct ConfusionMatrix {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double fpr = 0.0;
  double balanced_accuracy = 0.0;
  std::optional<double> auc;
  /// Set when any ratio had a zero denominator (that ratio is reported as 0).
  bool degenerate = false;
};

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual);

/// Throws EmptyMatrix when the matrix has no samples.
MetricsReport metrics(const ConfusionMatrix& m);

/// Mann-Whitney statistic: P(s+ > s-) + P(s+ == s-)/2 over all pairs.
double roc_auc(std::span<const double> scores, std::span<const Label> labels);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // predict malicious when score >= threshold
};

/// Starts at (0, 0, +inf) and ends at (1, 1, min score); tied scores share a point.
std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels);

struct CrossValidationReport {
  std::vector<MetricsReport> folds;
  MetricsReport mean;
  MetricsReport stddev;  // sample standard deviation across folds
};

/// Trains on `train` indices and returns predictions (and optionally scores,
/// parallel to `test`) for the `test` indices.
struct FoldPrediction {
  std::vector<Label> predicted;
  std::vector<double> scores;
};
using FoldRunner =
    std::function<FoldPrediction(std::span<const std::size_t> train, std::span<const std::size_t> test)>;

/// Stratified k-fold: every sample is tested exactly once, by a model that
/// never saw it.
CrossValidationReport cross_validate(std::span<const Label> labels, int k, std::uint64_t seed,
                                     const FoldRunner& runner);

MetricsReport summarize_mean(std::span<const MetricsReport> reports);
MetricsReport summarize_stddev(std::span<const MetricsReport> reports);

}  // namespace securescan
