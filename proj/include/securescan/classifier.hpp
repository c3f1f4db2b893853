#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "securescan/corpus.hpp"
#include "securescan/eval.hpp"
#include "securescan/features.hpp"
#include "securescan/optimizer.hpp"

namespace securescan {

struct Calibration {
  double a = 1.0;  // slope on the raw decision score
  double b = 0.0;

  bool operator==(const Calibration&) const = default;
};

struct ModelParams {
  std::vector<double> weights;
  double bias = 0.0;
  double c = 1.0;  // inverse regularization strength
  std::optional<Calibration> calibration;

  std::size_t dim() const { return weights.size(); }
  bool operator==(const ModelParams&) const = default;
};

double sigmoid(double z);

/// Mean logistic loss plus ||w||^2 / (2 C n); the bias is not penalized.
/// Parameters are laid out as [w_0 .. w_{d-1}, b].
class LogisticObjective final : public Objective {
 public:
  LogisticObjective(std::span<const SparseVector> x, std::span<const Label> y, double c);

  std::size_t dimension() const override { return dim_ + 1; }
  double value(std::span<const double> params) override;
  double value_and_gradient(std::span<const double> params, std::span<double> grad) override;

 private:
  double loss_at(std::span<const double> params);

  std::span<const SparseVector> x_;
  std::vector<double> y_;
  double c_;
  std::size_t dim_;
  std::vector<double> margins_;
};

struct TrainOptions {
  OptimizerOptions optimizer{};
};

struct TrainResult {
  ModelParams model;  // uncalibrated
  std::vector<double> loss_history;
  int iterations = 0;
  bool converged = false;
};

/// Throws SingleClass, DimensionMismatch, LengthMismatch, InvalidArgument.
TrainResult train(std::span<const SparseVector> x, std::span<const Label> y, double c,
                  const TrainOptions& opts = {});

/// w . x + b
double predict_score(const ModelParams& m, const SparseVector& x);

struct Probability {
  double p = 0.5;
  bool calibrated = false;
};

/// sigma(A (w . x + b) + B) when calibrated, plain sigma(w . x + b) otherwise.
Probability predict_proba(const ModelParams& m, const SparseVector& x);
Probability probability_from_score(const ModelParams& m, double score);

/// Soft-target Platt objective over (A, B).
class PlattObjective final : public Objective {
 public:
  PlattObjective(std::span<const double> scores, std::span<const Label> labels);

  std::size_t dimension() const override { return 2; }
  double value(std::span<const double> ab) override;
  double value_and_gradient(std::span<const double> ab, std::span<double> grad) override;

  double positive_target() const { return t_pos_; }
  double negative_target() const { return t_neg_; }

 private:
  std::span<const double> scores_;
  std::vector<double> targets_;
  double t_pos_ = 1.0;
  double t_neg_ = 0.0;
};

/// Scores must be out-of-fold. Optimization starts from (A, B) = (1, 0).
Calibration fit_calibration(std::span<const double> scores, std::span<const Label> labels,
                            const OptimizerOptions& opts = {});

struct HyperparamGrid {
  std::vector<double> c_values{0.01, 0.1, 1.0, 10.0};
  int folds = 10;
  std::uint64_t seed = 42;
};

struct GridRow {
  double c = 0.0;
  std::vector<MetricsReport> fold_metrics;
  double mean_f1 = 0.0;
  double mean_balanced_accuracy = 0.0;
};

struct GridSearchResult {
  double best_c = 0.0;
  std::vector<GridRow> table;
  /// Out-of-fold decision scores for the selected C, in input order.
  std::vector<double> oof_scores;
  std::vector<int> fold_of;
};

/// k-fold CV per C value; picks the highest mean F1, then the higher mean
/// balanced accuracy, then the smaller C. Fold predictions use sigma(score) >= 0.5.
GridSearchResult grid_search(std::span<const SparseVector> x, std::span<const Label> y,
                             const HyperparamGrid& grid, const TrainOptions& opts = {});

struct TermContribution {
  std::string term;
  double contribution = 0.0;
};

struct Explanation {
  std::vector<TermContribution> top_positive;  // descending
  std::vector<TermContribution> top_negative;  // ascending
};

Explanation explain(const ModelParams& m, const Vectorizer& v, std::string_view text, std::size_t k);

}  // namespace securescan
