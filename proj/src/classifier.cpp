#include "securescan/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "securescan/error.hpp"
#include "securescan/kernels.hpp"

namespace securescan {
namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_training_inputs(std::span<const SparseVector> x, std::span<const Label> y) {
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "feature rows and labels differ in count");
  if (x.size() < 2) throw Error(ErrorKind::InvalidArgument, "need at least two training samples");
  bool pos = false, neg = false;
  for (auto l : y) (l == Label::Malicious ? pos : neg) = true;
  if (!pos || !neg) throw Error(ErrorKind::SingleClass, "training data needs both classes");
  const auto dim = x.front().dim;
  for (const auto& row : x)
    if (row.dim != dim) throw Error(ErrorKind::DimensionMismatch, "feature rows differ in dimension");
}

}  // namespace

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

LogisticObjective::LogisticObjective(std::span<const SparseVector> x, std::span<const Label> y, double c)
    : x_(x), c_(c), dim_(x.empty() ? 0 : x.front().dim), margins_(x.size()) {
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "C must be positive");
  if (x.size() != y.size()) throw Error(ErrorKind::LengthMismatch, "feature rows and labels differ in count");
  y_.reserve(y.size());
  for (auto l : y) y_.push_back(l == Label::Malicious ? 1.0 : 0.0);
}

double LogisticObjective::loss_at(std::span<const double> params) {
  const double* w = params.data();
  const double b = params[dim_];
  const auto& k = kernels::active();
  double total = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const auto& row = x_[i];
    double z = k.sparse_dot(w, row.indices.data(), row.values.data(), row.nnz()) + b;
    margins_[i] = z;
    // -[y log s(z) + (1-y) log(1 - s(z))] = softplus(z) - y z
    total += softplus(z) - y_[i] * z;
  }
  const double n = static_cast<double>(x_.size());
  return total / n + k.sum_squares(w, dim_) / (2.0 * c_ * n);
}

double LogisticObjective::value(std::span<const double> params) { return loss_at(params); }

double LogisticObjective::value_and_gradient(std::span<const double> params, std::span<double> grad) {
  const double f = loss_at(params);
  const double n = static_cast<double>(x_.size());
  std::fill(grad.begin(), grad.end(), 0.0);
  double gb = 0.0;
  for (std::size_t i = 0; i < x_.size(); ++i) {
    const double r = sigmoid(margins_[i]) - y_[i];
    const auto& row = x_[i];
    for (std::size_t k = 0; k < row.nnz(); ++k) grad[row.indices[k]] += r * row.values[k];
    gb += r;
  }
  const double inv_n = 1.0 / n;
  const double reg = 1.0 / (c_ * n);
  for (std::size_t j = 0; j < dim_; ++j) grad[j] = grad[j] * inv_n + reg * params[j];
  grad[dim_] = gb * inv_n;
  return f;
}

TrainResult train(std::span<const SparseVector> x, std::span<const Label> y, double c, const TrainOptions& opts) {
  check_training_inputs(x, y);
  LogisticObjective objective(x, y, c);
  OptimizerResult opt = minimize(objective, std::vector<double>(objective.dimension(), 0.0), opts.optimizer);

  TrainResult r;
  r.model.c = c;
  r.model.bias = opt.x.back();
  opt.x.pop_back();
  r.model.weights = std::move(opt.x);
  r.loss_history = std::move(opt.loss_history);
  r.iterations = opt.iterations;
  r.converged = opt.converged;
  return r;
}

double predict_score(const ModelParams& m, const SparseVector& x) {
  if (x.dim != m.weights.size())
    throw Error(ErrorKind::DimensionMismatch, "vector dimension " + std::to_string(x.dim) + " vs model " +
                                                  std::to_string(m.weights.size()));
  return kernels::sparse_dot(m.weights, x.indices, x.values) + m.bias;
}

Probability probability_from_score(const ModelParams& m, double score) {
  if (m.calibration) return {sigmoid(m.calibration->a * score + m.calibration->b), true};
  return {sigmoid(score), false};
}

Probability predict_proba(const ModelParams& m, const SparseVector& x) {
  return probability_from_score(m, predict_score(m, x));
}

PlattObjective::PlattObjective(std::span<const double> scores, std::span<const Label> labels) : scores_(scores) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in count");
  double n_pos = 0, n_neg = 0;
  for (auto l : labels) (l == Label::Malicious ? n_pos : n_neg) += 1;
  if (n_pos == 0 || n_neg == 0) throw Error(ErrorKind::SingleClass, "calibration needs both classes");
  t_pos_ = (n_pos + 1.0) / (n_pos + 2.0);
  t_neg_ = 1.0 / (n_neg + 2.0);
  targets_.reserve(labels.size());
  for (auto l : labels) targets_.push_back(l == Label::Malicious ? t_pos_ : t_neg_);
}

double PlattObjective::value(std::span<const double> ab) {
  double total = 0.0;
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    double z = ab[0] * scores_[i] + ab[1];
    total += softplus(z) - targets_[i] * z;
  }
  return total / static_cast<double>(scores_.size());
}

double PlattObjective::value_and_gradient(std::span<const double> ab, std::span<double> grad) {
  double total = 0.0, ga = 0.0, gb = 0.0;
  for (std::size_t i = 0; i < scores_.size(); ++i) {
    double z = ab[0] * scores_[i] + ab[1];
    total += softplus(z) - targets_[i] * z;
    double r = sigmoid(z) - targets_[i];
    ga += r * scores_[i];
    gb += r;
  }
  const double n = static_cast<double>(scores_.size());
  grad[0] = ga / n;
  grad[1] = gb / n;
  return total / n;
}

Calibration fit_calibration(std::span<const double> scores, std::span<const Label> labels,
                            const OptimizerOptions& opts) {
  PlattObjective objective(scores, labels);
  OptimizerResult r = minimize(objective, {1.0, 0.0}, opts);
  return {r.x[0], r.x[1]};
}

GridSearchResult grid_search(std::span<const SparseVector> x, std::span<const Label> y,
                             const HyperparamGrid& grid, const TrainOptions& opts) {
  if (grid.c_values.empty()) throw Error(ErrorKind::InvalidArgument, "empty C grid");
  for (double c : grid.c_values)
    if (!(c > 0.0)) throw Error(ErrorKind::InvalidArgument, "C values must be positive");
  check_training_inputs(x, y);

  GridSearchResult result;
  std::vector<Label> labels(y.begin(), y.end());
  result.fold_of = stratified_folds(labels, grid.folds, grid.seed);

  std::vector<std::vector<double>> oof_per_c;
  for (double c : grid.c_values) {
    GridRow row;
    row.c = c;
    std::vector<double> oof(x.size(), 0.0);
    for (int f = 0; f < grid.folds; ++f) {
      std::vector<SparseVector> tx;
      std::vector<Label> ty;
      std::vector<std::size_t> held;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (result.fold_of[i] == f) {
          held.push_back(i);
        } else {
          tx.push_back(x[i]);
          ty.push_back(y[i]);
        }
      }
      ModelParams m = train(tx, ty, c, opts).model;
      std::vector<Label> pred, actual;
      for (auto i : held) {
        oof[i] = predict_score(m, x[i]);
        pred.push_back(oof[i] >= 0.0 ? Label::Malicious : Label::Benign);
        actual.push_back(y[i]);
      }
      row.fold_metrics.push_back(metrics(confusion(pred, actual)));
    }
    MetricsReport mean = summarize_mean(row.fold_metrics);
    row.mean_f1 = mean.f1;
    row.mean_balanced_accuracy = mean.balanced_accuracy;
    result.table.push_back(std::move(row));
    oof_per_c.push_back(std::move(oof));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.table.size(); ++i) {
    const auto& a = result.table[i];
    const auto& b = result.table[best];
    bool better = a.mean_f1 != b.mean_f1 ? a.mean_f1 > b.mean_f1
                  : a.mean_balanced_accuracy != b.mean_balanced_accuracy
                      ? a.mean_balanced_accuracy > b.mean_balanced_accuracy
                      : a.c < b.c;
    if (better) best = i;
  }
  result.best_c = result.table[best].c;
  result.oof_scores = std::move(oof_per_c[best]);
  return result;
}

Explanation explain(const ModelParams& m, const Vectorizer& v, std::string_view text, std::size_t k) {
  SparseVector x = v.transform(text);
  if (x.dim != m.weights.size()) throw Error(ErrorKind::DimensionMismatch, "vectorizer and model disagree");
  std::vector<TermContribution> all;
  all.reserve(x.nnz());
  for (std::size_t i = 0; i < x.nnz(); ++i)
    all.push_back({v.terms()[x.indices[i]], m.weights[x.indices[i]] * x.values[i]});

  Explanation e;
  std::vector<TermContribution> pos, neg;
  for (auto& t : all) {
    if (t.contribution > 0) pos.push_back(t);
    else if (t.contribution < 0) neg.push_back(t);
  }
  auto by_desc = [](const auto& a, const auto& b) {
    return a.contribution != b.contribution ? a.contribution > b.contribution : a.term < b.term;
  };
  auto by_asc = [](const auto& a, const auto& b) {
    return a.contribution != b.contribution ? a.contribution < b.contribution : a.term < b.term;
  };
  std::sort(pos.begin(), pos.end(), by_desc);
  std::sort(neg.begin(), neg.end(), by_asc);
  pos.resize(std::min(k, pos.size()));
  neg.resize(std::min(k, neg.size()));
  e.top_positive = std::move(pos);
  e.top_negative = std::move(neg);
  return e;
}

}  // namespace securescan
