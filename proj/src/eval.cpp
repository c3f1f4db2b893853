#include "securescan/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "securescan/error.hpp"

namespace securescan {
namespace {

double ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

void require_both_classes(std::span<const Label> labels) {
  bool pos = false, neg = false;
  for (auto l : labels) (l == Label::Malicious ? pos : neg) = true;
  if (!pos || !neg) throw Error(ErrorKind::SingleClass, "both classes are required");
}

template <typename Field>
MetricsReport map_fields(Field&& f) {
  MetricsReport r;
  r.accuracy = f(&MetricsReport::accuracy);
  r.precision = f(&MetricsReport::precision);
  r.recall = f(&MetricsReport::recall);
  r.f1 = f(&MetricsReport::f1);
  r.fpr = f(&MetricsReport::fpr);
  r.balanced_accuracy = f(&MetricsReport::balanced_accuracy);
  return r;
}

}  // namespace

ConfusionMatrix confusion(std::span<const Label> predicted, std::span<const Label> actual) {
  if (predicted.size() != actual.size())
    throw Error(ErrorKind::LengthMismatch, "predicted and actual label counts differ");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    bool p = predicted[i] == Label::Malicious;
    bool a = actual[i] == Label::Malicious;
    if (p && a) ++m.tp;
    else if (p) ++m.fp;
    else if (a) ++m.fn;
    else ++m.tn;
  }
  return m;
}

MetricsReport metrics(const ConfusionMatrix& m) {
  if (m.total() == 0) throw Error(ErrorKind::EmptyMatrix, "confusion matrix is empty");
  MetricsReport r;
  bool deg = false;
  r.accuracy = ratio(m.tp + m.tn, m.total(), deg);
  r.precision = ratio(m.tp, m.tp + m.fp, deg);
  r.recall = ratio(m.tp, m.tp + m.fn, deg);
  r.fpr = ratio(m.fp, m.fp + m.tn, deg);
  double specificity = ratio(m.tn, m.tn + m.fp, deg);
  r.balanced_accuracy = (r.recall + specificity) / 2.0;
  if (r.precision + r.recall > 0.0) r.f1 = 2.0 * r.precision * r.recall / (r.precision + r.recall);
  else deg = true;
  r.degenerate = deg;
  return r;
}

double roc_auc(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  require_both_classes(labels);

  // Rank-sum form of the Mann-Whitney statistic with midranks for ties.
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] < scores[b]; });

  double n_pos = 0, n_neg = 0, rank_sum_pos = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    double midrank = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == Label::Malicious) {
        rank_sum_pos += midrank;
        ++n_pos;
      } else {
        ++n_neg;
      }
    }
    i = j;
  }
  double u = rank_sum_pos - n_pos * (n_pos + 1.0) / 2.0;
  return u / (n_pos * n_neg);
}

std::vector<RocPoint> roc_curve(std::span<const double> scores, std::span<const Label> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  require_both_classes(labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  double n_pos = 0, n_neg = 0;
  for (auto l : labels) (l == Label::Malicious ? n_pos : n_neg) += 1;

  std::vector<RocPoint> pts{{0.0, 0.0, std::numeric_limits<double>::infinity()}};
  double tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      (labels[order[j]] == Label::Malicious ? tp : fp) += 1;
      ++j;
    }
    pts.push_back({fp / n_neg, tp / n_pos, scores[order[i]]});
    i = j;
  }
  return pts;
}

MetricsReport summarize_mean(std::span<const MetricsReport> reports) {
  if (reports.empty()) return {};
  const double n = static_cast<double>(reports.size());
  MetricsReport r = map_fields([&](double MetricsReport::*field) {
    double s = 0;
    for (const auto& m : reports) s += m.*field;
    return s / n;
  });
  if (std::all_of(reports.begin(), reports.end(), [](const auto& m) { return m.auc.has_value(); })) {
    double s = 0;
    for (const auto& m : reports) s += *m.auc;
    r.auc = s / n;
  }
  r.degenerate = std::any_of(reports.begin(), reports.end(), [](const auto& m) { return m.degenerate; });
  return r;
}

MetricsReport summarize_stddev(std::span<const MetricsReport> reports) {
  if (reports.size() < 2) return {};
  const MetricsReport mean = summarize_mean(reports);
  const double denom = static_cast<double>(reports.size() - 1);
  MetricsReport r = map_fields([&](double MetricsReport::*field) {
    double s = 0;
    for (const auto& m : reports) s += (m.*field - mean.*field) * (m.*field - mean.*field);
    return std::sqrt(s / denom);
  });
  if (mean.auc) {
    double s = 0;
    for (const auto& m : reports) s += (*m.auc - *mean.auc) * (*m.auc - *mean.auc);
    r.auc = std::sqrt(s / denom);
  }
  return r;
}

CrossValidationReport cross_validate(std::span<const Label> labels, int k, std::uint64_t seed,
                                     const FoldRunner& runner) {
  std::vector<Label> lab(labels.begin(), labels.end());
  std::vector<int> fold = stratified_folds(lab, k, seed);

  CrossValidationReport report;
  for (int f = 0; f < k; ++f) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == f ? test : train).push_back(i);
    FoldPrediction pred = runner(train, test);
    if (pred.predicted.size() != test.size())
      throw Error(ErrorKind::LengthMismatch, "fold runner returned the wrong number of predictions");

    std::vector<Label> actual;
    actual.reserve(test.size());
    for (auto i : test) actual.push_back(labels[i]);
    MetricsReport m = metrics(confusion(pred.predicted, actual));
    if (pred.scores.size() == test.size()) {
      bool pos = std::count(actual.begin(), actual.end(), Label::Malicious) > 0;
      bool neg = std::count(actual.begin(), actual.end(), Label::Benign) > 0;
      if (pos && neg) m.auc = roc_auc(pred.scores, actual);
    }
    report.folds.push_back(m);
  }
  report.mean = summarize_mean(report.folds);
  report.stddev = summarize_stddev(report.folds);
  return report;
}

}  // namespace securescan
