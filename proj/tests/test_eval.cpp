#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "securescan/error.hpp"
#include "securescan/eval.hpp"

using namespace securescan;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<Label>& y) {
  double wins = 0, pairs = 0;
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = 0; j < s.size(); ++j)
      if (y[i] == Label::Malicious && y[j] == Label::Benign) {
        pairs += 1;
        wins += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
      }
  return wins / pairs;
}

}  // namespace

TEST_CASE("confusion matrix") {
  std::vector<Label> y{Label::Malicious, Label::Benign, Label::Malicious, Label::Benign, Label::Benign,
                       Label::Malicious};
  std::vector<Label> p{Label::Malicious, Label::Malicious, Label::Benign, Label::Benign, Label::Benign,
                       Label::Malicious};
  CHECK(confusion(p, y) == ConfusionMatrix{2, 1, 2, 1});
  CHECK(confusion(y, y) == ConfusionMatrix{3, 0, 3, 0});
  std::vector<Label> ones(5, Label::Malicious), zeros(5, Label::Benign);
  CHECK(confusion(zeros, ones) == ConfusionMatrix{0, 0, 0, 5});
  std::vector<Label> short_p(2, Label::Benign);
  CHECK_THROWS_AS(confusion(short_p, y), Error);
}

TEST_CASE("metrics on a large confusion matrix") {
  ConfusionMatrix m{32229, 1444, 62772, 1234};
  auto r = metrics(m);
  // exact fractions
  CHECK(std::fabs(r.accuracy - 95001.0 / 97679.0) < 1e-15);
  CHECK(std::fabs(r.precision - 32229.0 / 33673.0) < 1e-15);
  CHECK(std::fabs(r.recall - 32229.0 / 33463.0) < 1e-15);
  CHECK(std::fabs(r.fpr - 1444.0 / 64216.0) < 1e-15);
  CHECK(std::fabs(r.f1 - 2.0 * 32229.0 / (2.0 * 32229.0 + 1444.0 + 1234.0)) < 1e-15);
  CHECK(std::fabs(r.accuracy - 0.972584) < 1e-5);
  CHECK(std::fabs(r.precision - 0.957117) < 1e-5);
  CHECK(std::fabs(r.recall - 0.963123) < 1e-5);
  CHECK(std::fabs(r.f1 - 0.960110) < 1e-5);
  CHECK(std::fabs(r.fpr - 0.022487) < 1e-5);
  CHECK_FALSE(r.degenerate);
}

TEST_CASE("metric edge cases") {
  auto perfect = metrics({5, 0, 7, 0});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.recall == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.fpr == 0.0);
  CHECK(perfect.balanced_accuracy == 1.0);

  auto none = metrics({0, 0, 4, 3});
  CHECK(none.precision == 0.0);
  CHECK(none.degenerate);
  CHECK_THROWS_AS(metrics({0, 0, 0, 0}), Error);

  std::mt19937_64 rng(5);
  for (int t = 0; t < 500; ++t) {
    ConfusionMatrix m{rng() % 50, rng() % 50, rng() % 50, rng() % 50};
    if (m.total() == 0) continue;
    auto r = metrics(m);
    if (r.precision + r.recall > 0)
      CHECK(std::fabs(r.f1 - 2 * r.precision * r.recall / (r.precision + r.recall)) < 1e-12);
  }
}

TEST_CASE("metrics are invariant under joint permutation") {
  std::mt19937_64 rng(6);
  std::vector<Label> p(300), y(300);
  for (std::size_t i = 0; i < 300; ++i) {
    p[i] = rng() % 2 ? Label::Malicious : Label::Benign;
    y[i] = rng() % 3 ? Label::Malicious : Label::Benign;
  }
  auto base = confusion(p, y);
  std::vector<std::size_t> order(300);
  std::iota(order.begin(), order.end(), 0);
  for (int t = 0; t < 20; ++t) {
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<Label> pp, yy;
    for (auto i : order) {
      pp.push_back(p[i]);
      yy.push_back(y[i]);
    }
    CHECK(confusion(pp, yy) == base);
  }
}

TEST_CASE("ROC AUC") {
  std::vector<double> s{0.1, 0.4, 0.35, 0.8};
  std::vector<Label> y{Label::Benign, Label::Malicious, Label::Benign, Label::Malicious};
  CHECK(roc_auc(s, y) == brute_auc(s, y));
  CHECK(roc_auc(s, y) == 1.0);

  std::mt19937_64 rng(10);
  for (int t = 0; t < 100; ++t) {
    std::size_t n = 2 + rng() % 40;
    std::vector<double> sc(n);
    std::vector<Label> lab(n);
    for (std::size_t i = 0; i < n; ++i) {
      sc[i] = (rng() % 7) / 7.0;  // plenty of ties
      lab[i] = i % 2 ? Label::Malicious : Label::Benign;
    }
    CHECK(std::fabs(roc_auc(sc, lab) - brute_auc(sc, lab)) < 1e-12);
    // strictly increasing transform
    std::vector<double> tr(n);
    std::transform(sc.begin(), sc.end(), tr.begin(), [](double v) { return std::exp(3 * v) - 7; });
    CHECK(roc_auc(tr, lab) == roc_auc(sc, lab));
  }

  std::uniform_real_distribution<double> u;
  std::vector<double> noise(2000);
  std::vector<Label> coin(2000);
  for (std::size_t i = 0; i < 2000; ++i) {
    noise[i] = u(rng);
    coin[i] = rng() % 2 ? Label::Malicious : Label::Benign;
  }
  CHECK(std::fabs(roc_auc(noise, coin) - 0.5) < 0.05);

  std::vector<Label> single(4, Label::Benign);
  CHECK_THROWS_AS(roc_auc(s, single), Error);
}

TEST_CASE("ROC curve") {
  std::vector<double> s{0.9, 0.8, 0.8, 0.3, 0.1};
  std::vector<Label> y{Label::Malicious, Label::Malicious, Label::Benign, Label::Malicious, Label::Benign};
  auto roc = roc_curve(s, y);
  REQUIRE(roc.size() == 5);
  CHECK(roc.front().fpr == 0.0);
  CHECK(roc.front().tpr == 0.0);
  CHECK(std::isinf(roc.front().threshold));
  CHECK(roc.back().fpr == 1.0);
  CHECK(roc.back().tpr == 1.0);
  CHECK(roc.back().threshold == 0.1);
  CHECK(roc[2].threshold == 0.8);
  CHECK(roc[2].tpr == doctest::Approx(2.0 / 3.0));
  CHECK(roc[2].fpr == doctest::Approx(0.5));
  // trapezoid area equals the rank statistic
  double area = 0;
  for (std::size_t i = 1; i < roc.size(); ++i)
    area += (roc[i].fpr - roc[i - 1].fpr) * (roc[i].tpr + roc[i - 1].tpr) / 2;
  CHECK(area == doctest::Approx(roc_auc(s, y)).epsilon(1e-12));
}

TEST_CASE("cross validation") {
  // mirror-symmetric corpus: sample i and its mirror share a fold pattern
  std::vector<Label> labels;
  for (int i = 0; i < 40; ++i) labels.push_back(i % 2 ? Label::Malicious : Label::Benign);

  std::vector<int> tested(labels.size(), 0);
  auto constant = [&](std::span<const std::size_t> train, std::span<const std::size_t> test) {
    for (auto i : test) {
      tested[i]++;
      CHECK(std::find(train.begin(), train.end(), i) == train.end());
    }
    CHECK(train.size() + test.size() == labels.size());
    return FoldPrediction{std::vector<Label>(test.size(), Label::Benign), {}};
  };
  auto rep = cross_validate(labels, 5, 42, constant);
  CHECK(rep.folds.size() == 5);
  for (int t : tested) CHECK(t == 1);
  for (const auto& f : rep.folds) CHECK(f.accuracy == doctest::Approx(0.5));

  double mean = 0;
  for (const auto& f : rep.folds) mean += f.accuracy;
  CHECK(std::fabs(rep.mean.accuracy - mean / 5) < 1e-12);
  CHECK(rep.stddev.accuracy == doctest::Approx(0.0));

  // k = 2 on a symmetric problem: an oracle runner gives matching folds
  auto oracle = [&](std::span<const std::size_t>, std::span<const std::size_t> test) {
    FoldPrediction fp;
    for (auto i : test) fp.predicted.push_back(labels[i]);
    return fp;
  };
  auto two = cross_validate(labels, 2, 1, oracle);
  REQUIRE(two.folds.size() == 2);
  CHECK(two.folds[0].f1 == two.folds[1].f1);
  CHECK(two.mean.accuracy == 1.0);

  std::vector<MetricsReport> r(3);
  r[0].accuracy = 0.5;
  r[1].accuracy = 0.7;
  r[2].accuracy = 0.9;
  CHECK(summarize_mean(r).accuracy == doctest::Approx(0.7));
  CHECK(summarize_stddev(r).accuracy == doctest::Approx(0.2));

  std::vector<Label> one_class(10, Label::Benign);
  CHECK_THROWS_AS(cross_validate(one_class, 2, 1, oracle), Error);
}
