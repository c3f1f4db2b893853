#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "securescan/classifier.hpp"
#include "securescan/error.hpp"

using namespace securescan;

namespace {

struct Problem {
  std::vector<SparseVector> x;
  std::vector<Label> y;
};

Problem random_problem(std::mt19937_64& rng, std::uint32_t dim, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Problem p;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> dense(dim, 0.0);
    for (auto& v : dense)
      if (rng() % 3 == 0) v = g(rng);
    p.x.push_back(SparseVector::from_dense(dense));
    p.x.back().dim = dim;
    p.y.push_back(i % 2 ? Label::Malicious : Label::Benign);
  }
  std::shuffle(p.y.begin(), p.y.end(), rng);
  return p;
}

double logloss(std::span<const double> p, std::span<const Label> y) {
  double s = 0;
  for (std::size_t i = 0; i < p.size(); ++i) s -= y[i] == Label::Malicious ? std::log(p[i]) : std::log1p(-p[i]);
  return s / p.size();
}

}  // namespace

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 40; ++trial) {
    auto dim = static_cast<std::uint32_t>(1 + rng() % 20);
    auto p = random_problem(rng, dim, 4 + rng() % 30);
    double c = std::pow(10.0, -2.0 + (rng() % 500) / 100.0);
    LogisticObjective f(p.x, p.y, c);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> params(f.dimension());
    for (auto& v : params) v = g(rng);
    std::vector<double> grad(params.size());
    const double value = f.value_and_gradient(params, grad);
    CHECK(value == f.value(params));

    double err = 0, scale = 0;
    for (std::size_t j = 0; j < params.size(); ++j) {
      auto up = params, dn = params;
      up[j] += 1e-5;
      dn[j] -= 1e-5;
      double fd = (f.value(up) - f.value(dn)) / 2e-5;
      err = std::max(err, std::fabs(fd - grad[j]));
      scale = std::max({scale, std::fabs(fd), std::fabs(grad[j])});
    }
    CHECK(err / std::max(scale, 1e-6) < 1e-5);
  }
}

TEST_CASE("training basics") {
  SUBCASE("separable 1-D points") {
    std::vector<SparseVector> x{{1, {0}, {-1.0}}, {1, {0}, {1.0}}};
    std::vector<Label> y{Label::Benign, Label::Malicious};
    auto r = train(x, y, 100.0);
    CHECK(predict_score(r.model, x[0]) < 0);
    CHECK(predict_score(r.model, x[1]) > 0);
  }
  SUBCASE("all-zero features learn the class prior") {
    std::vector<SparseVector> x(10, SparseVector{4, {}, {}});
    std::vector<Label> y(10, Label::Benign);
    y[0] = y[3] = y[7] = Label::Malicious;
    auto r = train(x, y, 1.0);
    for (double w : r.model.weights) CHECK(w == 0.0);
    CHECK(r.model.bias == doctest::Approx(std::log(3.0 / 7.0)).epsilon(1e-5));
    CHECK(r.converged);
  }
  SUBCASE("zero model predicts one half") {
    ModelParams m;
    m.weights.assign(3, 0.0);
    CHECK(predict_proba(m, {3, {1}, {0.7}}).p == 0.5);
    CHECK_FALSE(predict_proba(m, {3, {1}, {0.7}}).calibrated);
  }
  SUBCASE("loss history never increases") {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 10; ++t) {
      auto p = random_problem(rng, 15, 60);
      auto r = train(p.x, p.y, 10.0);
      REQUIRE(!r.loss_history.empty());
      for (std::size_t i = 1; i < r.loss_history.size(); ++i) CHECK(r.loss_history[i] <= r.loss_history[i - 1]);
    }
  }
  SUBCASE("errors") {
    std::vector<SparseVector> x{{2, {0}, {1.0}}, {2, {1}, {1.0}}};
    std::vector<Label> same{Label::Benign, Label::Benign};
    CHECK_THROWS_AS(train(x, same, 1.0), Error);
    std::vector<Label> one{Label::Benign};
    CHECK_THROWS_AS(train(x, one, 1.0), Error);
    std::vector<SparseVector> mixed{{2, {0}, {1.0}}, {3, {1}, {1.0}}};
    std::vector<Label> both{Label::Benign, Label::Malicious};
    CHECK_THROWS_AS(train(mixed, both, 1.0), Error);
  }
}

TEST_CASE("predict_score") {
  ModelParams m;
  m.weights = {0.5, -2.0, 3.0, 0.25};
  m.bias = -0.1;
  CHECK(predict_score(m, {4, {}, {}}) == -0.1);
  CHECK(predict_score(m, {4, {2}, {1.0}}) == 3.0 - 0.1);
  SparseVector x{4, {0, 1, 3}, {2.0, 0.5, -4.0}};
  double dense = 0.5 * 2.0 + -2.0 * 0.5 + 0.25 * -4.0 - 0.1;
  CHECK(predict_score(m, x) == doctest::Approx(dense).epsilon(1e-15));
  try {
    predict_score(m, {5, {0}, {1.0}});
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("predict_proba with calibration") {
  ModelParams m;
  m.calibration = Calibration{1.0, 0.0};
  CHECK(probability_from_score(m, 0.0).p == 0.5);
  CHECK(probability_from_score(m, std::log(3.0)).p == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(probability_from_score(m, 0.0).calibrated);
  m.calibration = Calibration{0.7, -0.3};
  double prev = -1;
  for (double s = -5; s <= 5; s += 0.25) {
    double p = probability_from_score(m, s).p;
    CHECK(p > prev);
    prev = p;
  }
  CHECK(sigmoid(-800) >= 0.0);
  CHECK(sigmoid(800) == 1.0);
}

TEST_CASE("Platt calibration") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g(0.0, 2.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);

  SUBCASE("scores that are already true logits") {
    std::vector<double> s;
    std::vector<Label> y;
    for (int i = 0; i < 40000; ++i) {
      s.push_back(g(rng));
      y.push_back(u(rng) < sigmoid(s.back()) ? Label::Malicious : Label::Benign);
    }
    auto cal = fit_calibration(s, y);
    CHECK(cal.a == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::fabs(cal.b) < 0.05);
  }
  SUBCASE("labels independent of scores") {
    std::vector<double> s;
    std::vector<Label> y;
    std::size_t pos = 0;
    for (int i = 0; i < 20000; ++i) {
      s.push_back(g(rng));
      y.push_back(u(rng) < 0.3 ? Label::Malicious : Label::Benign);
      pos += y.back() == Label::Malicious;
    }
    auto cal = fit_calibration(s, y);
    CHECK(std::fabs(cal.a) < 0.03);
    double prior = double(pos) / y.size();
    CHECK(sigmoid(cal.b) == doctest::Approx(prior).epsilon(0.02));
  }
  SUBCASE("symmetric scores give zero intercept") {
    std::vector<double> s;
    std::vector<Label> y;
    for (int i = 0; i < 500; ++i) {
      double v = g(rng);
      Label l = u(rng) < sigmoid(v) ? Label::Malicious : Label::Benign;
      s.push_back(v);
      y.push_back(l);
      s.push_back(-v);
      y.push_back(l == Label::Malicious ? Label::Benign : Label::Malicious);
    }
    auto cal = fit_calibration(s, y);
    CHECK(std::fabs(cal.b) < 1e-5);
    CHECK(cal.a > 0);
  }
  SUBCASE("smoothed targets and dominance over the identity map") {
    std::vector<double> s{-2, -1, 0.5, 3, 1, -0.5};
    std::vector<Label> y{Label::Benign, Label::Benign, Label::Malicious, Label::Malicious, Label::Benign,
                         Label::Malicious};
    PlattObjective obj(s, y);
    CHECK(obj.positive_target() == doctest::Approx(4.0 / 5.0));
    CHECK(obj.negative_target() == doctest::Approx(1.0 / 5.0));
    auto cal = fit_calibration(s, y);
    std::vector<double> fitted{cal.a, cal.b}, identity{1.0, 0.0};
    CHECK(obj.value(fitted) <= obj.value(identity));
  }
  SUBCASE("single class is rejected") {
    std::vector<double> s{1, 2};
    std::vector<Label> y{Label::Malicious, Label::Malicious};
    CHECK_THROWS_AS(fit_calibration(s, y), Error);
  }
}

TEST_CASE("grid search") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g(0.0, 1.0);
  Problem p;
  for (int i = 0; i < 120; ++i) {
    bool mal = i % 3 == 0;
    std::vector<double> dense(6);
    for (auto& v : dense) v = g(rng) * 0.8;
    dense[0] += mal ? 1.0 : -1.0;
    dense[1] += mal ? 0.5 : -0.5;
    p.x.push_back(SparseVector::from_dense(dense));
    p.x.back().dim = 6;
    p.y.push_back(mal ? Label::Malicious : Label::Benign);
  }

  auto single = grid_search(p.x, p.y, {{0.3}, 5, 1});
  CHECK(single.best_c == 0.3);
  CHECK(single.oof_scores.size() == p.x.size());

  auto full = grid_search(p.x, p.y, {{0.01, 0.1, 1.0, 10.0}, 10, 42});
  REQUIRE(full.table.size() == 4);
  double best_f1 = 0;
  for (const auto& row : full.table) {
    REQUIRE(row.fold_metrics.size() == 10);
    double f1 = 0, ba = 0;
    for (const auto& m : row.fold_metrics) {
      f1 += m.f1;
      ba += m.balanced_accuracy;
    }
    CHECK(row.mean_f1 == doctest::Approx(f1 / 10).epsilon(1e-12));
    CHECK(row.mean_balanced_accuracy == doctest::Approx(ba / 10).epsilon(1e-12));
    best_f1 = std::max(best_f1, row.mean_f1);
  }
  const GridRow* chosen = nullptr;
  for (const auto& row : full.table)
    if (row.c == full.best_c) chosen = &row;
  REQUIRE(chosen);
  CHECK(chosen->mean_f1 == best_f1);

  // every fold id is in range and the OOF scores come from the selected C
  for (int f : full.fold_of) CHECK((f >= 0 && f < 10));

  // separable data: every C scores perfectly, so the smaller one wins the tie
  Problem easy;
  for (int i = 0; i < 40; ++i) {
    bool mal = i % 2;
    easy.x.push_back({2, {static_cast<std::uint32_t>(mal ? 0 : 1)}, {1.0}});
    easy.y.push_back(mal ? Label::Malicious : Label::Benign);
  }
  auto tie = grid_search(easy.x, easy.y, {{5.0, 1.0}, 4, 2});
  CHECK(tie.table[0].mean_f1 == tie.table[1].mean_f1);
  CHECK(tie.best_c == 1.0);
}

TEST_CASE("explanations add up to the decision score") {
  std::vector<std::string> docs{"login.secure-bank.zip", "news.example.org/world", "paypal-verify.work/x.php",
                                "docs.example.com/guide"};
  auto v = Vectorizer::fit(docs);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  ModelParams m;
  m.weights.resize(v.size());
  for (auto& w : m.weights) w = g(rng);
  m.bias = 0.37;

  for (const auto& text : {std::string("login.example.org"), std::string("paypal.zip/world"), docs[0]}) {
    auto ex = explain(m, v, text, 1'000'000);
    double sum = m.bias;
    for (const auto& t : ex.top_positive) sum += t.contribution;
    for (const auto& t : ex.top_negative) sum += t.contribution;
    CHECK(std::fabs(sum - predict_score(m, v.transform(text))) < 1e-9);
    for (std::size_t i = 1; i < ex.top_positive.size(); ++i)
      CHECK(ex.top_positive[i - 1].contribution >= ex.top_positive[i].contribution);
    for (std::size_t i = 1; i < ex.top_negative.size(); ++i)
      CHECK(ex.top_negative[i - 1].contribution <= ex.top_negative[i].contribution);

    auto top2 = explain(m, v, text, 2);
    CHECK(top2.top_positive.size() <= 2);
    CHECK(top2.top_negative.size() <= 2);
  }

  std::vector<std::string> tiny{"abc"};
  auto tv = Vectorizer::fit(tiny, {3, 3, 10});
  ModelParams tm;
  tm.weights = {2.5};
  auto one = explain(tm, tv, "abc", 5);
  REQUIRE(one.top_positive.size() == 1);
  CHECK(one.top_positive[0].term == "abc");
  CHECK(one.top_positive[0].contribution == 2.5);
  CHECK(one.top_negative.empty());
  CHECK(explain(tm, tv, "zzzz", 5).top_positive.empty());
}
