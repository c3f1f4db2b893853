#include <doctest.h>

#include <random>

#include "securescan/decision.hpp"
#include "securescan/error.hpp"

using namespace securescan;

namespace {

IntelReport report(std::uint32_t malicious, std::vector<std::string> tags = {}) {
  IntelReport r;
  r.malicious_engines = malicious;
  r.harmless_engines = 60;
  r.tags = std::move(tags);
  r.source = "fixtures";
  return r;
}

}  // namespace

TEST_CASE("threshold table") {
  ThresholdPolicy p;
  CHECK(map_threshold(0.70, p) == ThresholdOutcome::Malicious);
  CHECK(map_threshold(0.45, p) == ThresholdOutcome::Benign);
  CHECK(map_threshold(0.50, p) == ThresholdOutcome::GrayZone);
  CHECK(map_threshold(0.57, p) == ThresholdOutcome::GrayZone);
  CHECK(map_threshold(0.60, p) == ThresholdOutcome::Malicious);
  CHECK(map_threshold(0.0, p) == ThresholdOutcome::Benign);
  CHECK(map_threshold(1.0, p) == ThresholdOutcome::Malicious);
  CHECK(map_threshold(std::nextafter(0.45, 1.0), p) == ThresholdOutcome::GrayZone);
  CHECK(map_threshold(std::nextafter(0.60, 0.0), p) == ThresholdOutcome::GrayZone);
  CHECK_THROWS_AS(map_threshold(1.5, p), Error);
}

TEST_CASE("policy validation") {
  CHECK_NOTHROW(ThresholdPolicy{}.validate());
  CHECK_NOTHROW((ThresholdPolicy{0.5, 0.5, 0.5}.validate()));
  for (auto bad : {ThresholdPolicy{0.6, 0.55, 0.7}, ThresholdPolicy{0.0, 0.5, 0.6}, ThresholdPolicy{0.4, 0.5, 1.0},
                   ThresholdPolicy{0.4, 0.7, 0.6}}) {
    try {
      bad.validate();
      FAIL("expected InvalidPolicy");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidPolicy);
    }
  }
}

TEST_CASE("partition and monotonicity over a dense sweep") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 0.98);
  for (int t = 0; t < 200; ++t) {
    double a = u(rng), b = u(rng), c = u(rng);
    std::array<double, 3> th{a, b, c};
    std::sort(th.begin(), th.end());
    ThresholdPolicy p{th[0], th[1], th[2]};
    int prev = -1;
    for (int i = 0; i <= 1000; ++i) {
      double prob = i / 1000.0;
      auto o = map_threshold(prob, p);
      int rank = o == ThresholdOutcome::Benign ? 0 : o == ThresholdOutcome::GrayZone ? 1 : 2;
      CHECK(rank >= prev);
      prev = rank;
      CHECK((o == ThresholdOutcome::Benign) == (prob <= p.t_benign));
      CHECK((o == ThresholdOutcome::Malicious) == (prob >= p.t_malicious && prob > p.t_benign));
    }
  }
}

TEST_CASE("reconcile consensus") {
  auto safe = reconcile(0.52, report(0));
  CHECK(safe.label == VerdictLabel::SafeVerified);
  CHECK(safe.layer == Layer::Intel);
  REQUIRE(safe.intel_summary);
  CHECK(safe.probability == 0.52);

  auto confirmed = reconcile(0.52, report(12), {3, false});
  CHECK(confirmed.label == VerdictLabel::Malicious);
  CHECK(confirmed.intel_summary->malicious_engines == 12);

  CHECK(reconcile(0.52, report(1), {3, false}).label == VerdictLabel::Suspicious);
  CHECK(reconcile(0.52, report(3), {3, false}).label == VerdictLabel::Malicious);

  auto down = reconcile(0.52, IntelFailure{ErrorKind::RateLimited, "quota"});
  CHECK(down.label == VerdictLabel::Suspicious);
  CHECK(down.layer == Layer::Intel);
  REQUIRE(down.intel_summary);
  CHECK(std::find(down.reasons.begin(), down.reasons.end(), "intel-unavailable") != down.reasons.end());

  auto nf = report(0, {"not-found"});
  CHECK(reconcile(0.5, nf, {3, false}).label == VerdictLabel::SafeVerified);
  CHECK(reconcile(0.5, nf, {3, true}).label == VerdictLabel::Suspicious);

  auto hash = reconcile(std::nullopt, report(5));
  CHECK_FALSE(hash.probability.has_value());
  CHECK(hash.label == VerdictLabel::Malicious);
}

TEST_CASE("K = 1 never yields Suspicious from a report") {
  for (std::uint32_t m = 0; m < 50; ++m) {
    auto v = reconcile(0.5, report(m), {1, false});
    CHECK(v.label != VerdictLabel::Suspicious);
    CHECK(v.label == (m == 0 ? VerdictLabel::SafeVerified : VerdictLabel::Malicious));
  }
}

TEST_CASE("binary scoring of verdicts") {
  CHECK(binary_label(VerdictLabel::Benign) == Label::Benign);
  CHECK(binary_label(VerdictLabel::SafeVerified) == Label::Benign);
  CHECK(binary_label(VerdictLabel::Suspicious) == Label::Malicious);
  CHECK(binary_label(VerdictLabel::Malicious) == Label::Malicious);
  CHECK(to_string(VerdictLabel::SafeVerified) == "safe_verified");
  CHECK(to_string(Layer::Intel) == "intel");
}
