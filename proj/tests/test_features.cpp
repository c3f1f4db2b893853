#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "securescan/error.hpp"
#include "securescan/features.hpp"
#include "oracles.hpp"

using namespace securescan;

namespace {

std::string random_text(std::mt19937_64& rng, std::size_t max_len) {
  static const char alphabet[] = "abc./";
  std::string s(rng() % (max_len + 1), ' ');
  for (auto& c : s) c = alphabet[rng() % 5];
  return s;
}


}  // namespace

TEST_CASE("char_ngrams") {
  auto g = char_ngrams("abcd", 3, 3);
  CHECK(g == std::vector<std::string_view>{"abc", "bcd"});
  CHECK(char_ngrams("ab", 3, 7).empty());
  CHECK(char_ngrams("abcdefgh", 3, 7).size() == 20);
  CHECK(char_ngrams("", 3, 7).empty());
}

TEST_CASE("vectorizer examples") {
  std::vector<std::string> two{"abc", "abd"};
  auto v = Vectorizer::fit(two, {3, 3, 50});
  REQUIRE(v.terms() == std::vector<std::string>{"abc", "abd"});
  CHECK(v.idf()[0] == doctest::Approx(1.405465).epsilon(1e-6));
  CHECK(v.idf()[1] == doctest::Approx(std::log(1.5) + 1.0).epsilon(1e-15));

  auto x = v.transform("abc");
  REQUIRE(x.nnz() == 1);
  CHECK(x.indices[0] == v.index_of("abc"));
  CHECK(x.values[0] == 1.0);
  CHECK(v.transform("").empty());
  CHECK(v.transform("zzzz").empty());
  CHECK(v.index_of("zzz") == -1);

  std::vector<std::string> single{"abcdef"};
  auto s = Vectorizer::fit(single);
  for (double idf : s.idf()) CHECK(idf == 1.0);

  std::vector<std::string> three{"abc", "abd", "abc"};
  auto capped = Vectorizer::fit(three, {3, 3, 1});
  CHECK(capped.terms() == std::vector<std::string>{"abc"});

  std::vector<std::string> none;
  CHECK_THROWS_AS(Vectorizer::fit(none), Error);
}

TEST_CASE("oracle equivalence on random small corpora") {
  std::mt19937_64 rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> docs(1 + rng() % 5);
    for (auto& d : docs) d = random_text(rng, 12);
    std::size_t lo = 1 + rng() % 3, hi = lo + rng() % 4;
    std::size_t cap = rng() % 3 == 0 ? 1 + rng() % 10 : 50'000;

    oracles::TfidfOracle oracle(docs, lo, hi, cap);
    auto v = Vectorizer::fit(docs, {lo, hi, cap});
    REQUIRE(v.terms() == oracle.terms);
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(std::fabs(v.idf()[j] - oracle.idf[j]) <= 1e-12);

    std::vector<std::string> probes = docs;
    for (int p = 0; p < 3; ++p) probes.push_back(random_text(rng, 12));
    for (const auto& text : probes) {
      auto got = v.transform(text);
      got.validate();
      auto want = oracle.transform(text);
      auto dense = oracles::densify(got);
      REQUIRE(dense.size() == want.size());
      for (std::size_t j = 0; j < want.size(); ++j) CHECK(std::fabs(dense[j] - want[j]) <= 1e-12);
      if (!got.empty()) CHECK(std::fabs(got.l2_norm() - 1.0) <= 1e-12);
    }
  }
}

TEST_CASE("repetition keeps direction and fit is deterministic") {
  std::vector<std::string> docs{"login.example.com/a", "shop.example.org/b", "paypal.verify.zip"};
  auto v = Vectorizer::fit(docs);
  auto again = Vectorizer::fit(docs);
  CHECK(v.terms() == again.terms());
  CHECK(v.idf() == again.idf());

  for (const auto& d : docs) {
    auto once = oracles::densify(v.transform(d));
    auto twice = oracles::densify(v.transform(d + d));
    double dot = 0;
    for (std::size_t j = 0; j < once.size(); ++j) dot += once[j] * twice[j];
    // d + d adds boundary n-grams, so compare the shared support only
    CHECK(dot > 0.9);
  }
  // pure repetition of counts: any fixed document's counts doubled normalise to the same vector
  std::vector<std::string> one{"abcabc"};
  auto w = Vectorizer::fit(one, {3, 3, 10});
  auto a = oracles::densify(w.transform("abc"));
  auto b = oracles::densify(w.transform("abcxabc"));  // "abc" twice, separator grams are OOV
  for (std::size_t j = 0; j < a.size(); ++j) CHECK(std::fabs(a[j] - b[j]) <= 1e-15);
}

TEST_CASE("sparse vector invariants") {
  SparseVector ok{5, {0, 3}, {0.5, -1.0}};
  CHECK_NOTHROW(ok.validate());
  SparseVector unsorted{5, {3, 0}, {1, 1}};
  CHECK_THROWS_AS(unsorted.validate(), Error);
  SparseVector out_of_range{3, {3}, {1}};
  CHECK_THROWS_AS(out_of_range.validate(), Error);
  SparseVector zero_value{3, {1}, {0.0}};
  CHECK_THROWS_AS(zero_value.validate(), Error);
  std::vector<double> dense{0, 2, 0, -1};
  auto s = SparseVector::from_dense(dense);
  CHECK(s.indices == std::vector<std::uint32_t>{1, 3});
  CHECK(s.l2_norm() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("file static features") {
  std::vector<std::uint8_t> all(256);
  std::iota(all.begin(), all.end(), 0);
  CHECK(file_static_features(all).entropy_bits == doctest::Approx(8.0).epsilon(1e-15));

  std::vector<std::uint8_t> zeros(1000, 0);
  auto z = file_static_features(zeros);
  CHECK(z.entropy_bits == 0.0);
  CHECK(z.printable_string_density == 0.0);

  std::vector<std::uint8_t> aabb{'a', 'a', 'b', 'b'};
  auto ab = file_static_features(aabb);
  CHECK(ab.entropy_bits == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ab.printable_string_density == 1.0);

  auto empty = file_static_features({});
  CHECK(empty.size_bytes == 0);
  CHECK(empty.entropy_bits == 0.0);

  // runs shorter than 4 do not count
  std::vector<std::uint8_t> mixed{'a', 'b', 'c', 0, 'w', 'x', 'y', 'z', 1, 2};
  CHECK(file_static_features(mixed).printable_string_density == doctest::Approx(0.4));

  std::mt19937_64 rng(4);
  for (int t = 0; t < 50; ++t) {
    std::vector<std::uint8_t> bytes(rng() % 3000);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng() % (1 + rng() % 256));
    auto f = file_static_features(bytes);
    CHECK(f.entropy_bits >= 0.0);
    CHECK(f.entropy_bits <= 8.0);
    CHECK(std::accumulate(f.byte_histogram.begin(), f.byte_histogram.end(), std::uint64_t{0}) == f.size_bytes);
    auto distinct = std::count_if(f.byte_histogram.begin(), f.byte_histogram.end(), [](auto c) { return c > 0; });
    CHECK((f.entropy_bits == 0.0) == (distinct <= 1));
    auto vec = file_feature_vector(f);
    CHECK(vec.dim == kFileFeatureDim);
    CHECK_NOTHROW(vec.validate());
  }
}
