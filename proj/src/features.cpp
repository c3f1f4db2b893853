#include "securescan/features.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "securescan/error.hpp"

namespace securescan {

double SparseVector::l2_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

void SparseVector::validate() const {
  if (indices.size() != values.size())
    throw Error(ErrorKind::InvalidArgument, "sparse vector index/value length differ");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= dim) throw Error(ErrorKind::DimensionMismatch, "sparse index out of range");
    if (k > 0 && indices[k] <= indices[k - 1])
      throw Error(ErrorKind::InvalidArgument, "sparse indices not strictly increasing");
    if (values[k] == 0.0) throw Error(ErrorKind::InvalidArgument, "explicit zero in sparse vector");
  }
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
  SparseVector v;
  v.dim = static_cast<std::uint32_t>(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i] != 0.0) {
      v.indices.push_back(static_cast<std::uint32_t>(i));
      v.values.push_back(dense[i]);
    }
  }
  return v;
}

std::vector<std::string_view> char_ngrams(std::string_view text, std::size_t n_min, std::size_t n_max) {
  if (n_min < 1 || n_min > n_max) throw Error(ErrorKind::InvalidArgument, "need 1 <= n_min <= n_max");
  std::vector<std::string_view> out;
  for (std::size_t n = n_min; n <= n_max && n <= text.size(); ++n)
    for (std::size_t i = 0; i + n <= text.size(); ++i) out.push_back(text.substr(i, n));
  return out;
}

Vectorizer::Vectorizer(std::size_t n_min, std::size_t n_max, std::size_t max_features,
                       std::vector<std::string> terms, std::vector<double> idf)
    : n_min_(n_min), n_max_(n_max), max_features_(max_features), terms_(std::move(terms)), idf_(std::move(idf)) {
  if (n_min_ < 1 || n_min_ > n_max_) throw Error(ErrorKind::InvalidArgument, "need 1 <= n_min <= n_max");
  if (terms_.size() != idf_.size()) throw Error(ErrorKind::DimensionMismatch, "vocabulary and idf lengths differ");
  if (terms_.size() > max_features_) throw Error(ErrorKind::InvalidArgument, "vocabulary exceeds max_features");
  lookup_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!lookup_.emplace(terms_[i], static_cast<std::uint32_t>(i)).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate vocabulary term '" + terms_[i] + "'");
  }
}

Vectorizer Vectorizer::fit(std::span<const std::string> corpus, const VectorizerOptions& opts) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyCorpus, "cannot fit a vectorizer on zero documents");
  if (opts.max_features == 0) throw Error(ErrorKind::InvalidArgument, "max_features must be positive");

  std::unordered_map<std::string_view, std::size_t> df;
  std::unordered_set<std::string_view> distinct;
  for (const auto& doc : corpus) {
    distinct.clear();
    for (auto g : char_ngrams(doc, opts.n_min, opts.n_max)) distinct.insert(g);
    for (auto g : distinct) ++df[g];
  }

  std::vector<std::pair<std::string_view, std::size_t>> ranked(df.begin(), df.end());
  auto by_rank = [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  if (ranked.size() > opts.max_features) {
    std::nth_element(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(opts.max_features),
                     ranked.end(), by_rank);
    ranked.resize(opts.max_features);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

  const double n_docs = static_cast<double>(corpus.size());
  std::vector<std::string> terms;
  std::vector<double> idf;
  terms.reserve(ranked.size());
  idf.reserve(ranked.size());
  for (const auto& [term, count] : ranked) {
    terms.emplace_back(term);
    idf.push_back(std::log((1.0 + n_docs) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return Vectorizer(opts.n_min, opts.n_max, opts.max_features, std::move(terms), std::move(idf));
}

std::int64_t Vectorizer::index_of(std::string_view term) const {
  auto it = lookup_.find(term);
  return it == lookup_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

SparseVector Vectorizer::transform(std::string_view text) const {
  SparseVector v;
  v.dim = static_cast<std::uint32_t>(terms_.size());
  if (text.size() < n_min_) return v;

  std::vector<std::uint32_t> hits;
  for (std::size_t n = n_min_; n <= n_max_ && n <= text.size(); ++n) {
    for (std::size_t i = 0; i + n <= text.size(); ++i) {
      auto it = lookup_.find(text.substr(i, n));
      if (it != lookup_.end()) hits.push_back(it->second);
    }
  }
  if (hits.empty()) return v;
  std::sort(hits.begin(), hits.end());

  double norm_sq = 0.0;
  for (std::size_t k = 0; k < hits.size();) {
    std::size_t j = k;
    while (j < hits.size() && hits[j] == hits[k]) ++j;
    double w = static_cast<double>(j - k) * idf_[hits[k]];
    v.indices.push_back(hits[k]);
    v.values.push_back(w);
    norm_sq += w * w;
    k = j;
  }
  double norm = std::sqrt(norm_sq);
  for (double& x : v.values) x /= norm;
  return v;
}

FileStaticFeatures file_static_features(std::span<const std::uint8_t> bytes) {
  FileStaticFeatures f;
  f.size_bytes = bytes.size();
  for (auto b : bytes) ++f.byte_histogram[b];
  if (bytes.empty()) return f;

  const double n = static_cast<double>(bytes.size());
  double h = 0.0;
  for (auto c : f.byte_histogram) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  f.entropy_bits = std::clamp(h, 0.0, 8.0);

  auto printable = [](std::uint8_t b) { return (b >= 0x20 && b <= 0x7e) || b == '\t'; };
  std::size_t in_runs = 0, run = 0;
  for (auto b : bytes) {
    if (printable(b)) {
      ++run;
    } else {
      if (run >= kMinPrintableRun) in_runs += run;
      run = 0;
    }
  }
  if (run >= kMinPrintableRun) in_runs += run;
  f.printable_string_density = static_cast<double>(in_runs) / n;
  return f;
}

SparseVector file_feature_vector(const FileStaticFeatures& f) {
  std::array<double, kFileFeatureDim> dense{};
  dense[0] = std::log2(1.0 + static_cast<double>(f.size_bytes)) / 64.0;
  dense[1] = f.entropy_bits / 8.0;
  dense[2] = f.printable_string_density;
  if (f.size_bytes > 0) {
    const double n = static_cast<double>(f.size_bytes);
    for (std::size_t b = 0; b < 256; ++b) dense[3 + b] = static_cast<double>(f.byte_histogram[b]) / n;
  }
  return SparseVector::from_dense(dense);
}

}  // namespace securescan
