#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace securescan {

/// Sorted (index, value) pairs; indices strictly increasing and < dim, values
/// non-zero.
struct SparseVector {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
  double l2_norm() const;
  /// Throws DimensionMismatch / InvalidArgument when the invariants do not hold.
  void validate() const;

  static SparseVector from_dense(std::span<const double> dense);

  bool operator==(const SparseVector&) const = default;
};

/// All contiguous substrings of length n_min..n_max (views into `text`).
std::vector<std::string_view> char_ngrams(std::string_view text, std::size_t n_min, std::size_t n_max);

struct VectorizerOptions {
  std::size_t n_min = 3;
  std::size_t n_max = 7;
  std::size_t max_features = 50'000;
};

/// TF-IDF over character n-grams: raw counts times smoothed idf
/// ln((1+N)/(1+df)) + 1, then L2-normalized. Immutable after fitting.
class Vectorizer {
 public:
  Vectorizer() = default;
  /// `terms` in column order, `idf` parallel to it.
  Vectorizer(std::size_t n_min, std::size_t n_max, std::size_t max_features,
             std::vector<std::string> terms, std::vector<double> idf);

  static Vectorizer fit(std::span<const std::string> corpus, const VectorizerOptions& opts = {});

  SparseVector transform(std::string_view text) const;

  std::size_t n_min() const { return n_min_; }
  std::size_t n_max() const { return n_max_; }
  std::size_t max_features() const { return max_features_; }
  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<double>& idf() const { return idf_; }
  /// -1 when out of vocabulary.
  std::int64_t index_of(std::string_view term) const;

 private:
  struct TransparentHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };

  std::size_t n_min_ = 3;
  std::size_t n_max_ = 7;
  std::size_t max_features_ = 50'000;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::unordered_map<std::string, std::uint32_t, TransparentHash, std::equal_to<>> lookup_;
};

struct FileStaticFeatures {
  std::uint64_t size_bytes = 0;
  double entropy_bits = 0.0;
  double printable_string_density = 0.0;
  std::array<std::uint64_t, 256> byte_histogram{};
};

/// Printable runs are bytes 0x20..0x7e or tab, at least this long.
inline constexpr std::size_t kMinPrintableRun = 4;

FileStaticFeatures file_static_features(std::span<const std::uint8_t> bytes);

/// Dense layout fed to the file model: log2(1+size)/64, entropy/8, string
/// density, then 256 histogram bins normalized by size.
inline constexpr std::uint32_t kFileFeatureDim = 259;
SparseVector file_feature_vector(const FileStaticFeatures& f);

}  // namespace securescan
