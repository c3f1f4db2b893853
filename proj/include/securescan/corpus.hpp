#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace securescan {

enum class Label : std::uint8_t { Benign = 0, Malicious = 1 };

inline int to_int(Label l) { return static_cast<int>(l); }

struct LabeledSample {
  std::string text;  // normalized URL
  Label label = Label::Benign;
  std::string origin;

  bool operator==(const LabeledSample&) const = default;
};

struct NormalizedUrl {
  std::string text;
  bool https_present = false;
};

/// Query keys dropped during normalization. Entries ending in '*' match by prefix.
struct TrackingDenyList {
  std::vector<std::string> keys{"utm_*", "gclid", "fbclid", "ref"};

  bool matches(std::string_view key) const;
};

/// Lowercases, strips the scheme (remembering whether it was https) and
/// removes tracking query parameters. Throws EmptyInput / MalformedUrl.
NormalizedUrl normalize_url(std::string_view raw, const TrackingDenyList& deny = {});

/// Host portion of an already-normalized URL: userinfo and port removed,
/// brackets kept for IPv6 literals. Throws MalformedUrl when empty or invalid.
std::string extract_host(std::string_view normalized);

/// Path portion (from the first '/' after the authority, excluding query and
/// fragment). Empty when the URL has no path.
std::string_view extract_path(std::string_view normalized);

struct CorpusLoad {
  std::vector<LabeledSample> samples;
  std::array<std::size_t, 2> class_counts{0, 0};
  std::size_t duplicates = 0;          // dropped repeats, same label
  std::size_t label_conflicts = 0;     // dropped repeats with the other label
};

/// Reads a `url,label` file (header optional, comma or tab delimited; the
/// split is on the last delimiter so URLs may contain commas). Labels are
/// 0/1 or benign/malicious in any case.
CorpusLoad load_corpus(const std::filesystem::path& path, const TrackingDenyList& deny = {});
CorpusLoad parse_corpus(std::string_view contents, std::string_view source_name,
                        const TrackingDenyList& deny = {});

void write_corpus(const std::filesystem::path& path, const std::vector<LabeledSample>& samples);

std::vector<std::string> default_augment_suffixes();

/// One suffix per line; blank lines and lines starting with '#' are skipped.
std::vector<std::string> load_suffixes(const std::filesystem::path& path);

/// Appends a directory suffix to ceil(rate * n) seeded picks. Originals are
/// kept in their original order, augmented copies follow.
std::vector<LabeledSample> augment(const std::vector<LabeledSample>& samples,
                                   const std::vector<std::string>& suffixes, double rate,
                                   std::uint64_t seed);

struct SplitSpec {
  double train_fraction = 0.80;
  std::uint64_t seed = 42;
  int folds = 10;
};

struct TrainTestSplit {
  std::vector<LabeledSample> train;
  std::vector<LabeledSample> test;
};

TrainTestSplit stratified_split(const std::vector<LabeledSample>& samples, const SplitSpec& spec);

/// Index-level stratified split; returns (train indices, test indices).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> stratified_split_indices(
    const std::vector<Label>& labels, double train_fraction, std::uint64_t seed);

/// Fold id in [0, k) for each sample; classes are dealt round-robin after a
/// seeded per-class shuffle so every fold is within one sample of the global
/// class ratio.
std::vector<int> stratified_folds(const std::vector<Label>& labels, int k, std::uint64_t seed);

}  // namespace securescan
