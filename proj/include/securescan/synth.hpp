#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "securescan/corpus.hpp"

namespace securescan::synth {

struct UrlCorpusOptions {
  std::size_t count = 5000;
  double malicious_fraction = 0.4;
  /// Share of each class drawn from templates that borrow the other class's
  /// surface cues (keyword paths on benign sites, word domains for phishing).
  double ambiguous_fraction = 0.20;
  std::uint64_t seed = 7;
};

/// Seeded benchmark corpus. Benign: dictionary-word domains with clean paths.
/// Malicious: keyword-stuffed hosts, abused TLDs, IP hosts and encoded paths.
/// Texts are already normalized and unique.
std::vector<LabeledSample> url_corpus(const UrlCorpusOptions& opts = {});

struct FileSample {
  std::vector<std::uint8_t> bytes;
  Label label = Label::Benign;
};

/// Benign: text-heavy, low-entropy payloads. Malicious: packed-looking,
/// high-entropy payloads with few strings. A small share of each is blended.
std::vector<FileSample> file_corpus(std::size_t count, std::uint64_t seed);

struct FixtureOptions {
  double malicious_coverage = 0.85;  // share of malicious samples reported at >= K engines
  std::uint32_t engine_threshold = 3;
  double absent_share = 0.3;         // share of uncovered samples with no fixture at all (404)
  std::uint64_t seed = 11;
};

/// Writes one provider response document per sample, named by its URL
/// identifier. Benign and uncovered malicious samples report 0 malicious engines
/// or have no fixture. Returns the number of files written.
std::size_t write_intel_fixtures(const std::vector<LabeledSample>& samples, const std::filesystem::path& dir,
                                 const FixtureOptions& opts = {});

/// Provider response document in the v3 object shape.
std::string provider_document(std::string_view id, std::uint32_t malicious, std::uint32_t suspicious,
                              std::uint32_t harmless, std::uint32_t undetected, std::int64_t last_analysis_ts);

}  // namespace securescan::synth
