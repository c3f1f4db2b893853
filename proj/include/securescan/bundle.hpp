#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "securescan/classifier.hpp"
#include "securescan/decision.hpp"
#include "securescan/eval.hpp"
#include "securescan/features.hpp"

namespace securescan {

inline constexpr int kBundleFormatVersion = 1;

struct TrainingMetadata {
  std::string corpus_digest;  // SHA-256 over the training rows
  std::size_t train_samples = 0;
  std::size_t test_samples = 0;
  double selected_c = 0.0;
  MetricsReport cv_mean;
  MetricsReport test;
};

/// Everything a scanner needs, persisted as one self-checking document.
struct ModelBundle {
  int format_version = kBundleFormatVersion;
  std::string created_at;  // ISO-8601 UTC
  Vectorizer vectorizer;
  ModelParams url_model;
  std::optional<ModelParams> file_model;  // over the fixed file feature layout
  ThresholdPolicy thresholds;
  TrainingMetadata metadata;
};

std::string sha256_hex(std::string_view bytes);
std::string utc_timestamp();

nlohmann::json bundle_payload(const ModelBundle& b);
ModelBundle bundle_from_payload(const nlohmann::json& payload);

/// {"format_version", "digest", "payload"}; the digest is SHA-256 over the
/// serialized payload.
void save_model(const ModelBundle& b, const std::filesystem::path& path);
/// Throws VersionMismatch for a newer format and CorruptBundle when the file is
/// truncated, unparsable, or fails its digest.
ModelBundle load_model(const std::filesystem::path& path);
ModelBundle parse_bundle(std::string_view contents);

}  // namespace securescan
