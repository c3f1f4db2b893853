#include "securescan/bundle.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "securescan/error.hpp"

namespace securescan {
namespace {

nlohmann::json metrics_json(const MetricsReport& m) {
  nlohmann::json j{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall},
                   {"f1", m.f1},             {"fpr", m.fpr},             {"balanced_accuracy", m.balanced_accuracy},
                   {"degenerate", m.degenerate}};
  if (m.auc) j["auc"] = *m.auc;
  return j;
}

MetricsReport metrics_from_json(const nlohmann::json& j) {
  MetricsReport m;
  m.accuracy = j.value("accuracy", 0.0);
  m.precision = j.value("precision", 0.0);
  m.recall = j.value("recall", 0.0);
  m.f1 = j.value("f1", 0.0);
  m.fpr = j.value("fpr", 0.0);
  m.balanced_accuracy = j.value("balanced_accuracy", 0.0);
  m.degenerate = j.value("degenerate", false);
  if (j.contains("auc")) m.auc = j.at("auc").get<double>();
  return m;
}

nlohmann::json model_json(const ModelParams& m) {
  nlohmann::json j{{"weights", m.weights}, {"bias", m.bias}, {"C", m.c}};
  if (m.calibration) j["calibration"] = {{"A", m.calibration->a}, {"B", m.calibration->b}};
  return j;
}

ModelParams model_from_json(const nlohmann::json& j) {
  ModelParams m;
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.c = j.at("C").get<double>();
  if (j.contains("calibration")) m.calibration = Calibration{j["calibration"].at("A"), j["calibration"].at("B")};
  return m;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

nlohmann::json bundle_payload(const ModelBundle& b) {
  const auto& v = b.vectorizer;
  nlohmann::json j{
      {"created_at", b.created_at},
      {"vectorizer",
       {{"n_min", v.n_min()}, {"n_max", v.n_max()}, {"max_features", v.max_features()}, {"vocabulary", v.terms()},
        {"idf", v.idf()}}},
      {"url_model", model_json(b.url_model)},
      {"thresholds",
       {{"benign", b.thresholds.t_benign}, {"gray_upper", b.thresholds.t_gray_upper},
        {"malicious", b.thresholds.t_malicious}}},
      {"metadata",
       {{"corpus_digest", b.metadata.corpus_digest},
        {"train_samples", b.metadata.train_samples},
        {"test_samples", b.metadata.test_samples},
        {"selected_C", b.metadata.selected_c},
        {"cv_mean", metrics_json(b.metadata.cv_mean)},
        {"test", metrics_json(b.metadata.test)}}},
  };
  if (b.file_model) j["file_model"] = model_json(*b.file_model);
  return j;
}

ModelBundle bundle_from_payload(const nlohmann::json& p) {
  ModelBundle b;
  b.created_at = p.value("created_at", "");
  const auto& v = p.at("vectorizer");
  b.vectorizer = Vectorizer(v.at("n_min").get<std::size_t>(), v.at("n_max").get<std::size_t>(),
                            v.at("max_features").get<std::size_t>(), v.at("vocabulary").get<std::vector<std::string>>(),
                            v.at("idf").get<std::vector<double>>());
  b.url_model = model_from_json(p.at("url_model"));
  if (b.url_model.weights.size() != b.vectorizer.size())
    throw Error(ErrorKind::CorruptBundle, "weights length does not match vocabulary length");
  if (p.contains("file_model")) {
    b.file_model = model_from_json(p.at("file_model"));
    if (b.file_model->weights.size() != kFileFeatureDim)
      throw Error(ErrorKind::CorruptBundle, "file model has the wrong feature dimension");
  }
  const auto& t = p.at("thresholds");
  b.thresholds = {t.at("benign"), t.at("gray_upper"), t.at("malicious")};
  b.thresholds.validate();
  if (auto m = p.find("metadata"); m != p.end()) {
    b.metadata.corpus_digest = m->value("corpus_digest", "");
    b.metadata.train_samples = m->value("train_samples", std::size_t{0});
    b.metadata.test_samples = m->value("test_samples", std::size_t{0});
    b.metadata.selected_c = m->value("selected_C", 0.0);
    if (m->contains("cv_mean")) b.metadata.cv_mean = metrics_from_json(m->at("cv_mean"));
    if (m->contains("test")) b.metadata.test = metrics_from_json(m->at("test"));
  }
  return b;
}

void save_model(const ModelBundle& b, const std::filesystem::path& path) {
  const nlohmann::json payload = bundle_payload(b);
  const std::string body = payload.dump();
  nlohmann::json doc{{"format_version", b.format_version}, {"digest", sha256_hex(body)}, {"payload", payload}};
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write bundle " + path.string());
  out << doc.dump() << '\n';
  if (!out) throw Error(ErrorKind::Io, "short write to bundle " + path.string());
}

ModelBundle parse_bundle(std::string_view contents) {
  nlohmann::json doc = nlohmann::json::parse(contents, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw Error(ErrorKind::CorruptBundle, "bundle is not a complete JSON document");
  auto version = doc.find("format_version");
  if (version == doc.end() || !version->is_number_integer())
    throw Error(ErrorKind::CorruptBundle, "bundle has no format_version");
  if (version->get<int>() > kBundleFormatVersion)
    throw Error(ErrorKind::VersionMismatch, "bundle format " + std::to_string(version->get<int>()) +
                                                " is newer than supported " + std::to_string(kBundleFormatVersion));
  if (version->get<int>() < 1) throw Error(ErrorKind::VersionMismatch, "unknown bundle format version");
  if (!doc.contains("payload") || !doc.contains("digest")) throw Error(ErrorKind::CorruptBundle, "bundle is incomplete");
  const auto& payload = doc["payload"];
  if (sha256_hex(payload.dump()) != doc["digest"].get<std::string>())
    throw Error(ErrorKind::CorruptBundle, "bundle digest mismatch");
  try {
    ModelBundle b = bundle_from_payload(payload);
    b.format_version = version->get<int>();
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::CorruptBundle, std::string("bundle payload: ") + e.what());
  }
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open bundle " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bundle(buf.str());
}

}  // namespace securescan
