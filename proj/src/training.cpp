#include "securescan/training.hpp"

#include <cctype>
#include <fstream>

#include "securescan/error.hpp"

namespace securescan {
namespace {

std::vector<Label> labels_of(const std::vector<LabeledSample>& s) {
  std::vector<Label> out;
  out.reserve(s.size());
  for (const auto& x : s) out.push_back(x.label);
  return out;
}

}  // namespace

CalibratedFit fit_calibrated(std::span<const SparseVector> x, std::span<const Label> y, const HyperparamGrid& grid,
                             const TrainOptions& opts) {
  CalibratedFit fit;
  fit.grid = grid_search(x, y, grid, opts);
  Calibration cal = fit_calibration(fit.grid.oof_scores, y, opts.optimizer);
  fit.model = train(x, y, fit.grid.best_c, opts).model;
  fit.model.calibration = cal;
  return fit;
}

std::string corpus_digest(const std::vector<LabeledSample>& samples) {
  std::string buf;
  for (const auto& s : samples) {
    buf += s.text;
    buf += '\t';
    buf += static_cast<char>('0' + to_int(s.label));
    buf += '\n';
  }
  return sha256_hex(buf);
}

TrainingReport train_pipeline(const std::vector<LabeledSample>& samples, const TrainingConfig& cfg) {
  TrainingReport report;
  SplitSpec spec{cfg.train_fraction, cfg.seed, cfg.grid.folds};
  TrainTestSplit split = stratified_split(samples, spec);
  report.test = std::move(split.test);
  report.train = augment(split.train, cfg.suffixes, cfg.augment_rate, cfg.seed);
  report.augmented = report.train.size() - split.train.size();

  std::vector<std::string> texts;
  texts.reserve(report.train.size());
  for (const auto& s : report.train) texts.push_back(s.text);
  Vectorizer vec = Vectorizer::fit(texts, cfg.vectorizer);

  std::vector<SparseVector> x;
  x.reserve(texts.size());
  for (const auto& t : texts) x.push_back(vec.transform(t));
  const std::vector<Label> y = labels_of(report.train);

  HyperparamGrid grid = cfg.grid;
  grid.seed = cfg.seed;
  CalibratedFit fit = fit_calibrated(x, y, grid, cfg.train);
  report.grid = fit.grid;

  ModelBundle& b = report.bundle;
  b.created_at = utc_timestamp();
  b.vectorizer = std::move(vec);
  b.url_model = std::move(fit.model);
  b.thresholds = cfg.thresholds;
  b.metadata.corpus_digest = corpus_digest(report.train);
  b.metadata.train_samples = report.train.size();
  b.metadata.test_samples = report.test.size();
  b.metadata.selected_c = report.grid.best_c;
  for (const auto& row : report.grid.table) {
    if (row.c == report.grid.best_c) b.metadata.cv_mean = summarize_mean(row.fold_metrics);
  }

  ModelEvaluation ev = evaluate_model(b, report.test);
  report.test_metrics = ev.metrics;
  report.test_probabilities = std::move(ev.probabilities);
  b.metadata.test = report.test_metrics;
  return report;
}

void train_file_model(ModelBundle& bundle, const std::vector<synth::FileSample>& files, const HyperparamGrid& grid,
                      const TrainOptions& opts) {
  std::vector<SparseVector> x;
  std::vector<Label> y;
  for (const auto& f : files) {
    x.push_back(file_feature_vector(file_static_features(f.bytes)));
    y.push_back(f.label);
  }
  bundle.file_model = fit_calibrated(x, y, grid, opts).model;
}

std::vector<synth::FileSample> load_file_corpus(const std::filesystem::path& listing) {
  std::ifstream in(listing);
  if (!in) throw Error(ErrorKind::Io, "cannot open file listing " + listing.string());
  std::vector<synth::FileSample> out;
  std::size_t row = 0;
  for (std::string line; std::getline(in, line);) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto comma = line.find_last_of(",\t");
    if (comma == std::string::npos)
      throw Error(ErrorKind::ParseError, listing.string() + " row " + std::to_string(row) + ": expected path,label");
    std::string label = line.substr(comma + 1);
    for (auto& c : label) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    synth::FileSample s;
    if (label == "0" || label == "benign") s.label = Label::Benign;
    else if (label == "1" || label == "malicious") s.label = Label::Malicious;
    else if (row == 1) continue;
    else throw Error(ErrorKind::ParseError, listing.string() + " row " + std::to_string(row) + ": bad label");
    std::filesystem::path p = line.substr(0, comma);
    if (p.is_relative()) p = listing.parent_path() / p;
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot read " + p.string());
    s.bytes.assign(std::istreambuf_iterator<char>(f), {});
    out.push_back(std::move(s));
  }
  if (out.empty()) throw Error(ErrorKind::EmptyCorpus, listing.string() + " lists no files");
  return out;
}

ModelEvaluation evaluate_model(const ModelBundle& bundle, const std::vector<LabeledSample>& samples) {
  ModelEvaluation ev;
  std::vector<Label> pred, actual;
  for (const auto& s : samples) {
    double p = predict_proba(bundle.url_model, bundle.vectorizer.transform(s.text)).p;
    ev.probabilities.push_back(p);
    pred.push_back(p >= 0.5 ? Label::Malicious : Label::Benign);
    actual.push_back(s.label);
  }
  ev.metrics = metrics(confusion(pred, actual));
  bool pos = false, neg = false;
  for (auto l : actual) (l == Label::Malicious ? pos : neg) = true;
  if (pos && neg) {
    ev.metrics.auc = roc_auc(ev.probabilities, actual);
    ev.roc = roc_curve(ev.probabilities, actual);
  }
  return ev;
}

}  // namespace securescan
