#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "securescan/bundle.hpp"
#include "securescan/classifier.hpp"
#include "securescan/corpus.hpp"
#include "securescan/synth.hpp"

namespace securescan {

struct TrainingConfig {
  double augment_rate = 0.0;
  std::vector<std::string> suffixes = default_augment_suffixes();
  std::uint64_t seed = 42;
  double train_fraction = 0.80;
  HyperparamGrid grid;
  VectorizerOptions vectorizer;
  TrainOptions train;
  ThresholdPolicy thresholds;
};

struct CalibratedFit {
  ModelParams model;  // refit on all rows with the selected C, Platt pair attached
  GridSearchResult grid;
};

/// Grid search with k-fold CV, Platt calibration on the out-of-fold scores of
/// the selected C, then a refit on every row.
CalibratedFit fit_calibrated(std::span<const SparseVector> x, std::span<const Label> y, const HyperparamGrid& grid,
                             const TrainOptions& opts = {});

struct TrainingReport {
  ModelBundle bundle;
  GridSearchResult grid;
  std::vector<LabeledSample> train;  // after augmentation
  std::vector<LabeledSample> test;   // held out, never augmented
  std::vector<double> test_probabilities;
  MetricsReport test_metrics;  // calibrated p >= 0.5, with AUC
  std::size_t augmented = 0;
};

/// Split (stratified) -> augment the training side -> fit vectorizer -> grid
/// search + calibration -> held-out evaluation -> bundle.
TrainingReport train_pipeline(const std::vector<LabeledSample>& samples, const TrainingConfig& cfg);

/// Attaches a calibrated file model trained on static features.
void train_file_model(ModelBundle& bundle, const std::vector<synth::FileSample>& files, const HyperparamGrid& grid,
                      const TrainOptions& opts = {});

/// `path,label` rows; relative paths resolve against the listing's directory.
std::vector<synth::FileSample> load_file_corpus(const std::filesystem::path& listing);

struct ModelEvaluation {
  MetricsReport metrics;  // calibrated p >= 0.5
  std::vector<double> probabilities;
  std::vector<RocPoint> roc;
};

ModelEvaluation evaluate_model(const ModelBundle& bundle, const std::vector<LabeledSample>& samples);

std::string corpus_digest(const std::vector<LabeledSample>& samples);

}  // namespace securescan
