// securescan: train, scan, evaluate, serve, generate.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include <CLI11.hpp>

#include "securescan/baselines.hpp"
#include "securescan/config.hpp"
#include "securescan/error.hpp"
#include "securescan/kernels.hpp"
#include "securescan/pipeline.hpp"
#include "securescan/service.hpp"
#include "securescan/synth.hpp"
#include "securescan/training.hpp"

namespace ss = securescan;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUsage = 2;
constexpr int kExitMalicious = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

nlohmann::json metrics_json(const ss::MetricsReport& m) {
  nlohmann::json j{{"accuracy", m.accuracy}, {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
                   {"fpr", m.fpr}, {"balanced_accuracy", m.balanced_accuracy}};
  if (m.auc) j["auc"] = *m.auc;
  return j;
}

/// Bundle thresholds, then SECURESCAN_CONFIG, then --config, then the API key env var.
ss::AppConfig load_app_config(const std::string& config_path, const ss::ModelBundle* bundle = nullptr) {
  ss::AppConfig cfg;
  if (bundle) cfg.thresholds = bundle->thresholds;
  if (const char* env = std::getenv(ss::kConfigEnv); env && *env) cfg = ss::load_config(env, std::move(cfg));
  if (!config_path.empty()) cfg = ss::load_config(config_path, std::move(cfg));
  if (const char* key = std::getenv(ss::kApiKeyEnv); key && *key) cfg.intel.api_key = key;
  return cfg;
}

/// Fixtures win over a live key; without either, gray-zone inputs degrade to Suspicious.
std::shared_ptr<ss::IntelClient> make_intel(ss::AppConfig& cfg, const std::string& fixtures) {
  if (!fixtures.empty()) {
    // Local fixture reads do not spend provider quota.
    cfg.intel.rate_limit_per_minute = 0;
    return std::make_shared<ss::IntelClient>(std::shared_ptr<ss::IntelProvider>(ss::mock_provider(fixtures)),
                                             cfg.intel);
  }
  if (!cfg.intel.api_key.empty()) {
    auto provider = std::make_shared<ss::HttpProvider>(cfg.intel.base_url, cfg.intel.api_key, cfg.intel.timeout_s);
    return std::make_shared<ss::IntelClient>(provider, cfg.intel);
  }
  return nullptr;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string part = text.substr(start, comma - start);
    if (!part.empty()) {
      try {
        out.push_back(std::stod(part));
      } catch (const std::exception&) {
        throw UsageError("--grid expects comma-separated numbers, got '" + part + "'");
      }
    }
    start = comma + 1;
  }
  if (out.empty()) throw UsageError("--grid is empty");
  return out;
}

struct TrainArgs {
  std::string corpus, out, grid = "0.01,0.1,1,10", suffix_file, file_corpus;
  double augment_rate = 0.0;
  std::uint64_t seed = 42;
  int folds = 10;
  std::size_t max_features = 50'000;
};

int run_train(const TrainArgs& a) {
  ss::TrainingConfig cfg;
  cfg.augment_rate = a.augment_rate;
  cfg.seed = a.seed;
  cfg.grid.c_values = parse_grid(a.grid);
  cfg.grid.folds = a.folds;
  cfg.vectorizer.max_features = a.max_features;
  if (!a.suffix_file.empty()) cfg.suffixes = ss::load_suffixes(a.suffix_file);
  cfg.thresholds = load_app_config({}).thresholds;

  ss::CorpusLoad corpus = ss::load_corpus(a.corpus);
  ss::TrainingReport report = ss::train_pipeline(corpus.samples, cfg);
  if (!a.file_corpus.empty()) ss::train_file_model(report.bundle, ss::load_file_corpus(a.file_corpus), cfg.grid);
  ss::save_model(report.bundle, a.out);

  nlohmann::json grid = nlohmann::json::array();
  for (const auto& row : report.grid.table)
    grid.push_back({{"C", row.c}, {"mean_f1", row.mean_f1}, {"mean_balanced_accuracy", row.mean_balanced_accuracy}});
  nlohmann::json summary{
      {"bundle", a.out},
      {"samples", corpus.samples.size()},
      {"class_counts", {{"benign", corpus.class_counts[0]}, {"malicious", corpus.class_counts[1]}}},
      {"duplicates_dropped", corpus.duplicates},
      {"label_conflicts_dropped", corpus.label_conflicts},
      {"augmented", report.augmented},
      {"train_samples", report.train.size()},
      {"test_samples", report.test.size()},
      {"vocabulary", report.bundle.vectorizer.size()},
      {"selected_C", report.grid.best_c},
      {"grid", grid},
      {"calibration", {{"A", report.bundle.url_model.calibration->a}, {"B", report.bundle.url_model.calibration->b}}},
      {"cv_mean", metrics_json(report.bundle.metadata.cv_mean)},
      {"test", metrics_json(report.test_metrics)},
      {"file_model", report.bundle.file_model.has_value()},
      {"kernels", ss::kernels::active().name}};
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

struct ScanArgs {
  std::string bundle, url, hash, file, fixtures, config;
};

int run_scan(const ScanArgs& a) {
  const int given = !a.url.empty() + !a.hash.empty() + !a.file.empty();
  if (given != 1) throw UsageError("scan needs exactly one of --url, --hash, --file");

  auto bundle = std::make_shared<const ss::ModelBundle>(ss::load_model(a.bundle));
  ss::AppConfig cfg = load_app_config(a.config, bundle.get());
  auto intel = make_intel(cfg, a.fixtures);
  ss::Scanner scanner(bundle, cfg, intel);

  ss::ScanInput input;
  if (!a.url.empty()) {
    input = ss::ScanInput::url(a.url, cfg.tracking);
  } else if (!a.hash.empty()) {
    input = ss::ScanInput::hash(a.hash);
  } else {
    std::ifstream f(a.file, std::ios::binary);
    if (!f) throw ss::Error(ss::ErrorKind::Io, "cannot read " + a.file);
    input = ss::ScanInput::file(std::vector<std::uint8_t>(std::istreambuf_iterator<char>(f), {}));
  }
  ss::Verdict v = scanner.scan(input);
  std::cout << ss::verdict_to_json(v).dump(2) << '\n';
  return v.label == ss::VerdictLabel::Malicious ? kExitMalicious : kExitOk;
}

struct EvaluateArgs {
  std::string bundle, corpus, fixtures, config, roc_out;
  bool baselines = false;
  bool json = false;
};

int run_evaluate(const EvaluateArgs& a) {
  auto bundle = std::make_shared<const ss::ModelBundle>(ss::load_model(a.bundle));
  ss::AppConfig cfg = load_app_config(a.config, bundle.get());
  ss::CorpusLoad corpus = ss::load_corpus(a.corpus, cfg.tracking);
  ss::ModelEvaluation ev = ss::evaluate_model(*bundle, corpus.samples);

  if (!a.roc_out.empty()) {
    std::ofstream out(a.roc_out);
    if (!out) throw ss::Error(ss::ErrorKind::Io, "cannot write " + a.roc_out);
    out << "fpr,tpr,threshold\n";
    out.precision(17);
    for (const auto& p : ev.roc) out << p.fpr << ',' << p.tpr << ',' << p.threshold << '\n';
  }

  nlohmann::json doc{{"samples", corpus.samples.size()}, {"model", metrics_json(ev.metrics)}};
  std::optional<ss::BaselineTable> table;
  if (a.baselines) {
    auto intel = make_intel(cfg, a.fixtures);
    table = ss::compare_baselines(corpus.samples, bundle, cfg, intel);
    doc["baselines"] = ss::baseline_table_json(*table);
  }

  if (a.json) {
    std::cout << doc.dump(2) << '\n';
  } else {
    const auto& m = ev.metrics;
    std::printf("samples: %zu\n", corpus.samples.size());
    std::printf("model (p >= 0.5): accuracy %.4f  precision %.4f  recall %.4f  f1 %.4f  fpr %.4f  auc %.4f\n",
                m.accuracy, m.precision, m.recall, m.f1, m.fpr, m.auc.value_or(0.0));
    if (table) std::printf("\n%s", ss::format_baseline_table(*table).c_str());
  }
  return kExitOk;
}

struct ServeArgs {
  std::string bundle, listen = "127.0.0.1:8080", fixtures, config;
};

int run_serve(const ServeArgs& a) {
  auto colon = a.listen.rfind(':');
  if (colon == std::string::npos) throw UsageError("--listen expects HOST:PORT");
  const std::string host = a.listen.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(a.listen.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--listen port is not a number");
  }

  std::shared_ptr<const ss::Scanner> scanner;
  try {
    auto bundle = std::make_shared<const ss::ModelBundle>(ss::load_model(a.bundle));
    ss::AppConfig cfg = load_app_config(a.config, bundle.get());
    auto intel = make_intel(cfg, a.fixtures);
    scanner = std::make_shared<const ss::Scanner>(bundle, cfg, intel);
  } catch (const ss::Error& e) {
    std::cerr << "warning: serving without a model (" << e.what() << ")\n";
  }
  ss::ScanService service(scanner);
  int bound = service.bind(host, port);
  if (bound < 0) throw ss::Error(ss::ErrorKind::Io, "cannot listen on " + a.listen);
  std::cerr << "listening on " << host << ':' << bound << '\n';
  return service.listen_after_bind() ? kExitOk : kExitError;
}

struct GenerateArgs {
  std::string out, fixtures;
  std::size_t count = 5000;
  double malicious_fraction = 0.4, ambiguous = 0.2, coverage = 0.85;
  std::uint64_t seed = 7;
};

int run_generate(const GenerateArgs& a) {
  ss::synth::UrlCorpusOptions opts;
  opts.count = a.count;
  opts.seed = a.seed;
  opts.malicious_fraction = a.malicious_fraction;
  opts.ambiguous_fraction = a.ambiguous;
  auto samples = ss::synth::url_corpus(opts);
  ss::write_corpus(a.out, samples);
  std::size_t fixtures = 0;
  if (!a.fixtures.empty()) {
    ss::synth::FixtureOptions fo;
    fo.malicious_coverage = a.coverage;
    fo.seed = a.seed + 1;
    fixtures = ss::synth::write_intel_fixtures(samples, a.fixtures, fo);
  }
  std::cout << nlohmann::json{{"corpus", a.out}, {"samples", samples.size()}, {"fixtures", fixtures}}.dump() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Layered malicious URL and file triage"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit vectorizer, model and calibration; write a bundle");
  train_cmd->add_option("--corpus", train.corpus, "url,label corpus file")->required();
  train_cmd->add_option("--out", train.out, "Bundle output path")->required();
  train_cmd->add_option("--grid", train.grid, "Comma-separated C values");
  train_cmd->add_option("--folds", train.folds, "Cross-validation folds")->check(CLI::Range(2, 1000));
  train_cmd->add_option("--augment-rate", train.augment_rate, "Augmentation rate")->check(CLI::NonNegativeNumber);
  train_cmd->add_option("--suffix-file", train.suffix_file, "Augmentation suffixes, one per line");
  train_cmd->add_option("--seed", train.seed, "Random seed");
  train_cmd->add_option("--max-features", train.max_features, "Vocabulary cap")->check(CLI::PositiveNumber);
  train_cmd->add_option("--file-corpus", train.file_corpus, "path,label listing of binaries for the file model");

  ScanArgs scan;
  auto* scan_cmd = app.add_subcommand("scan", "Scan one URL, hash or file");
  scan_cmd->add_option("--bundle", scan.bundle, "Model bundle")->required();
  scan_cmd->add_option("--url", scan.url, "URL to scan");
  scan_cmd->add_option("--hash", scan.hash, "MD5/SHA-1/SHA-256 hex digest");
  scan_cmd->add_option("--file", scan.file, "File to scan");
  scan_cmd->add_option("--offline-fixtures", scan.fixtures, "Directory of intel response fixtures");
  scan_cmd->add_option("--config", scan.config, "JSON config file");

  EvaluateArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Evaluate a bundle on a labeled corpus");
  eval_cmd->add_option("--bundle", eval.bundle, "Model bundle")->required();
  eval_cmd->add_option("--corpus", eval.corpus, "url,label corpus file")->required();
  eval_cmd->add_flag("--baselines", eval.baselines, "Compare heuristic-only, intel-only and hybrid");
  eval_cmd->add_option("--offline-fixtures", eval.fixtures, "Directory of intel response fixtures");
  eval_cmd->add_option("--config", eval.config, "JSON config file");
  eval_cmd->add_option("--roc-out", eval.roc_out, "Write ROC points (fpr,tpr,threshold) as CSV");
  eval_cmd->add_flag("--json", eval.json, "Emit a JSON report");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP scan service");
  serve_cmd->add_option("--bundle", serve.bundle, "Model bundle")->required();
  serve_cmd->add_option("--listen", serve.listen, "HOST:PORT");
  serve_cmd->add_option("--offline-fixtures", serve.fixtures, "Directory of intel response fixtures");
  serve_cmd->add_option("--config", serve.config, "JSON config file");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a seeded synthetic URL corpus");
  gen_cmd->add_option("--out", gen.out, "Corpus output path")->required();
  gen_cmd->add_option("--count", gen.count, "Number of URLs");
  gen_cmd->add_option("--seed", gen.seed, "Random seed");
  gen_cmd->add_option("--malicious-fraction", gen.malicious_fraction)->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--ambiguous", gen.ambiguous, "Ambiguous share per class")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--fixtures", gen.fixtures, "Also write intel fixtures into this directory");
  gen_cmd->add_option("--coverage", gen.coverage, "Share of malicious URLs the fixtures flag")->check(CLI::Range(0.0, 1.0));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*train_cmd) return run_train(train);
    if (*scan_cmd) return run_scan(scan);
    if (*eval_cmd) return run_evaluate(eval);
    if (*serve_cmd) return run_serve(serve);
    if (*gen_cmd) return run_generate(gen);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitUsage;
}
