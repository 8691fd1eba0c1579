#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "winreg/estimators.hpp"
#include "winreg/optimize.hpp"
#include "winreg/problems.hpp"
#include "winreg/solver.hpp"
#include "winreg/spectral.hpp"
#include "winreg/windows.hpp"

namespace winreg {

enum class Estimator { mse, upre, gcv_decoupled, gcv_true };

std::string estimator_name(Estimator e);
Estimator parse_estimator(const std::string& name);

enum class CorpusSource { craters, mixed, manifest };

/// Flat experiment description; see README for the JSON keys.
struct ExperimentConfig {
  Index image_size = 256;
  double xi = 36.0;
  double snr_db = 10.0;
  PenaltyKind penalty = PenaltyKind::identity;
  std::vector<WindowKind> window_kinds{WindowKind::none, WindowKind::nonoverlap_linear};
  Index windows = 2;
  std::vector<Estimator> estimators{Estimator::mse, Estimator::upre, Estimator::gcv_decoupled};
  std::vector<int> r_train{8};
  CorpusSource corpus = CorpusSource::craters;
  int corpus_count = 8;  // images per split for procedural corpora
  std::string manifest;
  bool subimages = false;
  std::uint64_t seed = 1;
  SearchConfig search;
  bool estimate_sigma = false;
  std::string output_dir = "out";
  std::vector<std::string> reference_fingerprints;
  bool baseline = true;

  /// Throws ConfigError on violated invariants.
  void validate() const;
};

/// Parses a JSON document. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

enum class SplitId { train = 0, validation_1 = 1, validation_2 = 2 };
inline constexpr std::array<SplitId, 3> kSplits{SplitId::train, SplitId::validation_1, SplitId::validation_2};
std::string split_name(SplitId s);

struct Corpus {
  std::array<std::vector<Image>, 3> images;
  std::array<std::vector<std::string>, 3> labels;  // file names or procedural ids
  std::array<std::vector<std::uint64_t>, 3> seeds;  // per-image noise stream ids
  std::string fingerprint;                         // hash over every image fingerprint
  bool exact = false;                              // matches the reference fingerprints
  const std::vector<Image>& split(SplitId s) const { return images[static_cast<int>(s)]; }
};

Corpus build_corpus(const ExperimentConfig& config);

struct SplitData {
  std::vector<DataSet> sets;
  std::vector<SpectralData> spectral;
  std::vector<Eigen::VectorXd> truths;
};

/// Everything derived deterministically from a configuration: corpus, operator,
/// spectral system, noisy data, and windows for each requested kind.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  const Corpus& corpus() const { return corpus_; }
  const SpectralSystem& system() const { return *system_; }
  const ReflexiveOperator& op() const { return *op_; }
  const Image& psf() const { return psf_; }
  const SplitData& split(SplitId s) const { return splits_[static_cast<int>(s)]; }
  Index window_count(WindowKind kind) const { return kind == WindowKind::none ? 1 : config_.windows; }
  const WindowSet& windows(WindowKind kind) const;
  /// `count` copies of windows(kind), one per data set.
  std::span<const WindowSet> window_list(WindowKind kind, std::size_t count) const;
  /// Spectral MSE objective over sets [first, first + R) of a split (cached).
  const SpectralMse& mse(SplitId split, int first, int R) const;

 private:
  ExperimentConfig config_;
  Corpus corpus_;
  Image psf_;
  std::unique_ptr<ReflexiveOperator> op_;
  std::unique_ptr<SpectralSystem> system_;
  std::array<SplitData, 3> splits_;
  mutable std::mutex cache_mutex_;  // guards the two lazy caches below
  mutable std::map<WindowKind, std::vector<WindowSet>> windows_;
  mutable std::map<std::array<int, 3>, std::unique_ptr<SpectralMse>> mse_;
};

struct TraceRow {
  std::string stage;
  Eigen::VectorXd alphas;
  double value;
};

struct TrainedParams {
  Estimator estimator = Estimator::mse;
  WindowKind kind = WindowKind::none;
  int R = 1;
  ParamVector alphas;
  double objective = 0.0;
  std::vector<bool> boundary;
  std::optional<ParamVector> warm_start;
  std::vector<TraceRow> trace;
  double seconds = 0.0;  // wall-clock; never serialized, so outputs stay reproducible
};

/// Value of the objective minimized for (estimator, kind) over the sets
/// [first, first + R) of `split`.
double objective_value(const Experiment& ex, Estimator est, WindowKind kind, int R, const ParamVector& alphas,
                       SplitId split = SplitId::train, int first = 0);

TrainedParams train(const Experiment& ex, Estimator est, WindowKind kind, int R,
                    SplitId split = SplitId::train, int first = 0);

/// Runs one worker task per (R, estimator); results are ordered by R, window kind, estimator.
std::vector<TrainedParams> train_all(const Experiment& ex);

/// 100 ||x_hat - x|| / ||x||.
double percent_relative_error(const Eigen::VectorXd& x_hat, const Eigen::VectorXd& x);

struct ValidationEntry {
  TrainedParams params;
  std::array<std::vector<double>, 3> errors;  // per split; train uses the first R sets
  std::array<double, 3> mean{};
  double seconds = 0.0;  // wall-clock spent reconstructing and scoring
};

struct BaselineEntry {
  WindowKind kind = WindowKind::none;
  std::array<std::vector<double>, 3> errors;
  std::array<std::vector<ParamVector>, 3> alphas;
  std::array<double, 3> mean{};
};

struct EstimatorReport {
  std::vector<ValidationEntry> entries;
  std::vector<BaselineEntry> baselines;
  std::string corpus_fingerprint;
  bool corpus_exact = false;
};

EstimatorReport validate(const Experiment& ex, const std::vector<TrainedParams>& params);

double mean_of(const std::vector<double>& v);

/// min, q1, median, q3, max with linear interpolation between order statistics.
std::array<double, 5> five_numbers(std::vector<double> v);

}  // namespace winreg
