#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "phase/common.hpp"
#include "phase/model.hpp"
#include "phase/nn/adamax.hpp"
#include "phase/nn/tensor.hpp"

namespace phase {

struct LabeledExample {
  nn::Tensor x;  // T x F, already encoded
  int label = 0;
};

struct FoldPlan {
  std::size_t k = 10;
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;  // example index -> fold id

  std::vector<std::size_t> train_indices(std::size_t fold) const;
  std::vector<std::size_t> val_indices(std::size_t fold) const;
};

// Seeded shuffle within each class, then round-robin assignment, so every
// fold's class counts stay within 1 of the ideal stratification.
FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t k, std::uint64_t seed);

// Downsample the majority class (seeded) to the minority count. Indices of
// the kept examples come back in their original relative order.
std::vector<std::size_t> undersample(const std::vector<std::size_t>& train_indices,
                                     const std::vector<int>& labels, std::uint64_t seed);

struct EarlyStopping {
  double min_delta = 0.001;
  std::size_t patience = 20;

  double best_loss = std::numeric_limits<double>::infinity();  // minimum observed
  double reference_loss = std::numeric_limits<double>::infinity();  // patience baseline
  std::size_t epochs_since_improvement = 0;
  bool snapshot_taken = false;

  // Returns true when training should stop. The caller snapshots weights
  // whenever `improved_best()` reported true for the step.
  bool update(double loss);
  bool improved_best() const { return improved_best_; }

private:
  bool improved_best_ = false;
};

struct TrainOptions {
  std::size_t epochs = 1000;
  std::size_t batch_size = 16;
  double lr = 0.001;
  double min_delta = 0.001;
  std::size_t patience = 20;
  std::size_t threads = 1;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  std::vector<double> epoch_loss;
  std::size_t stopped_epoch = 0;  // epoch count actually run
  std::size_t best_epoch = 0;     // epoch whose loss the snapshot carries
  double best_loss = std::numeric_limits<double>::infinity();
};

// Minibatch BCE training with Adamax, early stopping on the training loss,
// and best-weight restoration.
TrainHistory train_model(PhaseModel& model, const std::vector<LabeledExample>& examples,
                         const std::vector<std::size_t>& indices, const TrainOptions& options);

struct Metrics {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::optional<double> auc;  // undefined on single-class sets
};

Metrics compute_metrics(const std::vector<double>& probabilities,
                        const std::vector<int>& labels, double threshold = 0.5);

Metrics evaluate(const PhaseModel& model, const std::vector<LabeledExample>& examples,
                 const std::vector<std::size_t>& indices, double threshold = 0.5);

struct FoldReport {
  std::size_t fold = 0;
  Metrics metrics;
  std::size_t stopped_epoch = 0;
  std::vector<double> epoch_loss;
};

struct TrainReport {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<FoldReport> folds;
  Metrics mean;
  Metrics stddev;  // population std over folds

  std::string to_json(const std::string& config_hash) const;
  void write_history_csv(std::ostream& out, const std::string& config_hash) const;
};

struct CrossValidateOptions {
  std::size_t k = 10;
  double threshold = 0.5;
  TrainOptions train;
  std::size_t parallel_folds = 1;
};

TrainReport cross_validate(const PhaseModelConfig& model_config,
                           const std::vector<LabeledExample>& examples,
                           const CrossValidateOptions& options, std::uint64_t seed);

}  // namespace phase
