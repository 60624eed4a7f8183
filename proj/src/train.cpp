#include "phase/train.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <numeric>
#include <ostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "phase/common.hpp"
#include "phase/nn/ops.hpp"
#include "phase/rng.hpp"

namespace phase {

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] != fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldPlan::val_indices(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < assignments.size(); ++i)
    if (assignments[i] == fold) out.push_back(i);
  return out;
}

FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) fail_usage("stratified k-fold requires k >= 2");
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < labels.size(); ++i) (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.size() < k || neg.size() < k)
    fail_data("stratified k-fold: every class needs at least k members (have " +
              std::to_string(pos.size()) + " human, " + std::to_string(neg.size()) +
              " non-human, k=" + std::to_string(k) + ")");

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.assignments.assign(labels.size(), 0);
  Rng rng(mix_seed(seed, 0xf01d5ull));
  for (auto* cls : {&pos, &neg}) {
    rng.shuffle(*cls);
    for (std::size_t i = 0; i < cls->size(); ++i) plan.assignments[(*cls)[i]] = i % k;
  }
  return plan;
}

std::vector<std::size_t> undersample(const std::vector<std::size_t>& train_indices,
                                     const std::vector<int>& labels, std::uint64_t seed) {
  std::vector<std::size_t> pos, neg;
  for (auto i : train_indices) (labels[i] == 1 ? pos : neg).push_back(i);
  if (pos.empty() || neg.empty()) fail_data("undersample: both classes must be present");
  auto& majority = pos.size() > neg.size() ? pos : neg;
  const std::size_t target = std::min(pos.size(), neg.size());
  if (majority.size() > target) {
    Rng rng(mix_seed(seed, 0x5a3bb1ull));
    std::vector<std::size_t> order(majority.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    order.resize(target);
    std::sort(order.begin(), order.end());
    std::vector<std::size_t> kept;
    kept.reserve(target);
    for (auto o : order) kept.push_back(majority[o]);
    majority = std::move(kept);
  }
  std::vector<std::size_t> out;
  out.reserve(pos.size() + neg.size());
  // keep the original relative order
  std::size_t pi = 0, ni = 0;
  for (auto i : train_indices) {
    if (pi < pos.size() && pos[pi] == i) {
      out.push_back(i);
      ++pi;
    } else if (ni < neg.size() && neg[ni] == i) {
      out.push_back(i);
      ++ni;
    }
  }
  return out;
}

bool EarlyStopping::update(double loss) {
  improved_best_ = loss < best_loss;
  if (improved_best_) best_loss = loss;
  if (reference_loss - loss >= min_delta) {
    reference_loss = loss;
    epochs_since_improvement = 0;
  } else {
    ++epochs_since_improvement;
  }
  return epochs_since_improvement >= patience;
}

namespace {

struct SampleGrad {
  std::vector<nn::Tensor> grads;
  double loss = 0.0;
};

SampleGrad sample_gradient(const PhaseModel& model, const LabeledExample& ex,
                           std::uint64_t forward_seed, double inv_batch) {
  SampleGrad out;
  ModelCache cache;
  const double p = model.forward(ex.x, nn::Mode::Train, forward_seed, &cache);
  const double y = static_cast<double>(ex.label);
  out.loss = nn::bce_loss(&p, &y, 1);
  double dp = 0.0;
  nn::bce_backward(&p, &y, 1, &dp);
  out.grads = model.backward(cache, dp * inv_batch);
  return out;
}

}  // namespace

TrainHistory train_model(PhaseModel& model, const std::vector<LabeledExample>& examples,
                         const std::vector<std::size_t>& indices, const TrainOptions& options) {
  if (indices.empty()) fail_data("training requires a non-empty training set");
  TrainHistory history;
  nn::AdamaxState opt;
  opt.lr = options.lr;
  auto params = model.params();

  EarlyStopping stop;
  stop.min_delta = options.min_delta;
  stop.patience = options.patience;
  std::vector<nn::Tensor> best_snapshot;

  Rng shuffle_rng(mix_seed(options.seed, 0x5bafull));
  std::vector<std::size_t> order(indices);

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;

    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t end = std::min(order.size(), start + options.batch_size);
      const std::size_t batch = end - start;
      const double inv_batch = 1.0 / static_cast<double>(batch);

      std::vector<SampleGrad> sample_grads(batch);
      auto worker = [&](std::size_t b) {
        const std::size_t idx = order[start + b];
        const std::uint64_t fwd_seed = mix_seed(mix_seed(options.seed, epoch), idx);
        sample_grads[b] = sample_gradient(model, examples[idx], fwd_seed, inv_batch);
      };
      if (options.threads > 1 && batch > 1) {
        std::vector<std::future<void>> futures;
        std::atomic<std::size_t> next{0};
        const std::size_t workers = std::min(options.threads, batch);
        for (std::size_t w = 0; w < workers; ++w)
          futures.push_back(std::async(std::launch::async, [&]() {
            for (std::size_t b = next.fetch_add(1); b < batch; b = next.fetch_add(1)) worker(b);
          }));
        for (auto& f : futures) f.get();
      } else {
        for (std::size_t b = 0; b < batch; ++b) worker(b);
      }

      // deterministic reduction in sample order
      std::vector<nn::Tensor> total = std::move(sample_grads[0].grads);
      double batch_loss = sample_grads[0].loss;
      for (std::size_t b = 1; b < batch; ++b) {
        for (std::size_t gi = 0; gi < total.size(); ++gi) {
          const auto& src = sample_grads[b].grads[gi];
          auto& dst = total[gi];
          for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
        batch_loss += sample_grads[b].loss;
      }
      batch_loss *= inv_batch;
      if (!std::isfinite(batch_loss)) fail_numeric("training loss became non-finite");

      nn::adamax_step(params, total, opt);
      epoch_loss += batch_loss * static_cast<double>(batch);
    }
    epoch_loss /= static_cast<double>(order.size());
    history.epoch_loss.push_back(epoch_loss);

    const bool should_stop = stop.update(epoch_loss);
    if (stop.improved_best()) {
      best_snapshot.clear();
      for (auto* p : params) best_snapshot.push_back(*p);
      history.best_epoch = epoch;
      history.best_loss = epoch_loss;
    }
    if (should_stop) break;
  }
  history.stopped_epoch = history.epoch_loss.size();

  if (!best_snapshot.empty()) {
    for (std::size_t i = 0; i < params.size(); ++i) *params[i] = best_snapshot[i];
  }
  return history;
}

Metrics compute_metrics(const std::vector<double>& probabilities,
                        const std::vector<int>& labels, double threshold) {
  if (probabilities.size() != labels.size() || labels.empty())
    fail_data("metrics: labels and probabilities must align and be non-empty");
  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = probabilities[i] >= threshold;
    if (labels[i] == 1) (pred ? tp : fn) += 1;
    else (pred ? fp : tn) += 1;
  }
  const std::size_t pos = tp + fn, neg = tn + fp;
  Metrics m;
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(labels.size());
  const double tpr = pos ? static_cast<double>(tp) / static_cast<double>(pos) : 0.0;
  const double tnr = neg ? static_cast<double>(tn) / static_cast<double>(neg) : 0.0;
  if (pos && neg) m.balanced_accuracy = 0.5 * (tpr + tnr);
  else m.balanced_accuracy = pos ? tpr : tnr;
  m.precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall = tpr;
  m.f1 = (m.precision + m.recall) > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;

  if (pos && neg) {
    // Mann-Whitney with midpoint ranks == trapezoidal ROC integration
    std::vector<std::size_t> idx(labels.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return probabilities[a] < probabilities[b];
    });
    std::vector<double> rank(labels.size());
    std::size_t i = 0;
    while (i < idx.size()) {
      std::size_t j = i;
      while (j + 1 < idx.size() &&
             probabilities[idx[j + 1]] == probabilities[idx[i]])
        ++j;
      const double mid = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based midpoint
      for (std::size_t r = i; r <= j; ++r) rank[idx[r]] = mid;
      i = j + 1;
    }
    double pos_rank_sum = 0.0;
    for (std::size_t r = 0; r < labels.size(); ++r)
      if (labels[r] == 1) pos_rank_sum += rank[r];
    const double n1 = static_cast<double>(pos), n0 = static_cast<double>(neg);
    m.auc = (pos_rank_sum - n1 * (n1 + 1.0) / 2.0) / (n1 * n0);
  }
  return m;
}

Metrics evaluate(const PhaseModel& model, const std::vector<LabeledExample>& examples,
                 const std::vector<std::size_t>& indices, double threshold) {
  if (indices.empty()) fail_data("evaluate: empty evaluation set");
  std::vector<double> probs;
  std::vector<int> labels;
  probs.reserve(indices.size());
  for (auto i : indices) {
    probs.push_back(model.forward(examples[i].x, nn::Mode::Infer, 0));
    labels.push_back(examples[i].label);
  }
  return compute_metrics(probs, labels, threshold);
}

namespace {

void aggregate(TrainReport& report) {
  const auto n = static_cast<double>(report.folds.size());
  auto mean_of = [&](auto getter) {
    double s = 0.0;
    for (const auto& f : report.folds) s += getter(f.metrics);
    return s / n;
  };
  auto std_of = [&](auto getter, double mean) {
    double s = 0.0;
    for (const auto& f : report.folds) {
      const double d = getter(f.metrics) - mean;
      s += d * d;
    }
    return std::sqrt(s / n);
  };
#define PHASE_AGG(field, getter)                     \
  report.mean.field = mean_of(getter);               \
  report.stddev.field = std_of(getter, report.mean.field)
  PHASE_AGG(accuracy, [](const Metrics& m) { return m.accuracy; });
  PHASE_AGG(balanced_accuracy, [](const Metrics& m) { return m.balanced_accuracy; });
  PHASE_AGG(precision, [](const Metrics& m) { return m.precision; });
  PHASE_AGG(recall, [](const Metrics& m) { return m.recall; });
  PHASE_AGG(f1, [](const Metrics& m) { return m.f1; });
#undef PHASE_AGG
  std::size_t auc_defined = 0;
  double auc_sum = 0.0, auc_sq = 0.0;
  for (const auto& f : report.folds)
    if (f.metrics.auc) {
      ++auc_defined;
      auc_sum += *f.metrics.auc;
    }
  if (auc_defined == report.folds.size()) {
    const double mean = auc_sum / n;
    for (const auto& f : report.folds) {
      const double d = *f.metrics.auc - mean;
      auc_sq += d * d;
    }
    report.mean.auc = mean;
    report.stddev.auc = std::sqrt(auc_sq / n);
  }
}

nlohmann::json metrics_json(const Metrics& m) {
  nlohmann::json j;
  j["accuracy"] = m.accuracy;
  j["balanced_accuracy"] = m.balanced_accuracy;
  j["precision"] = m.precision;
  j["recall"] = m.recall;
  j["f1"] = m.f1;
  if (m.auc) j["auc"] = *m.auc;
  else j["auc"] = "undefined";
  return j;
}

}  // namespace

std::string TrainReport::to_json(const std::string& config_hash) const {
  nlohmann::json doc;
  doc["config_hash"] = config_hash;
  doc["seed"] = seed;
  doc["k"] = k;
  nlohmann::json folds_json = nlohmann::json::array();
  for (const auto& f : folds) {
    nlohmann::json fj;
    fj["fold"] = f.fold;
    fj["metrics"] = metrics_json(f.metrics);
    fj["stopped_epoch"] = f.stopped_epoch;
    folds_json.push_back(std::move(fj));
  }
  doc["folds"] = std::move(folds_json);
  doc["mean"] = metrics_json(mean);
  doc["std"] = metrics_json(stddev);
  return doc.dump(2) + "\n";
}

void TrainReport::write_history_csv(std::ostream& out, const std::string& config_hash) const {
  out << "# config_hash=" << config_hash << " seed=" << seed << "\n";
  out << "epoch,fold,loss\n";
  for (const auto& f : folds) {
    for (std::size_t e = 0; e < f.epoch_loss.size(); ++e)
      out << e << ',' << f.fold << ',' << format_double(f.epoch_loss[e]) << '\n';
  }
}

TrainReport cross_validate(const PhaseModelConfig& model_config,
                           const std::vector<LabeledExample>& examples,
                           const CrossValidateOptions& options, std::uint64_t seed) {
  std::vector<int> labels;
  labels.reserve(examples.size());
  for (const auto& e : examples) labels.push_back(e.label);
  const FoldPlan plan = stratified_kfold(labels, options.k, seed);

  TrainReport report;
  report.k = options.k;
  report.seed = seed;
  report.folds.resize(options.k);

  auto run_fold = [&](std::size_t fold) {
    const auto val = plan.val_indices(fold);
    auto train_idx = plan.train_indices(fold);
    // leakage guard
    for (auto v : val)
      for (auto t : train_idx)
        if (v == t) fail_data("cross-validation leakage: index in both sets");
    const std::uint64_t fold_seed = mix_seed(seed, 0xc5 + fold);
    train_idx = undersample(train_idx, labels, fold_seed);

    PhaseModelConfig cfg = model_config;
    cfg.seed = mix_seed(fold_seed, 0x1417ull);
    PhaseModel model = PhaseModel::init(cfg);
    TrainOptions topts = options.train;
    topts.seed = fold_seed;
    const TrainHistory hist = train_model(model, examples, train_idx, topts);

    FoldReport fr;
    fr.fold = fold;
    fr.metrics = evaluate(model, examples, val, options.threshold);
    fr.stopped_epoch = hist.stopped_epoch;
    fr.epoch_loss = hist.epoch_loss;
    report.folds[fold] = std::move(fr);
  };

  if (options.parallel_folds > 1) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(options.k);
    const std::size_t workers = std::min(options.parallel_folds, options.k);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&]() {
        for (std::size_t f = next.fetch_add(1); f < options.k; f = next.fetch_add(1)) {
          try {
            run_fold(f);
          } catch (...) {
            errors[f] = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t f = 0; f < options.k; ++f) run_fold(f);
  }

  aggregate(report);
  return report;
}

}  // namespace phase
