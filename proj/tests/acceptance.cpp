// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "phase/codec.hpp"
#include "phase/explain.hpp"
#include "phase/featurize.hpp"
#include "phase/model.hpp"
#include "phase/nn/gradcheck.hpp"
#include "phase/pipeline.hpp"
#include "phase/rng.hpp"
#include "phase/score.hpp"
#include "phase/synth.hpp"
#include "phase/train.hpp"

namespace fs = std::filesystem;
using namespace phase;
using nn::Tensor;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const char* what, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", criterion, what,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(lo, hi);
  return t;
}

// 5e-4 scale keeps the finite-difference cancellation noise (eps * |L| / 2h)
// orders of magnitude below the 1e-8 relative-error floor, so structurally
// null coordinates (the key-projection bias) compare cleanly.
double quadratic_loss(const Tensor& y, const Tensor& target) {
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i)
    acc += 5e-4 * (y[i] - target[i]) * (y[i] - target[i]);
  return acc;
}

// ---- criterion 1: gradient correctness ------------------------------------

double conv_grad_err(std::uint64_t seed) {
  Rng rng(seed);
  Tensor x = random_tensor({6, 2}, rng, -1, 1);
  Tensor k = random_tensor({3, 2, 3}, rng, -1, 1);
  Tensor b = random_tensor({3}, rng, -1, 1);
  Tensor target = random_tensor({6, 3}, rng, -1, 1);
  auto loss = [&]() { return quadratic_loss(nn::conv1d_forward(x, k, b), target); };
  auto analytic = [&]() {
    auto y = nn::conv1d_forward(x, k, b);
    Tensor dy(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 1e-3 * (y[i] - target[i]);
    Tensor dx, dk, db;
    nn::conv1d_backward(x, k, dy, dx, dk, db);
    return std::vector<Tensor>{dx, dk, db};
  };
  return nn::grad_check(loss, {&x, &k, &b}, analytic);
}

double bilstm_grad_err(std::uint64_t seed) {
  Rng rng(seed);
  auto make_lstm = [&rng](std::size_t input, std::size_t hidden) {
    nn::LstmParams p;
    p.w = random_tensor({4 * hidden, input}, rng, -0.7, 0.7);
    p.u = random_tensor({4 * hidden, hidden}, rng, -0.7, 0.7);
    p.b = random_tensor({4 * hidden}, rng, -0.3, 0.3);
    return p;
  };
  nn::BilstmParams p{make_lstm(2, 3), make_lstm(2, 3)};
  Tensor x = random_tensor({5, 2}, rng, -1, 1);
  Tensor target = random_tensor({5, 6}, rng, -1, 1);
  auto loss = [&]() { return quadratic_loss(nn::bilstm_forward(x, p, nullptr), target); };
  auto analytic = [&]() {
    nn::BilstmCache cache;
    auto y = nn::bilstm_forward(x, p, &cache);
    Tensor dy(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 1e-3 * (y[i] - target[i]);
    Tensor dx;
    nn::BilstmParams grads;
    nn::bilstm_backward(p, cache, dy, dx, grads);
    return std::vector<Tensor>{dx,          grads.fwd.w, grads.fwd.u, grads.fwd.b,
                               grads.bwd.w, grads.bwd.u, grads.bwd.b};
  };
  std::vector<Tensor*> params = {&x,       &p.fwd.w, &p.fwd.u, &p.fwd.b,
                                 &p.bwd.w, &p.bwd.u, &p.bwd.b};
  return nn::grad_check(loss, params, analytic);
}

double mha_grad_err(std::uint64_t seed) {
  Rng rng(seed);
  nn::MhaParams p;
  for (Tensor* w : {&p.wq, &p.wk, &p.wv, &p.wo}) *w = random_tensor({6, 6}, rng, -0.6, 0.6);
  for (Tensor* b : {&p.bq, &p.bk, &p.bv, &p.bo}) *b = random_tensor({6}, rng, -0.2, 0.2);
  Tensor x = random_tensor({4, 6}, rng, -1, 1);
  Tensor target = random_tensor({4, 6}, rng, -1, 1);
  auto loss = [&]() { return quadratic_loss(nn::mha_forward(x, p, 2, nullptr), target); };
  auto analytic = [&]() {
    nn::MhaCache cache;
    auto y = nn::mha_forward(x, p, 2, &cache);
    Tensor dy(y.shape);
    for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 1e-3 * (y[i] - target[i]);
    Tensor dx;
    nn::MhaParams grads;
    nn::mha_backward(p, 2, cache, dy, dx, grads);
    return std::vector<Tensor>{dx,       grads.wq, grads.bq, grads.wk, grads.bk,
                               grads.wv, grads.bv, grads.wo, grads.bo};
  };
  std::vector<Tensor*> params = {&x, &p.wq, &p.bq, &p.wk, &p.bk, &p.wv, &p.bv, &p.wo, &p.bo};
  return nn::grad_check(loss, params, analytic);
}

double dense_bce_grad_err(std::uint64_t seed) {
  Rng rng(seed);
  Tensor x = random_tensor({4}, rng, -1, 1);
  Tensor w = random_tensor({4, 1}, rng, -1, 1);
  Tensor b = random_tensor({1}, rng, -0.5, 0.5);
  const double y = rng.uniform() < 0.5 ? 0.0 : 1.0;
  auto forward = [&]() {
    auto logit = nn::dense_forward(x, w, b);
    return nn::sigmoid(logit[0]);
  };
  auto loss = [&]() {
    const double p = forward();
    return 1e-3 * nn::bce_loss(&p, &y, 1);
  };
  auto analytic = [&]() {
    auto logit = nn::dense_forward(x, w, b);
    const double p = nn::sigmoid(logit[0]);
    double dp = 0.0;
    nn::bce_backward(&p, &y, 1, &dp);
    Tensor dlogit({1});
    dlogit[0] = nn::sigmoid_backward(p, dp * 1e-3);
    Tensor dx, dw, db;
    nn::dense_backward(x, w, dlogit, dx, dw, db);
    return std::vector<Tensor>{dx, dw, db};
  };
  return nn::grad_check(loss, {&x, &w, &b}, analytic);
}

double full_model_grad_err(std::uint64_t seed) {
  PhaseModelConfig cfg;
  cfg.t_bins = 8;
  cfg.features = 4;
  cfg.conv_filters = 4;
  cfg.conv_kernel = 3;
  cfg.lstm_hidden = 4;
  cfg.attn_heads = 2;
  cfg.dropout_rate = 0.2;
  cfg.seed = seed;
  auto model = PhaseModel::init(cfg);
  Rng rng(mix_seed(seed, 0xabc));
  Tensor x = random_tensor({8, 4}, rng, 0.0, 1.0);
  const double y = 1.0;
  const std::uint64_t fwd_seed = mix_seed(seed, 0xdef);
  auto loss = [&]() {
    const double p = model.forward(x, nn::Mode::Train, fwd_seed);
    return 1e-3 * nn::bce_loss(&p, &y, 1);
  };
  auto analytic = [&]() {
    ModelCache cache;
    const double p = model.forward(x, nn::Mode::Train, fwd_seed, &cache);
    double dp = 0.0;
    nn::bce_backward(&p, &y, 1, &dp);
    return model.backward(cache, dp * 1e-3);
  };
  return nn::grad_check(loss, model.params(), analytic);
}

void criterion_1() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string worst_op = "none";
  auto track = [&](const char* op, double err) {
    if (err > worst) {
      worst = err;
      worst_op = op;
    }
  };
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    track("conv1d", conv_grad_err(seed));
    track("bilstm", bilstm_grad_err(seed * 7));
    track("multi_head_attention", mha_grad_err(seed * 13));
    track("dense+bce", dense_bce_grad_err(seed * 19));
    track("full_model", full_model_grad_err(seed * 23));
  }
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "max rel err " << worst << " at " << worst_op << ", " << elapsed << " s";
  report(1, "gradient correctness <= 1e-4 over 5 seeds, < 60 s", worst <= 1e-4 && elapsed < 60.0,
         detail.str());
}

// ---- criteria 2 and 3: benchmark cross-validation and persona ordering ----

struct BenchmarkArtifacts {
  FeatureCodec codec;
  PhaseModel model;
  bool trained = false;
};

PhaseModelConfig benchmark_model_config(std::uint64_t seed) {
  PhaseModelConfig mc;
  mc.t_bins = kBenchmarkTBins;
  mc.features = kFeatureCount;
  mc.conv_filters = 16;
  mc.conv_kernel = 3;
  mc.lstm_hidden = 16;
  mc.attn_heads = 2;
  mc.dropout_rate = 0.2;
  mc.seed = seed;
  return mc;
}

BenchmarkArtifacts criterion_2() {
  const auto start = Clock::now();
  const std::uint64_t seed = 20250303;
  BenchmarkArtifacts artifacts{FeatureCodec{}, PhaseModel{}, false};

  auto corpus = default_benchmark(seed);
  auto featurized = bin_to_days(corpus.records, corpus.manifest, {kBenchmarkTBins, "UTC"});
  std::vector<DaySequence> labeled;
  for (auto& s : featurized.sequences)
    if (s.label) labeled.push_back(std::move(s));
  if (labeled.size() != 160) {
    report(2, "benchmark cross-validation", false,
           "expected 160 labeled entity-days, got " + std::to_string(labeled.size()));
    return artifacts;
  }
  artifacts.codec = FeatureCodec::fit(labeled);
  std::vector<LabeledExample> examples;
  for (const auto& s : labeled) examples.push_back({artifacts.codec.transform(s), *s.label});

  CrossValidateOptions cv;
  cv.k = 10;
  cv.threshold = 0.5;
  cv.train.epochs = 1000;
  cv.train.batch_size = 16;
  cv.train.lr = 0.001;
  cv.train.patience = 20;
  cv.train.min_delta = 0.001;
  cv.parallel_folds = std::max(1u, std::thread::hardware_concurrency());
  auto report_cv = cross_validate(benchmark_model_config(seed), examples, cv, seed);

  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "mean accuracy " << report_cv.mean.accuracy << ", mean balanced accuracy "
         << report_cv.mean.balanced_accuracy << ", " << elapsed << " s";
  const bool ok = report_cv.mean.accuracy >= 0.90 && report_cv.mean.balanced_accuracy >= 0.90 &&
                  elapsed <= 900.0;
  report(2, "benchmark 10-fold CV accuracy and balanced accuracy >= 0.90", ok, detail.str());

  // final model under the same protocol for criterion 3
  std::vector<int> labels;
  for (const auto& e : examples) labels.push_back(e.label);
  std::vector<std::size_t> all(examples.size());
  std::iota(all.begin(), all.end(), 0);
  const std::uint64_t final_seed = mix_seed(seed, 0xf1a1ull);
  auto train_idx = undersample(all, labels, final_seed);
  artifacts.model = PhaseModel::init(benchmark_model_config(final_seed));
  TrainOptions topts = cv.train;
  topts.seed = final_seed;
  topts.threads = std::max(1u, std::thread::hardware_concurrency());
  train_model(artifacts.model, examples, train_idx, topts);
  artifacts.trained = true;
  return artifacts;
}

void criterion_3(const BenchmarkArtifacts& artifacts) {
  if (!artifacts.trained) {
    report(3, "persona ordering", false, "no trained model from criterion 2");
    return;
  }
  auto mean_persona_score = [&](PersonaProfile profile, std::uint64_t seed) {
    PersonaSpec spec;
    spec.profile = profile;
    spec.entities = 6;
    spec.days = 4;
    spec.seed = seed;
    auto corpus = generate(spec);
    auto featurized = bin_to_days(corpus.records, corpus.manifest, {kBenchmarkTBins, "UTC"});
    auto scores = score_days(artifacts.model, artifacts.codec, featurized.sequences);
    double sum = 0.0;
    for (const auto& s : scores) sum += s.reported;
    return sum / static_cast<double>(scores.size());
  };
  const double default_mean = mean_persona_score(PersonaProfile::PersonaDefault, 404);
  const double enhanced_mean = mean_persona_score(PersonaProfile::PersonaEnhanced, 405);
  std::ostringstream detail;
  detail << "default mean " << default_mean << ", enhanced mean " << enhanced_mean
         << ", margin " << (enhanced_mean - default_mean);
  const bool ok = enhanced_mean - default_mean >= 0.05 && default_mean < 0.5;
  report(3, "enhanced persona outscores default by >= 0.05, default < 0.5", ok, detail.str());
}

// ---- criterion 4: Shapley exactness ----------------------------------------

void criterion_4() {
  bool ok = true;
  std::ostringstream detail;

  // P=3 toy game vs brute-force coalition oracle
  ValueFunction toy = [](const std::vector<bool>& z) {
    double x = z[0] ? 1.0 : 0.0, y = z[1] ? 1.0 : 0.0, w = z[2] ? 1.0 : 0.0;
    return 1.5 * x - 0.75 * y + 0.5 * x * w + 0.2;
  };
  auto exact3 = shapley_exact_game(toy, 3);
  auto fact = [](std::size_t n) {
    double r = 1;
    for (std::size_t i = 2; i <= n; ++i) r *= static_cast<double>(i);
    return r;
  };
  double worst_oracle = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    double phi = 0.0;
    for (std::uint32_t mask = 0; mask < 8; ++mask) {
      if (mask & (1u << i)) continue;
      std::vector<bool> without(3), with(3);
      std::size_t s = 0;
      for (std::size_t j = 0; j < 3; ++j)
        if (mask & (1u << j)) {
          without[j] = with[j] = true;
          ++s;
        }
      with[i] = true;
      phi += fact(s) * fact(3 - s - 1) / fact(3) * (toy(with) - toy(without));
    }
    worst_oracle = std::max(worst_oracle, std::fabs(phi - exact3.group_phi[i]));
  }
  ok = ok && worst_oracle <= 1e-10;
  detail << "P=3 oracle gap " << worst_oracle;

  // efficiency
  const double total3 = std::accumulate(exact3.group_phi.begin(), exact3.group_phi.end(), 0.0);
  const double eff_gap = std::fabs(exact3.base_value + total3 - toy({true, true, true}));
  ok = ok && eff_gap <= 1e-8;
  detail << ", efficiency gap " << eff_gap;

  // null player and symmetry axioms
  ValueFunction axiom_game = [](const std::vector<bool>& z) {
    return (z[0] || z[1]) ? 2.0 : 0.0;  // player 2 is null, 0 and 1 symmetric
  };
  auto axiom = shapley_exact_game(axiom_game, 3);
  const double null_gap = std::fabs(axiom.group_phi[2]);
  const double sym_gap = std::fabs(axiom.group_phi[0] - axiom.group_phi[1]);
  ok = ok && null_gap <= 1e-8 && sym_gap <= 1e-8;
  detail << ", null " << null_gap << ", symmetry " << sym_gap;

  // kernel vs exact within 0.05 per player on P <= 10 at 8 * 2^P samples
  double worst_kernel = 0.0;
  for (std::size_t players : {6ul, 10ul}) {
    Rng rng(players);
    std::vector<double> weights(players);
    for (auto& w : weights) w = rng.uniform(-1.5, 1.5);
    ValueFunction game = [&](const std::vector<bool>& z) {
      double acc = 0.1;
      for (std::size_t i = 0; i < players; ++i)
        if (z[i]) acc += weights[i];
      if (z[0] && z[players - 1]) acc += 0.9;
      return std::tanh(acc);
    };
    auto exact = shapley_exact_game(game, players);
    auto kernel = kernel_shap_game(game, players, (1ull << players) * 8, 1234);
    for (std::size_t i = 0; i < players; ++i)
      worst_kernel = std::max(worst_kernel,
                              std::fabs(kernel.group_phi[i] - exact.group_phi[i]));
  }
  ok = ok && worst_kernel <= 0.05;
  detail << ", kernel-vs-exact " << worst_kernel;

  report(4, "Shapley exactness, axioms, and kernel agreement", ok, detail.str());
}

// ---- criterion 5: scaling contract -----------------------------------------

void criterion_5() {
  DaySequence seq;
  seq.entity = "e";
  seq.date = "2025-03-03";
  seq.label = 1;
  MinuteRow row;
  row[15] = 247192000.0;  // regression anchor for the scaling contract
  row[16] = 1.0;
  seq.rows = {row, MinuteRow{}};  // missing row brings the -1 fill into range
  auto codec = FeatureCodec::fit({seq});

  const bool exact_ends = codec.scale(15, -1.0) == 0.0 && codec.scale(15, 247192000.0) == 1.0 &&
                          codec.range_min(15) == -1.0 && codec.range_max(15) == 247192000.0;

  std::ostringstream buf;
  codec.save(buf);
  std::istringstream in(buf.str());
  auto loaded = FeatureCodec::load(in);
  const auto before = codec.transform(seq);
  const auto after = loaded.transform(seq);
  const bool round_trip = before == after && loaded == codec;

  std::ostringstream detail;
  detail << "scale(-1)=" << codec.scale(15, -1.0) << ", scale(max)=" << codec.scale(15, 247192000.0)
         << ", round trip " << (round_trip ? "bit-identical" : "MISMATCH");
  report(5, "[-1, 247192000] scales to exact [0, 1]; codec round trip bit-identical",
         exact_ends && round_trip, detail.str());
}

// ---- criterion 6: training-protocol conformance -----------------------------

void criterion_6() {
  bool ok = true;
  std::ostringstream detail;

  // stratification within 1 of ideal per class (37/10 and 85/10 per fold)
  std::vector<int> labels(37, 1);
  labels.insert(labels.end(), 85, 0);
  auto plan = stratified_kfold(labels, 10, 555);
  bool stratified = true;
  for (std::size_t fold = 0; fold < 10; ++fold) {
    double humans = 0, nonhumans = 0;
    for (auto i : plan.val_indices(fold)) (labels[i] == 1 ? humans : nonhumans) += 1;
    if (std::fabs(humans - 3.7) > 1.0 || std::fabs(nonhumans - 8.5) > 1.0) stratified = false;
  }
  ok = ok && stratified;
  detail << "stratification gap <= 1: " << (stratified ? "yes" : "no");

  // undersampling balance
  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), 0);
  auto balanced = undersample(all, labels, 777);
  std::ptrdiff_t pos = 0, neg = 0;
  for (auto i : balanced) (labels[i] == 1 ? pos : neg) += 1;
  ok = ok && std::abs(pos - neg) <= 1;
  detail << ", undersample diff " << std::abs(pos - neg);

  // early stopping on a scripted trace: last improvement at epoch 5
  EarlyStopping stop;
  stop.min_delta = 0.001;
  stop.patience = 20;
  std::vector<double> trace = {1.0, 0.9, 0.8, 0.7, 0.6, 0.5};
  trace.insert(trace.end(), 60, 0.4995);  // one sub-threshold improvement, then flat
  int stopped_at = -1;
  for (std::size_t e = 0; e < trace.size(); ++e)
    if (stop.update(trace[e])) {
      stopped_at = static_cast<int>(e);
      break;
    }
  // epochs 0..5 improve by 0.1 each; epoch 6 improves 0.0005 (below
  // min_delta, snapshot only); flat afterwards. Last qualifying improvement
  // is epoch 5, so the stop fires exactly 20 epochs later.
  ok = ok && stopped_at == 25;
  detail << ", early stop epoch " << stopped_at << " (want 25)";

  // restored weights carry the minimum recorded loss
  ok = ok && stop.best_loss == 0.4995;
  detail << ", best tracked loss " << stop.best_loss;

  // and on a real training run the snapshot loss is the history minimum
  Rng rng(99);
  std::vector<LabeledExample> toy;
  for (int i = 0; i < 12; ++i) {
    Tensor x({8, 4});
    for (auto& v : x.data) v = i < 6 ? rng.uniform(0.6, 1.0) : rng.uniform(0.0, 0.4);
    toy.push_back({std::move(x), i < 6 ? 1 : 0});
  }
  std::vector<std::size_t> idx(toy.size());
  std::iota(idx.begin(), idx.end(), 0);
  PhaseModelConfig mc;
  mc.t_bins = 8;
  mc.features = 4;
  mc.conv_filters = 4;
  mc.conv_kernel = 3;
  mc.lstm_hidden = 4;
  mc.attn_heads = 2;
  mc.seed = 5;
  auto model = PhaseModel::init(mc);
  TrainOptions topts;
  topts.epochs = 30;
  topts.batch_size = 4;
  topts.seed = 31;
  auto hist = train_model(model, toy, idx, topts);
  bool restored_min = true;
  for (double l : hist.epoch_loss)
    if (hist.best_loss > l) restored_min = false;
  ok = ok && restored_min;
  detail << ", restored loss <= all epochs: " << (restored_min ? "yes" : "no");

  report(6, "training protocol: stratification, balance, early stop, restoration", ok,
         detail.str());
}

// ---- criterion 7: end-to-end determinism ------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void criterion_7() {
  const fs::path dir = fs::temp_directory_path() / "phase_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const std::string cfg =
      "{\"out_dir\":\"" + dir.string() +
      "\",\"seed\":4242,\"t_bins\":96,\"synth_profile\":\"benchmark\",\"synth_entities\":4,"
      "\"synth_days\":3,\"folds\":2,\"epochs\":12,\"conv_filters\":4,\"lstm_hidden\":4,"
      "\"attn_heads\":2,\"batch_size\":4,\"explain_limit\":2,\"explain_samples\":36,"
      "\"explain_timestep\":40,\"threads\":2}";

  auto run_pipeline = [&]() {
    std::string err;
    for (const char* command : {"synth", "featurize", "fit-codec", "train", "score", "explain"}) {
      if (run_command(command, PipelineConfig::from_json_text(cfg), &err) != 0)
        return std::string("command ") + command + " failed: " + err;
    }
    return std::string();
  };

  auto failure = run_pipeline();
  if (!failure.empty()) {
    report(7, "pipeline determinism", false, failure);
    return;
  }
  const auto report1 = slurp(dir / "train_report.json");
  const auto scores1 = slurp(dir / "scores.csv");
  const auto heatmap1 = slurp(dir / "explain" / "heatmap.csv");
  const auto beeswarm1 = slurp(dir / "explain" / "beeswarm_t40.csv");

  failure = run_pipeline();
  if (!failure.empty()) {
    report(7, "pipeline determinism", false, failure);
    return;
  }
  const bool identical = report1 == slurp(dir / "train_report.json") &&
                         scores1 == slurp(dir / "scores.csv") &&
                         heatmap1 == slurp(dir / "explain" / "heatmap.csv") &&
                         beeswarm1 == slurp(dir / "explain" / "beeswarm_t40.csv");
  std::ostringstream detail;
  detail << "TrainReport " << report1.size() << " B, scores " << scores1.size()
         << " B, attribution exports " << (heatmap1.size() + beeswarm1.size()) << " B "
         << (identical ? "byte-identical across reruns" : "DIFFER");
  report(7, "identical config and seed reproduce artifacts byte for byte",
         identical && !report1.empty() && !scores1.empty(), detail.str());
  fs::remove_all(dir);
}

// ---- criterion 8: banding function ------------------------------------------

void criterion_8() {
  bool total = true, monotone = true;
  Band previous = Band::ConfidentNonHuman;
  std::size_t counts[5] = {0, 0, 0, 0, 0};
  for (int i = 10; i <= 990; ++i) {
    const double s = static_cast<double>(i) / 1000.0;
    Band b;
    try {
      b = band(s);
    } catch (const PhaseError&) {
      total = false;
      break;
    }
    counts[static_cast<int>(b)] += 1;
    if (static_cast<int>(b) < static_cast<int>(previous)) monotone = false;
    previous = b;
  }
  bool covered = true;
  for (auto c : counts) covered = covered && c > 0;  // every band non-empty on the grid

  const bool spots = band(0.85) == Band::ConfidentHuman && band(0.31) == Band::LikelyNonHuman &&
                     band(0.50) == Band::Ambiguous;
  std::ostringstream detail;
  detail << "grid points " << (990 - 10 + 1) << ", total " << (total ? "yes" : "no")
         << ", monotone " << (monotone ? "yes" : "no") << ", all bands hit "
         << (covered ? "yes" : "no") << ", spot values " << (spots ? "ok" : "WRONG");
  report(8, "banding: total coverage, non-overlap, monotone, spot values",
         total && monotone && covered && spots, detail.str());
}

}  // namespace

int main() {
  const auto start = Clock::now();
  std::printf("PHASE acceptance suite\n");

  criterion_1();
  auto artifacts = criterion_2();
  criterion_3(artifacts);
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();

  std::printf("%d/8 criteria passed in %.1f s\n", 8 - g_failures, seconds_since(start));
  return g_failures;
}
