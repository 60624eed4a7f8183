#include "phase/pipeline.hpp"

#include <openssl/sha.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "phase/codec.hpp"
#include "phase/explain.hpp"
#include "phase/featurize.hpp"
#include "phase/model.hpp"
#include "phase/rng.hpp"
#include "phase/score.hpp"
#include "phase/synth.hpp"
#include "phase/train.hpp"
#include "phase/zeek.hpp"

namespace fs = std::filesystem;

namespace phase {

namespace {

using json = nlohmann::json;

template <typename T>
void read_key(const json& doc, const char* key, T& field) {
  if (doc.contains(key)) field = doc.at(key).get<T>();
}

const char* kKnownKeys[] = {
    "out_dir", "records", "manifest", "sequences", "codec", "model", "report", "scores",
    "input_format", "t_bins", "timezone", "conv_filters", "conv_kernel", "lstm_hidden",
    "attn_heads", "dropout", "folds", "epochs", "lr", "patience", "min_delta", "batch_size",
    "threshold", "threads", "band_confident_human", "band_likely_human", "band_ambiguous",
    "band_likely_nonhuman", "explain_method", "explain_samples", "explain_limit",
    "explain_background", "explain_timestep", "synth_profile", "synth_entities", "synth_days",
    "synth_format", "synth_start_date", "synth_active_start_min", "synth_active_end_min",
    "synth_interarrival_min_s", "synth_interarrival_max_s", "synth_beacon_period_s",
    "synth_maintenance_spike", "synth_idle_tasks_min", "synth_idle_tasks_max",
    "synth_idle_minutes", "pseudonym_key_hex", "pseudonym_salt", "seed",
};

}  // namespace

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail_usage("config: invalid JSON document");
  for (const auto& [key, value] : doc.items()) {
    (void)value;
    bool known = false;
    for (const char* k : kKnownKeys)
      if (key == k) {
        known = true;
        break;
      }
    if (!known) fail_usage("config: unknown key '" + key + "'");
  }
  PipelineConfig c;
  read_key(doc, "out_dir", c.out_dir);
  read_key(doc, "records", c.records_path);
  read_key(doc, "manifest", c.manifest_path);
  read_key(doc, "sequences", c.sequences_path);
  read_key(doc, "codec", c.codec_path);
  read_key(doc, "model", c.model_path);
  read_key(doc, "report", c.report_path);
  read_key(doc, "scores", c.scores_path);
  read_key(doc, "input_format", c.input_format);
  read_key(doc, "t_bins", c.t_bins);
  read_key(doc, "timezone", c.timezone);
  read_key(doc, "conv_filters", c.conv_filters);
  read_key(doc, "conv_kernel", c.conv_kernel);
  read_key(doc, "lstm_hidden", c.lstm_hidden);
  read_key(doc, "attn_heads", c.attn_heads);
  read_key(doc, "dropout", c.dropout);
  read_key(doc, "folds", c.folds);
  read_key(doc, "epochs", c.epochs);
  read_key(doc, "lr", c.lr);
  read_key(doc, "patience", c.patience);
  read_key(doc, "min_delta", c.min_delta);
  read_key(doc, "batch_size", c.batch_size);
  read_key(doc, "threshold", c.threshold);
  read_key(doc, "threads", c.threads);
  read_key(doc, "band_confident_human", c.band_confident_human);
  read_key(doc, "band_likely_human", c.band_likely_human);
  read_key(doc, "band_ambiguous", c.band_ambiguous);
  read_key(doc, "band_likely_nonhuman", c.band_likely_nonhuman);
  read_key(doc, "explain_method", c.explain_method);
  read_key(doc, "explain_samples", c.explain_samples);
  read_key(doc, "explain_limit", c.explain_limit);
  read_key(doc, "explain_background", c.explain_background);
  read_key(doc, "explain_timestep", c.explain_timestep);
  read_key(doc, "synth_profile", c.synth_profile);
  read_key(doc, "synth_entities", c.synth_entities);
  read_key(doc, "synth_days", c.synth_days);
  read_key(doc, "synth_format", c.synth_format);
  read_key(doc, "synth_start_date", c.synth_start_date);
  read_key(doc, "synth_active_start_min", c.synth_active_start_min);
  read_key(doc, "synth_active_end_min", c.synth_active_end_min);
  read_key(doc, "synth_interarrival_min_s", c.synth_interarrival_min_s);
  read_key(doc, "synth_interarrival_max_s", c.synth_interarrival_max_s);
  read_key(doc, "synth_beacon_period_s", c.synth_beacon_period_s);
  read_key(doc, "synth_maintenance_spike", c.synth_maintenance_spike);
  read_key(doc, "synth_idle_tasks_min", c.synth_idle_tasks_min);
  read_key(doc, "synth_idle_tasks_max", c.synth_idle_tasks_max);
  read_key(doc, "synth_idle_minutes", c.synth_idle_minutes);
  read_key(doc, "pseudonym_key_hex", c.pseudonym_key_hex);
  read_key(doc, "pseudonym_salt", c.pseudonym_salt);
  read_key(doc, "seed", c.seed);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_usage("config file not readable: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

std::string PipelineConfig::to_canonical_json() const {
  json doc;
  doc["out_dir"] = out_dir;
  doc["records"] = records_path;
  doc["manifest"] = manifest_path;
  doc["sequences"] = sequences_path;
  doc["codec"] = codec_path;
  doc["model"] = model_path;
  doc["report"] = report_path;
  doc["scores"] = scores_path;
  doc["input_format"] = input_format;
  doc["t_bins"] = t_bins;
  doc["timezone"] = timezone;
  doc["conv_filters"] = conv_filters;
  doc["conv_kernel"] = conv_kernel;
  doc["lstm_hidden"] = lstm_hidden;
  doc["attn_heads"] = attn_heads;
  doc["dropout"] = dropout;
  doc["folds"] = folds;
  doc["epochs"] = epochs;
  doc["lr"] = lr;
  doc["patience"] = patience;
  doc["min_delta"] = min_delta;
  doc["batch_size"] = batch_size;
  doc["threshold"] = threshold;
  doc["threads"] = threads;
  doc["band_confident_human"] = band_confident_human;
  doc["band_likely_human"] = band_likely_human;
  doc["band_ambiguous"] = band_ambiguous;
  doc["band_likely_nonhuman"] = band_likely_nonhuman;
  doc["explain_method"] = explain_method;
  doc["explain_samples"] = explain_samples;
  doc["explain_limit"] = explain_limit;
  doc["explain_background"] = explain_background;
  doc["explain_timestep"] = explain_timestep;
  doc["synth_profile"] = synth_profile;
  doc["synth_entities"] = synth_entities;
  doc["synth_days"] = synth_days;
  doc["synth_format"] = synth_format;
  doc["synth_start_date"] = synth_start_date;
  doc["synth_active_start_min"] = synth_active_start_min;
  doc["synth_active_end_min"] = synth_active_end_min;
  doc["synth_interarrival_min_s"] = synth_interarrival_min_s;
  doc["synth_interarrival_max_s"] = synth_interarrival_max_s;
  doc["synth_beacon_period_s"] = synth_beacon_period_s;
  doc["synth_maintenance_spike"] = synth_maintenance_spike;
  doc["synth_idle_tasks_min"] = synth_idle_tasks_min;
  doc["synth_idle_tasks_max"] = synth_idle_tasks_max;
  doc["synth_idle_minutes"] = synth_idle_minutes;
  doc["pseudonym_key_hex"] = pseudonym_key_hex;
  doc["pseudonym_salt"] = pseudonym_salt;
  doc["seed"] = seed;
  return doc.dump();
}

std::string PipelineConfig::hash() const {
  const std::string canonical = to_canonical_json();
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(canonical.data()), canonical.size(), digest);
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (int i = 0; i < 8; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

void PipelineConfig::validate() const {
  BandEdges edges{band_confident_human, band_likely_human, band_ambiguous,
                  band_likely_nonhuman};
  edges.validate();
  if (t_bins == 0 || 86400 % t_bins != 0) fail_usage("config: t_bins must divide 86,400");
  if (dropout < 0.0 || dropout >= 1.0) fail_usage("config: dropout must be in [0, 1)");
  if (folds < 2) fail_usage("config: folds must be >= 2");
  if (batch_size == 0) fail_usage("config: batch_size must be positive");
  if (threshold <= 0.0 || threshold >= 1.0) fail_usage("config: threshold must be in (0, 1)");
  if (explain_method != "kernel" && explain_method != "exact")
    fail_usage("config: explain_method must be 'kernel' or 'exact'");
  if (explain_background != "missing" && explain_background != "mean")
    fail_usage("config: explain_background must be 'missing' or 'mean'");
  if (input_format != "auto" && input_format != "tsv" && input_format != "jsonl")
    fail_usage("config: input_format must be auto, tsv, or jsonl");
  if (synth_format != "tsv" && synth_format != "jsonl")
    fail_usage("config: synth_format must be tsv or jsonl");
  parse_utc_offset(timezone);
}

namespace {

std::string default_path(const PipelineConfig& c, const std::string& explicit_path,
                         const char* filename) {
  if (!explicit_path.empty()) return explicit_path;
  return (fs::path(c.out_dir) / filename).string();
}

std::string resolve_input(const PipelineConfig& c, const std::string& explicit_path,
                          std::initializer_list<const char*> candidates,
                          const char* what, const char* flag) {
  if (!explicit_path.empty()) {
    if (!fs::exists(explicit_path))
      fail_usage(std::string(what) + " not found: " + explicit_path);
    return explicit_path;
  }
  for (const char* cand : candidates) {
    auto p = fs::path(c.out_dir) / cand;
    if (fs::exists(p)) return p.string();
  }
  fail_usage(std::string(what) + " not specified; pass " + flag +
             " or run the producing command first");
}

std::ofstream open_out(const std::string& path) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_data("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_usage("cannot read " + path);
  return in;
}

ParseResult read_records_file(const std::string& path, const std::string& format) {
  auto in = open_in(path);
  std::string fmt = format;
  if (fmt == "auto") {
    const int first = in.peek();
    fmt = first == '#' ? "tsv" : "jsonl";
  }
  return fmt == "tsv" ? parse_tsv(in) : parse_json_lines(in);
}

std::vector<LabeledExample> encode_labeled(const std::vector<DaySequence>& sequences,
                                           const FeatureCodec& codec) {
  std::vector<LabeledExample> out;
  for (const auto& s : sequences) {
    if (!s.label) continue;
    out.push_back({codec.transform(s), *s.label});
  }
  return out;
}

std::size_t effective_threads(const PipelineConfig& c) {
  if (c.threads > 0) return c.threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

TrainOptions train_options(const PipelineConfig& c, std::uint64_t seed, std::size_t threads) {
  TrainOptions t;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.lr = c.lr;
  t.min_delta = c.min_delta;
  t.patience = c.patience;
  t.threads = threads;
  t.seed = seed;
  return t;
}

PhaseModelConfig model_config(const PipelineConfig& c, std::uint64_t seed) {
  PhaseModelConfig m;
  m.t_bins = c.t_bins;
  m.features = kFeatureCount;
  m.conv_filters = c.conv_filters;
  m.conv_kernel = c.conv_kernel;
  m.lstm_hidden = c.lstm_hidden;
  m.attn_heads = c.attn_heads;
  m.dropout_rate = c.dropout;
  m.seed = seed;
  return m;
}

}  // namespace

void cmd_synth(const PipelineConfig& config) {
  SynthResult corpus;
  if (config.synth_profile == "benchmark") {
    corpus = default_benchmark(config.seed);
  } else {
    PersonaSpec spec;
    spec.profile = profile_from_name(config.synth_profile);
    spec.entities = config.synth_entities;
    spec.days = config.synth_days;
    spec.seed = config.seed;
    spec.start_date = config.synth_start_date;
    spec.active_start_min = config.synth_active_start_min;
    spec.active_end_min = config.synth_active_end_min;
    spec.interarrival_min_s = config.synth_interarrival_min_s;
    spec.interarrival_max_s = config.synth_interarrival_max_s;
    spec.beacon_period_s = config.synth_beacon_period_s;
    spec.maintenance_spike = config.synth_maintenance_spike;
    spec.idle_tasks_min = config.synth_idle_tasks_min;
    spec.idle_tasks_max = config.synth_idle_tasks_max;
    spec.idle_minutes = config.synth_idle_minutes;
    corpus = generate(spec);
  }
  const bool tsv = config.synth_format == "tsv";
  const std::string records_path =
      default_path(config, config.records_path, tsv ? "synth_records.log" : "synth_records.jsonl");
  auto out = open_out(records_path);
  if (tsv) {
    out << "#phase_meta config_hash=" << config.hash() << " seed=" << config.seed << "\n";
    write_tsv(corpus.records, out);
  } else {
    write_json_lines(corpus.records, out);
  }
  auto mout = open_out(default_path(config, config.manifest_path, "manifest.csv"));
  mout << "# config_hash=" << config.hash() << " seed=" << config.seed << "\n";
  corpus.manifest.write_csv(mout);
}

void cmd_ingest(const PipelineConfig& config) {
  const std::string input = resolve_input(config, config.records_path,
                                          {"synth_records.log", "synth_records.jsonl"},
                                          "records input", "--records");
  ParseResult parsed = read_records_file(input, config.input_format);
  if (!config.pseudonym_key_hex.empty()) {
    const auto key = PseudonymKey::from_hex(config.pseudonym_key_hex, config.pseudonym_salt);
    auto table = pseudonymize(parsed.records, key);
    auto mapping = open_out((fs::path(config.out_dir) / "pseudonym_map.csv").string());
    mapping << "# config_hash=" << config.hash() << " seed=" << config.seed << "\n";
    mapping << "address,pseudonym\n";
    for (const auto& [addr, pseud] : table) mapping << addr << ',' << pseud << '\n';
  }
  auto out = open_out((fs::path(config.out_dir) / "records.jsonl").string());
  write_json_lines(parsed.records, out);
  if (!parsed.issues.empty()) {
    auto err = open_out((fs::path(config.out_dir) / "ingest_errors.txt").string());
    for (const auto& issue : parsed.issues)
      err << "line " << issue.line << ": " << issue.message << '\n';
  }
}

void cmd_featurize(const PipelineConfig& config) {
  const std::string input =
      resolve_input(config, config.records_path,
                    {"records.jsonl", "synth_records.log", "synth_records.jsonl"},
                    "records input", "--records");
  ParseResult parsed = read_records_file(input, config.input_format);

  LabelManifest manifest;
  std::string manifest_path = config.manifest_path;
  if (manifest_path.empty()) {
    auto cand = fs::path(config.out_dir) / "manifest.csv";
    if (fs::exists(cand)) manifest_path = cand.string();
  }
  if (!manifest_path.empty()) {
    auto min = open_in(manifest_path);
    manifest = LabelManifest::read_csv(min);
  }

  FeaturizeConfig fc;
  fc.t_bins = config.t_bins;
  fc.timezone = config.timezone;
  auto result = bin_to_days(parsed.records, manifest, fc);
  auto out = open_out(default_path(config, config.sequences_path, "sequences.jsonl"));
  write_sequences(result.sequences, out);
}

void cmd_fit_codec(const PipelineConfig& config) {
  const std::string input = resolve_input(config, config.sequences_path, {"sequences.jsonl"},
                                          "sequence archive", "--sequences");
  auto in = open_in(input);
  auto sequences = read_sequences(in);
  std::vector<DaySequence> labeled;
  for (auto& s : sequences)
    if (s.label) labeled.push_back(std::move(s));
  if (labeled.empty()) fail_data("fit-codec: no labeled sequences in the archive");
  FeatureCodec codec = FeatureCodec::fit(labeled);
  auto out = open_out(default_path(config, config.codec_path, "codec.json"));
  codec.save(out, config.hash(), config.seed);
}

void cmd_train(const PipelineConfig& config) {
  const std::string seq_path = resolve_input(config, config.sequences_path, {"sequences.jsonl"},
                                             "sequence archive", "--sequences");
  const std::string codec_path = resolve_input(config, config.codec_path, {"codec.json"},
                                               "codec", "--codec");
  auto cin = open_in(codec_path);
  FeatureCodec codec = FeatureCodec::load(cin);
  auto sin = open_in(seq_path);
  auto sequences = read_sequences(sin);
  auto examples = encode_labeled(sequences, codec);
  if (examples.empty()) fail_data("train: no labeled sequences");

  const std::size_t threads = effective_threads(config);
  CrossValidateOptions cv;
  cv.k = config.folds;
  cv.threshold = config.threshold;
  cv.train = train_options(config, config.seed, 1);
  cv.parallel_folds = threads;
  TrainReport report = cross_validate(model_config(config, config.seed), examples, cv,
                                      config.seed);

  auto rout = open_out(default_path(config, config.report_path, "train_report.json"));
  rout << report.to_json(config.hash());
  auto hout = open_out((fs::path(config.out_dir) / "loss_history.csv").string());
  report.write_history_csv(hout, config.hash());

  // final model on the full labeled set, same protocol
  std::vector<int> labels;
  for (const auto& e : examples) labels.push_back(e.label);
  std::vector<std::size_t> all(examples.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const std::uint64_t final_seed = mix_seed(config.seed, 0xf1a1ull);
  auto train_idx = undersample(all, labels, final_seed);
  PhaseModel model = PhaseModel::init(model_config(config, final_seed));
  train_model(model, examples, train_idx, train_options(config, final_seed, threads));
  auto mout = open_out(default_path(config, config.model_path, "model.bin"));
  model.save(mout, config.hash(), config.seed);
}

void cmd_score(const PipelineConfig& config) {
  const std::string model_path = resolve_input(config, config.model_path, {"model.bin"},
                                               "trained model", "--model");
  const std::string codec_path = resolve_input(config, config.codec_path, {"codec.json"},
                                               "codec", "--codec");
  const std::string seq_path = resolve_input(config, config.sequences_path, {"sequences.jsonl"},
                                             "sequence archive", "--sequences");
  auto min = open_in(model_path);
  PhaseModel model = PhaseModel::load(min);
  auto cin = open_in(codec_path);
  FeatureCodec codec = FeatureCodec::load(cin);
  auto sin = open_in(seq_path);
  auto sequences = read_sequences(sin);

  BandEdges edges{config.band_confident_human, config.band_likely_human, config.band_ambiguous,
                  config.band_likely_nonhuman};
  auto scores = score_days(model, codec, sequences, edges);
  auto sout = open_out(default_path(config, config.scores_path, "scores.csv"));
  write_scores_csv(scores, sout, config.hash(), config.seed);
  auto summaries = summarize_entities(scores);
  auto jout = open_out((fs::path(config.out_dir) / "score_summary.json").string());
  jout << summaries_to_json(summaries, config.hash(), config.seed);
}

void cmd_explain(const PipelineConfig& config) {
  const std::string model_path = resolve_input(config, config.model_path, {"model.bin"},
                                               "model", "--model");
  const std::string codec_path = resolve_input(config, config.codec_path, {"codec.json"},
                                               "codec", "--codec");
  const std::string seq_path = resolve_input(config, config.sequences_path, {"sequences.jsonl"},
                                             "sequence archive", "--sequences");
  auto min = open_in(model_path);
  PhaseModel model = PhaseModel::load(min);
  auto cin = open_in(codec_path);
  FeatureCodec codec = FeatureCodec::load(cin);
  auto sin = open_in(seq_path);
  auto sequences = read_sequences(sin);
  if (sequences.empty()) fail_data("explain: empty sequence archive");

  const std::size_t limit = std::min<std::size_t>(config.explain_limit, sequences.size());
  sequences.resize(limit);

  nn::Tensor background;
  if (config.explain_background == "missing") {
    background = missing_background(codec);
  } else {
    // elementwise mean of the explained instances
    background = nn::Tensor({codec.t_bins(), kFeatureCount});
    for (const auto& s : sequences) {
      auto enc = codec.transform(s);
      for (std::size_t i = 0; i < enc.size(); ++i) background[i] += enc[i];
    }
    for (auto& v : background.data) v /= static_cast<double>(sequences.size());
  }

  const std::string config_hash = config.hash();
  const fs::path out_dir = fs::path(config.out_dir) / "explain";
  fs::create_directories(out_dir);

  std::vector<AttributionMap> attributions;
  std::vector<nn::Tensor> encoded;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& seq = sequences[i];
    auto x = codec.transform(seq);
    AttributionMap day = explain_day(model, x, background, config.explain_samples,
                                     mix_seed(config.seed, 0xda7 + i), effective_threads(config));
    day.instance_ref = seq.entity + "/" + seq.date;
    auto series = top_feature_series(day);
    auto tout = open_out((out_dir / ("topseries_" + seq.entity + "_" + seq.date + ".csv"))
                             .string());
    write_top_series_csv(series, tout, config_hash, config.seed);
    attributions.push_back(std::move(day));
    encoded.push_back(std::move(x));
  }

  auto heat = importance_heatmap(attributions);
  auto hout = open_out((out_dir / "heatmap.csv").string());
  write_heatmap_csv(heat, hout, config_hash, config.seed);
  auto svgout = open_out((out_dir / "heatmap.svg").string());
  write_heatmap_svg(heat, svgout);

  const std::size_t t = std::min<std::size_t>(config.explain_timestep, codec.t_bins() - 1);
  auto rows = beeswarm_table(attributions, encoded, codec, t);
  auto bout = open_out((out_dir / ("beeswarm_t" + std::to_string(t) + ".csv")).string());
  write_beeswarm_csv(rows, bout, config_hash, config.seed);
}

void cmd_report(const PipelineConfig& config) {
  const std::string report_path = resolve_input(config, config.report_path,
                                                {"train_report.json"}, "train report",
                                                "--report");
  const std::string scores_path = resolve_input(config, config.scores_path, {"scores.csv"},
                                                "scores CSV", "--scores");
  auto rin = open_in(report_path);
  json metrics = json::parse(rin, nullptr, false);
  if (metrics.is_discarded()) fail_data("report: train report is not valid JSON");

  auto sin = open_in(scores_path);
  json scores = json::array();
  std::map<std::string, std::size_t> histogram;
  std::string line;
  bool header_seen = false;
  while (std::getline(sin, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // entity,date,raw,reported,band
      continue;
    }
    auto cols = split_view(line, ',');
    if (cols.size() != 5) fail_data("report: malformed scores CSV row");
    json row;
    row["entity"] = std::string(cols[0]);
    row["date"] = std::string(cols[1]);
    row["raw"] = std::stod(std::string(cols[2]));
    row["reported"] = std::stod(std::string(cols[3]));
    row["band"] = std::string(cols[4]);
    scores.push_back(std::move(row));
    ++histogram[std::string(cols[4])];
  }

  json bundle;
  bundle["config_hash"] = config.hash();
  bundle["seed"] = config.seed;
  bundle["metrics"] = std::move(metrics);
  bundle["scores"] = std::move(scores);
  json hist;
  for (const auto& [band_label, count] : histogram) hist[band_label] = count;
  bundle["band_histogram"] = std::move(hist);
  auto out = open_out((fs::path(config.out_dir) / "report.json").string());
  out << bundle.dump(2) << '\n';
}

int run_command(const std::string& command, const PipelineConfig& config,
                std::string* error_message) {
  try {
    if (command == "synth") cmd_synth(config);
    else if (command == "ingest") cmd_ingest(config);
    else if (command == "featurize") cmd_featurize(config);
    else if (command == "fit-codec") cmd_fit_codec(config);
    else if (command == "train") cmd_train(config);
    else if (command == "score") cmd_score(config);
    else if (command == "explain") cmd_explain(config);
    else if (command == "report") cmd_report(config);
    else fail_usage("unknown command '" + command + "'");
    return 0;
  } catch (const PhaseError& e) {
    if (error_message) *error_message = e.what();
    return static_cast<int>(e.status());
  } catch (const std::exception& e) {
    if (error_message) *error_message = e.what();
    return static_cast<int>(Status::Data);
  }
}

}  // namespace phase
