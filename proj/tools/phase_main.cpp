// phase: command-line front end for the PHASE toolkit. All work happens in
// libphase behind the C API; this binary only assembles the configuration
// document and dispatches the command.

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "phase/phase.h"

namespace {

std::string json_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size() + 2);
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Minimal flat-JSON assembly: the config document has only string and
// numeric values, so no JSON library is needed on this side of the API.
// Command-line overrides are appended after the file body; the parser in
// libphase keeps the last occurrence of a duplicated key, so they win.
class ConfigDoc {
public:
  void set_string(const std::string& key, const std::string& value) {
    entries_[key] = "\"" + json_escape(value) + "\"";
  }
  void set_number(const std::string& key, const std::string& literal) {
    entries_[key] = literal;
  }
  void set_base(const std::string& file_json) {
    const auto open = file_json.find('{');
    const auto close = file_json.rfind('}');
    if (open != std::string::npos && close != std::string::npos && close > open)
      base_body_ = file_json.substr(open + 1, close - open - 1);
  }

  std::string build() const {
    std::ostringstream out;
    out << "{";
    bool first = true;
    auto trimmed = base_body_;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (!trimmed.empty()) {
      out << trimmed;
      first = false;
    }
    for (const auto& [k, v] : entries_) {
      if (!first) out << ",";
      out << "\"" << k << "\":" << v;
      first = false;
    }
    out << "}";
    return out.str();
  }

private:
  std::string base_body_;
  std::map<std::string, std::string> entries_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PHASE: passive human-activity fidelity evaluation pipeline"};
  app.require_subcommand(1);

  std::string config_path, out_dir, records, manifest, sequences, codec_path, model_path;
  std::string report_path, scores_path, input_format, timezone, synth_profile, synth_format;
  std::string synth_start_date, explain_method, explain_background, key_hex, salt;
  std::uint64_t seed = 0;
  std::uint64_t t_bins = 0, folds = 0, epochs = 0, patience = 0, batch_size = 0, threads = 0;
  std::uint64_t conv_filters = 0, conv_kernel = 0, lstm_hidden = 0, attn_heads = 0;
  std::uint64_t synth_entities = 0, synth_days = 0;
  std::uint64_t explain_samples = 0, explain_limit = 0, explain_timestep = 0;
  double lr = -1.0, min_delta = -1.0, threshold = -1.0, dropout = -1.0;

  bool seed_set = false, timestep_set = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "pipeline config JSON file");
    cmd->add_option("--seed", seed, "master seed")->each([&](const std::string&) {
      seed_set = true;
    });
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--records", records, "connection records path");
    cmd->add_option("--manifest", manifest, "label manifest CSV");
    cmd->add_option("--sequences", sequences, "day-sequence archive");
    cmd->add_option("--codec", codec_path, "feature codec JSON");
    cmd->add_option("--model", model_path, "model file");
    cmd->add_option("--t-bins", t_bins, "bins per day (must divide 86,400)");
    cmd->add_option("--timezone", timezone, "day-boundary timezone (UTC or fixed offset)");
    cmd->add_option("--threads", threads, "worker threads (0 = all cores)");
    return cmd;
  };

  auto* synth = add_common(app.add_subcommand(
      "synth", "generate a synthetic corpus (records + label manifest)"));
  synth->add_option("--profile", synth_profile,
                    "benchmark | human | beacon | persona-default | persona-enhanced");
  synth->add_option("--entities", synth_entities, "entity count (non-benchmark profiles)");
  synth->add_option("--days", synth_days, "days per entity");
  synth->add_option("--format", synth_format, "output format: tsv | jsonl");
  synth->add_option("--start-date", synth_start_date, "first day (YYYY-MM-DD)");

  auto* ingest = add_common(app.add_subcommand(
      "ingest", "parse Zeek logs into the canonical records dump"));
  ingest->add_option("--format", input_format, "input format: auto | tsv | jsonl");
  ingest->add_option("--pseudonym-key", key_hex, "64-hex-char key enables pseudonymization");
  ingest->add_option("--pseudonym-salt", salt, "salt for the pseudonymizer");

  auto* featurize = add_common(app.add_subcommand(
      "featurize", "bin records into per-(entity, day) sequences"));
  featurize->add_option("--format", input_format, "input format: auto | tsv | jsonl");

  add_common(app.add_subcommand("fit-codec", "fit the categorical/scaling codec"));

  auto* train = add_common(app.add_subcommand(
      "train", "stratified k-fold cross-validation plus a final model"));
  train->add_option("--folds", folds, "cross-validation folds");
  train->add_option("--epochs", epochs, "max training epochs");
  train->add_option("--lr", lr, "Adamax learning rate");
  train->add_option("--patience", patience, "early-stopping patience (epochs)");
  train->add_option("--min-delta", min_delta, "early-stopping minimum improvement");
  train->add_option("--batch-size", batch_size, "minibatch size");
  train->add_option("--threshold", threshold, "decision threshold");
  train->add_option("--dropout", dropout, "dropout rate");
  train->add_option("--conv-filters", conv_filters, "conv filter count");
  train->add_option("--conv-kernel", conv_kernel, "conv kernel width (odd)");
  train->add_option("--lstm-hidden", lstm_hidden, "LSTM units per direction");
  train->add_option("--attn-heads", attn_heads, "attention heads");

  auto* score = add_common(app.add_subcommand(
      "score", "score entity-days and summarize per entity"));
  score->add_option("--threshold", threshold, "decision threshold");

  auto* explain = add_common(app.add_subcommand(
      "explain", "Shapley attributions and explanation exports"));
  explain->add_option("--method", explain_method, "kernel | exact");
  explain->add_option("--samples", explain_samples, "kernel sample budget per timestep");
  explain->add_option("--limit", explain_limit, "instances to explain");
  explain->add_option("--background", explain_background, "missing | mean");
  explain->add_option("--timestep", explain_timestep, "beeswarm export timestep")
      ->each([&](const std::string&) { timestep_set = true; });

  auto* report = add_common(app.add_subcommand(
      "report", "bundle metrics, scores, and the band histogram"));
  report->add_option("--train-report", report_path, "TrainReport JSON path");
  report->add_option("--scores", scores_path, "scores CSV path");

  CLI11_PARSE(app, argc, argv);

  ConfigDoc doc;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::fprintf(stderr, "error: cannot read config file %s\n", config_path.c_str());
      return PHASE_E_USAGE;
    }
    std::stringstream buf;
    buf << in.rdbuf();
    doc.set_base(buf.str());
  }

  if (seed_set) doc.set_number("seed", std::to_string(seed));
  if (!out_dir.empty()) doc.set_string("out_dir", out_dir);
  if (!records.empty()) doc.set_string("records", records);
  if (!manifest.empty()) doc.set_string("manifest", manifest);
  if (!sequences.empty()) doc.set_string("sequences", sequences);
  if (!codec_path.empty()) doc.set_string("codec", codec_path);
  if (!model_path.empty()) doc.set_string("model", model_path);
  if (!report_path.empty()) doc.set_string("report", report_path);
  if (!scores_path.empty()) doc.set_string("scores", scores_path);
  if (!input_format.empty()) doc.set_string("input_format", input_format);
  if (!timezone.empty()) doc.set_string("timezone", timezone);
  if (t_bins) doc.set_number("t_bins", std::to_string(t_bins));
  if (threads) doc.set_number("threads", std::to_string(threads));
  if (folds) doc.set_number("folds", std::to_string(folds));
  if (epochs) doc.set_number("epochs", std::to_string(epochs));
  if (patience) doc.set_number("patience", std::to_string(patience));
  if (batch_size) doc.set_number("batch_size", std::to_string(batch_size));
  if (conv_filters) doc.set_number("conv_filters", std::to_string(conv_filters));
  if (conv_kernel) doc.set_number("conv_kernel", std::to_string(conv_kernel));
  if (lstm_hidden) doc.set_number("lstm_hidden", std::to_string(lstm_hidden));
  if (attn_heads) doc.set_number("attn_heads", std::to_string(attn_heads));
  if (lr >= 0) doc.set_number("lr", std::to_string(lr));
  if (min_delta >= 0) doc.set_number("min_delta", std::to_string(min_delta));
  if (threshold >= 0) doc.set_number("threshold", std::to_string(threshold));
  if (dropout >= 0) doc.set_number("dropout", std::to_string(dropout));
  if (!synth_profile.empty()) doc.set_string("synth_profile", synth_profile);
  if (synth_entities) doc.set_number("synth_entities", std::to_string(synth_entities));
  if (synth_days) doc.set_number("synth_days", std::to_string(synth_days));
  if (!synth_format.empty()) doc.set_string("synth_format", synth_format);
  if (!synth_start_date.empty()) doc.set_string("synth_start_date", synth_start_date);
  if (!explain_method.empty()) doc.set_string("explain_method", explain_method);
  if (explain_samples) doc.set_number("explain_samples", std::to_string(explain_samples));
  if (explain_limit) doc.set_number("explain_limit", std::to_string(explain_limit));
  if (timestep_set) doc.set_number("explain_timestep", std::to_string(explain_timestep));
  if (!explain_background.empty()) doc.set_string("explain_background", explain_background);
  if (!key_hex.empty()) doc.set_string("pseudonym_key_hex", key_hex);
  if (!salt.empty()) doc.set_string("pseudonym_salt", salt);

  const std::string command = app.get_subcommands().front()->get_name();
  const std::string config_json = doc.build();
  const phase_rc rc = phase_run_command(command.c_str(), config_json.c_str());
  if (rc != PHASE_OK) {
    std::fprintf(stderr, "error: %s\n", phase_last_error());
    return static_cast<int>(rc);
  }
  return 0;
}
