#pragma once

#include <cstdint>
#include <string>

#include "phase/common.hpp"

namespace phase {

// Flat, documented configuration shared by every pipeline command. Loaded
// from a JSON document; CLI flags override individual keys. The canonical
// serialized form (sorted keys) is hashed and stamped into every artifact.
struct PipelineConfig {
  // paths
  std::string out_dir = "out";
  std::string records_path;    // Zeek TSV or JSON-lines input / records dump
  std::string manifest_path;   // label manifest CSV
  std::string sequences_path;  // DaySequence archive
  std::string codec_path;
  std::string model_path;
  std::string report_path;   // TrainReport JSON (input of `report`)
  std::string scores_path;   // scores CSV (input of `report`)
  std::string input_format = "auto";  // "tsv" | "jsonl" | "auto"

  // featurization
  std::uint64_t t_bins = 1440;
  std::string timezone = "UTC";

  // model hyperparameters
  std::uint64_t conv_filters = 32;
  std::uint64_t conv_kernel = 3;
  std::uint64_t lstm_hidden = 32;
  std::uint64_t attn_heads = 4;
  double dropout = 0.2;

  // training protocol
  std::uint64_t folds = 10;
  std::uint64_t epochs = 1000;
  double lr = 0.001;
  std::uint64_t patience = 20;
  double min_delta = 0.001;
  std::uint64_t batch_size = 16;
  double threshold = 0.5;
  std::uint64_t threads = 0;  // 0 = hardware concurrency

  // scoring bands (upper edges, strictly decreasing)
  double band_confident_human = 0.8;
  double band_likely_human = 0.6;
  double band_ambiguous = 0.4;
  double band_likely_nonhuman = 0.2;

  // explanation
  std::string explain_method = "kernel";  // "kernel" | "exact"
  std::uint64_t explain_samples = 64;
  std::uint64_t explain_limit = 4;        // instances explained per run
  std::string explain_background = "missing";
  std::uint64_t explain_timestep = 0;     // beeswarm export timestep

  // synthesis
  std::string synth_profile = "benchmark";
  std::uint64_t synth_entities = 4;
  std::uint64_t synth_days = 5;
  std::string synth_format = "tsv";  // "tsv" | "jsonl"
  std::string synth_start_date = "2025-03-03";
  // profile parameters (non-benchmark profiles)
  std::uint64_t synth_active_start_min = 540;
  std::uint64_t synth_active_end_min = 1020;
  double synth_interarrival_min_s = 120.0;
  double synth_interarrival_max_s = 600.0;
  double synth_beacon_period_s = 300.0;
  bool synth_maintenance_spike = true;
  std::uint64_t synth_idle_tasks_min = 5;
  std::uint64_t synth_idle_tasks_max = 12;
  double synth_idle_minutes = 60.0;

  // pseudonymization (ingest)
  std::string pseudonym_key_hex;  // empty = no rewriting
  std::string pseudonym_salt;

  std::uint64_t seed = 42;

  static PipelineConfig from_json_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
  std::string to_canonical_json() const;
  std::string hash() const;  // short SHA-256 of the canonical form
  void validate() const;
};

// Pipeline commands; artifact paths default into out_dir when unset.
void cmd_synth(const PipelineConfig& config);
void cmd_ingest(const PipelineConfig& config);
void cmd_featurize(const PipelineConfig& config);
void cmd_fit_codec(const PipelineConfig& config);
void cmd_train(const PipelineConfig& config);
void cmd_score(const PipelineConfig& config);
void cmd_explain(const PipelineConfig& config);
void cmd_report(const PipelineConfig& config);

// Dispatch by command name; returns the process exit code instead of
// throwing. Unknown commands are usage errors.
int run_command(const std::string& command, const PipelineConfig& config,
                std::string* error_message = nullptr);

}  // namespace phase
