#include "phase/phase.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "phase/codec.hpp"
#include "phase/featurize.hpp"
#include "phase/model.hpp"
#include "phase/pipeline.hpp"
#include "phase/rng.hpp"
#include "phase/score.hpp"
#include "phase/synth.hpp"
#include "phase/train.hpp"
#include "phase/zeek.hpp"

using namespace phase;

// handle definitions: thin wrappers over the C++ core types
struct phase_records {
  ParseResult data;
};
struct phase_manifest {
  LabelManifest data;
};
struct phase_dataset {
  std::vector<DaySequence> data;
};
struct phase_codec {
  FeatureCodec data;
};
struct phase_model {
  PhaseModel data;
};

namespace {

thread_local std::string g_last_error;

phase_rc set_error(Status status, const std::string& message) {
  g_last_error = message;
  return static_cast<phase_rc>(status);
}

template <typename Fn>
phase_rc guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return PHASE_OK;
  } catch (const PhaseError& e) {
    return set_error(e.status(), e.what());
  } catch (const std::exception& e) {
    return set_error(Status::Data, e.what());
  }
}

phase_rc require(bool condition, const char* message) {
  if (condition) return PHASE_OK;
  return set_error(Status::Usage, message);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::ifstream open_input(const char* path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_usage(std::string("cannot read ") + path);
  return in;
}

std::ofstream open_output(const char* path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_data(std::string("cannot write ") + path);
  return out;
}

}  // namespace

extern "C" {

const char* phase_version(void) { return "1.0.0"; }

const char* phase_last_error(void) { return g_last_error.c_str(); }

void phase_string_free(char* s) { std::free(s); }

/* ---- records ---- */

phase_rc phase_records_read(const char* path, const char* format, phase_records** out) {
  if (auto rc = require(path && out, "phase_records_read: path and out are required")) return rc;
  return guarded([&] {
    auto in = open_input(path);
    std::string fmt = format ? format : "auto";
    if (fmt == "auto") fmt = in.peek() == '#' ? "tsv" : "jsonl";
    ParseResult parsed = fmt == "tsv" ? parse_tsv(in) : parse_json_lines(in);
    *out = new phase_records{std::move(parsed)};
  });
}

phase_rc phase_records_write_jsonl(const phase_records* records, const char* path) {
  if (auto rc = require(records && path, "phase_records_write_jsonl: null argument")) return rc;
  return guarded([&] {
    auto out = open_output(path);
    write_json_lines(records->data.records, out);
  });
}

phase_rc phase_records_write_tsv(const phase_records* records, const char* path) {
  if (auto rc = require(records && path, "phase_records_write_tsv: null argument")) return rc;
  return guarded([&] {
    auto out = open_output(path);
    write_tsv(records->data.records, out);
  });
}

size_t phase_records_count(const phase_records* records) {
  return records ? records->data.records.size() : 0;
}

size_t phase_records_issue_count(const phase_records* records) {
  return records ? records->data.issues.size() : 0;
}

phase_rc phase_records_pseudonymize(phase_records* records, const char* key_hex,
                                    const char* salt, const char* mapping_csv_path) {
  if (auto rc = require(records && key_hex, "phase_records_pseudonymize: null argument"))
    return rc;
  return guarded([&] {
    const auto key = PseudonymKey::from_hex(key_hex, salt ? salt : "");
    auto table = pseudonymize(records->data.records, key);
    if (mapping_csv_path) {
      auto out = open_output(mapping_csv_path);
      out << "address,pseudonym\n";
      for (const auto& [addr, pseud] : table) out << addr << ',' << pseud << '\n';
    }
  });
}

void phase_records_free(phase_records* records) { delete records; }

/* ---- synth ---- */

phase_rc phase_synth_generate(const char* profile, size_t entities, size_t days, uint64_t seed,
                              const char* start_date, phase_records** out_records,
                              phase_manifest** out_manifest) {
  if (auto rc = require(profile && out_records, "phase_synth_generate: null argument"))
    return rc;
  return guarded([&] {
    PersonaSpec spec;
    spec.profile = profile_from_name(profile);
    spec.entities = entities;
    spec.days = days;
    spec.seed = seed;
    if (start_date) spec.start_date = start_date;
    SynthResult result = generate(spec);
    *out_records = new phase_records{ParseResult{std::move(result.records), {}}};
    if (out_manifest) *out_manifest = new phase_manifest{std::move(result.manifest)};
  });
}

phase_rc phase_synth_benchmark(uint64_t seed, phase_records** out_records,
                               phase_manifest** out_manifest) {
  if (auto rc = require(out_records != nullptr, "phase_synth_benchmark: out is required"))
    return rc;
  return guarded([&] {
    SynthResult result = default_benchmark(seed);
    *out_records = new phase_records{ParseResult{std::move(result.records), {}}};
    if (out_manifest) *out_manifest = new phase_manifest{std::move(result.manifest)};
  });
}

/* ---- manifest ---- */

phase_rc phase_manifest_read(const char* path, phase_manifest** out) {
  if (auto rc = require(path && out, "phase_manifest_read: null argument")) return rc;
  return guarded([&] {
    auto in = open_input(path);
    *out = new phase_manifest{LabelManifest::read_csv(in)};
  });
}

phase_rc phase_manifest_write(const phase_manifest* manifest, const char* path) {
  if (auto rc = require(manifest && path, "phase_manifest_write: null argument")) return rc;
  return guarded([&] {
    auto out = open_output(path);
    manifest->data.write_csv(out);
  });
}

void phase_manifest_free(phase_manifest* manifest) { delete manifest; }

/* ---- dataset ---- */

phase_rc phase_featurize(const phase_records* records, const phase_manifest* manifest,
                         uint64_t t_bins, const char* timezone, phase_dataset** out) {
  if (auto rc = require(records && out, "phase_featurize: null argument")) return rc;
  return guarded([&] {
    FeaturizeConfig fc;
    fc.t_bins = t_bins;
    fc.timezone = timezone ? timezone : "UTC";
    LabelManifest empty;
    auto result = bin_to_days(records->data.records, manifest ? manifest->data : empty, fc);
    *out = new phase_dataset{std::move(result.sequences)};
  });
}

phase_rc phase_dataset_read(const char* path, phase_dataset** out) {
  if (auto rc = require(path && out, "phase_dataset_read: null argument")) return rc;
  return guarded([&] {
    auto in = open_input(path);
    *out = new phase_dataset{read_sequences(in)};
  });
}

phase_rc phase_dataset_write(const phase_dataset* dataset, const char* path) {
  if (auto rc = require(dataset && path, "phase_dataset_write: null argument")) return rc;
  return guarded([&] {
    auto out = open_output(path);
    write_sequences(dataset->data, out);
  });
}

size_t phase_dataset_count(const phase_dataset* dataset) {
  return dataset ? dataset->data.size() : 0;
}

void phase_dataset_free(phase_dataset* dataset) { delete dataset; }

/* ---- codec ---- */

phase_rc phase_codec_fit(const phase_dataset* dataset, phase_codec** out) {
  if (auto rc = require(dataset && out, "phase_codec_fit: null argument")) return rc;
  return guarded([&] {
    std::vector<DaySequence> labeled;
    for (const auto& s : dataset->data)
      if (s.label) labeled.push_back(s);
    if (labeled.empty()) fail_data("codec fit: dataset has no labeled sequences");
    *out = new phase_codec{FeatureCodec::fit(labeled)};
  });
}

phase_rc phase_codec_save(const phase_codec* codec, const char* path) {
  if (auto rc = require(codec && path, "phase_codec_save: null argument")) return rc;
  return guarded([&] {
    auto out = open_output(path);
    codec->data.save(out);
  });
}

phase_rc phase_codec_read(const char* path, phase_codec** out) {
  if (auto rc = require(path && out, "phase_codec_read: null argument")) return rc;
  return guarded([&] {
    auto in = open_input(path);
    *out = new phase_codec{FeatureCodec::load(in)};
  });
}

void phase_codec_free(phase_codec* codec) { delete codec; }

/* ---- train / score ---- */

phase_rc phase_train(const phase_dataset* dataset, const phase_codec* codec,
                     const char* train_cfg_json, uint64_t seed, phase_model** out_model,
                     char** report_json_out) {
  if (auto rc = require(dataset && codec && out_model, "phase_train: null argument")) return rc;
  return guarded([&] {
    nlohmann::json cfg = nlohmann::json::object();
    if (train_cfg_json) {
      cfg = nlohmann::json::parse(train_cfg_json, nullptr, false);
      if (cfg.is_discarded() || !cfg.is_object())
        fail_usage("phase_train: train_cfg_json is not a JSON object");
    }
    std::vector<LabeledExample> examples;
    for (const auto& s : dataset->data) {
      if (!s.label) continue;
      examples.push_back({codec->data.transform(s), *s.label});
    }
    if (examples.empty()) fail_data("phase_train: dataset has no labeled sequences");

    PhaseModelConfig mc;
    mc.t_bins = codec->data.t_bins();
    mc.features = kFeatureCount;
    mc.conv_filters = cfg.value("conv_filters", 32u);
    mc.conv_kernel = cfg.value("conv_kernel", 3u);
    mc.lstm_hidden = cfg.value("lstm_hidden", 32u);
    mc.attn_heads = cfg.value("attn_heads", 4u);
    mc.dropout_rate = cfg.value("dropout", 0.2);
    mc.seed = seed;

    CrossValidateOptions cv;
    cv.k = cfg.value("folds", 10u);
    cv.threshold = cfg.value("threshold", 0.5);
    cv.train.epochs = cfg.value("epochs", 1000u);
    cv.train.batch_size = cfg.value("batch_size", 16u);
    cv.train.lr = cfg.value("lr", 0.001);
    cv.train.patience = cfg.value("patience", 20u);
    cv.train.min_delta = cfg.value("min_delta", 0.001);
    cv.train.threads = 1;
    cv.parallel_folds = cfg.value("threads", 1u);
    TrainReport report = cross_validate(mc, examples, cv, seed);

    std::vector<int> labels;
    for (const auto& e : examples) labels.push_back(e.label);
    std::vector<std::size_t> all(examples.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    const std::uint64_t final_seed = mix_seed(seed, 0xf1a1ull);
    auto train_idx = undersample(all, labels, final_seed);
    PhaseModelConfig final_mc = mc;
    final_mc.seed = final_seed;
    auto model = std::make_unique<PhaseModel>(PhaseModel::init(final_mc));
    TrainOptions topts = cv.train;
    topts.seed = final_seed;
    topts.threads = cfg.value("threads", 1u);
    train_model(*model, examples, train_idx, topts);

    if (report_json_out) *report_json_out = dup_string(report.to_json(""));
    *out_model = new phase_model{std::move(*model)};
  });
}

phase_rc phase_model_save(const phase_model* model, const char* path) {
  if (auto rc = require(model && path, "phase_model_save: null argument")) return rc;
  return guarded([&] {
    auto out = open_output(path);
    model->data.save(out);
  });
}

phase_rc phase_model_read(const char* path, phase_model** out) {
  if (auto rc = require(path && out, "phase_model_read: null argument")) return rc;
  return guarded([&] {
    auto in = open_input(path);
    *out = new phase_model{PhaseModel::load(in)};
  });
}

void phase_model_free(phase_model* model) { delete model; }

phase_rc phase_score(const phase_model* model, const phase_codec* codec,
                     const phase_dataset* dataset, const char* scores_csv_path,
                     const char* summary_json_path, char** scores_json_out) {
  if (auto rc = require(model && codec && dataset, "phase_score: null argument")) return rc;
  return guarded([&] {
    auto scores = score_days(model->data, codec->data, dataset->data);
    if (scores_csv_path) {
      auto out = open_output(scores_csv_path);
      write_scores_csv(scores, out, "", 0);
    }
    if (summary_json_path) {
      auto summaries = summarize_entities(scores);
      auto out = open_output(summary_json_path);
      out << summaries_to_json(summaries, "", 0);
    }
    if (scores_json_out) {
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& s : scores) {
        arr.push_back({{"entity", s.entity},
                       {"date", s.date},
                       {"raw", s.raw},
                       {"reported", s.reported},
                       {"band", std::string(band_name(s.band))}});
      }
      *scores_json_out = dup_string(arr.dump());
    }
  });
}

/* ---- pipeline ---- */

phase_rc phase_run_command(const char* command, const char* config_json) {
  if (auto rc = require(command != nullptr, "phase_run_command: command is required")) return rc;
  std::string error;
  int code = 0;
  try {
    PipelineConfig config = config_json ? PipelineConfig::from_json_text(config_json)
                                        : PipelineConfig{};
    code = run_command(command, config, &error);
  } catch (const PhaseError& e) {
    return set_error(e.status(), e.what());
  } catch (const std::exception& e) {
    return set_error(Status::Data, e.what());
  }
  if (code != 0) {
    g_last_error = error;
    return static_cast<phase_rc>(code);
  }
  g_last_error.clear();
  return PHASE_OK;
}

}  // extern "C"
