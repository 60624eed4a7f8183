#include <doctest.h>

#include <unistd.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include "phase/phase.h"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("phase_capi_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const char* name) const { return (path / name).string(); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("c api: synth -> featurize -> codec -> train -> score round trip") {
  TempDir tmp;

  phase_records* records = nullptr;
  phase_manifest* manifest = nullptr;
  REQUIRE(phase_synth_generate("beacon", 3, 3, 42, "2025-03-03", &records, &manifest) ==
          PHASE_OK);
  REQUIRE(records != nullptr);
  CHECK(phase_records_count(records) > 0);
  CHECK(phase_records_issue_count(records) == 0);

  // add a human profile so training has two classes
  phase_records* humans = nullptr;
  phase_manifest* human_manifest = nullptr;
  REQUIRE(phase_synth_generate("human", 3, 3, 43, "2025-03-03", &humans, &human_manifest) ==
          PHASE_OK);

  // merge via files: write both, concatenate, re-read
  REQUIRE(phase_records_write_jsonl(records, tmp.file("a.jsonl").c_str()) == PHASE_OK);
  REQUIRE(phase_records_write_jsonl(humans, tmp.file("b.jsonl").c_str()) == PHASE_OK);
  {
    std::ofstream merged(tmp.file("all.jsonl"), std::ios::binary | std::ios::app);
    for (const char* part : {"a.jsonl", "b.jsonl"}) {
      std::ifstream in(tmp.file(part), std::ios::binary);
      merged << in.rdbuf();
    }
  }

  phase_records* all = nullptr;
  REQUIRE(phase_records_read(tmp.file("all.jsonl").c_str(), "auto", &all) == PHASE_OK);
  CHECK(phase_records_count(all) ==
        phase_records_count(records) + phase_records_count(humans));

  phase_manifest* labels = nullptr;
  {
    // build the merged manifest from the two generator manifests
    std::ofstream mm(tmp.file("labels.csv"));
    mm << "address,label\n";
    REQUIRE(phase_manifest_write(manifest, tmp.file("m0.csv").c_str()) == PHASE_OK);
    REQUIRE(phase_manifest_write(human_manifest, tmp.file("m1.csv").c_str()) == PHASE_OK);
    for (const char* part : {"m0.csv", "m1.csv"}) {
      std::ifstream in(tmp.file(part));
      std::string line;
      bool first = true;
      while (std::getline(in, line)) {
        if (first || line.empty()) {
          first = false;
          continue;
        }
        mm << line << "\n";
      }
    }
  }
  REQUIRE(phase_manifest_read(tmp.file("labels.csv").c_str(), &labels) == PHASE_OK);

  phase_dataset* dataset = nullptr;
  REQUIRE(phase_featurize(all, labels, 96, "UTC", &dataset) == PHASE_OK);
  CHECK(phase_dataset_count(dataset) == 18);  // 6 entities x 3 days

  phase_codec* codec = nullptr;
  REQUIRE(phase_codec_fit(dataset, &codec) == PHASE_OK);
  REQUIRE(phase_codec_save(codec, tmp.file("codec.json").c_str()) == PHASE_OK);
  phase_codec* codec2 = nullptr;
  REQUIRE(phase_codec_read(tmp.file("codec.json").c_str(), &codec2) == PHASE_OK);

  phase_model* model = nullptr;
  char* report_json = nullptr;
  const char* cfg =
      "{\"folds\":3,\"epochs\":15,\"conv_filters\":6,\"lstm_hidden\":6,\"attn_heads\":2,"
      "\"batch_size\":4}";
  REQUIRE(phase_train(dataset, codec, cfg, 7, &model, &report_json) == PHASE_OK);
  REQUIRE(report_json != nullptr);
  CHECK(std::string(report_json).find("\"folds\"") != std::string::npos);
  phase_string_free(report_json);

  REQUIRE(phase_model_save(model, tmp.file("model.bin").c_str()) == PHASE_OK);
  phase_model* reloaded = nullptr;
  REQUIRE(phase_model_read(tmp.file("model.bin").c_str(), &reloaded) == PHASE_OK);

  char* scores_json = nullptr;
  REQUIRE(phase_score(reloaded, codec2, dataset, tmp.file("scores.csv").c_str(),
                      tmp.file("summary.json").c_str(), &scores_json) == PHASE_OK);
  REQUIRE(scores_json != nullptr);
  CHECK(std::string(scores_json).find("\"band\"") != std::string::npos);
  phase_string_free(scores_json);
  CHECK(fs::exists(tmp.file("scores.csv")));
  CHECK(fs::exists(tmp.file("summary.json")));

  phase_model_free(model);
  phase_model_free(reloaded);
  phase_codec_free(codec);
  phase_codec_free(codec2);
  phase_dataset_free(dataset);
  phase_manifest_free(labels);
  phase_manifest_free(manifest);
  phase_manifest_free(human_manifest);
  phase_records_free(all);
  phase_records_free(humans);
  phase_records_free(records);
}

TEST_CASE("c api: errors set codes and messages") {
  phase_records* records = nullptr;
  CHECK(phase_records_read("/nonexistent/path.log", "auto", &records) == PHASE_E_USAGE);
  CHECK(std::strlen(phase_last_error()) > 0);
  CHECK(records == nullptr);

  CHECK(phase_records_read(nullptr, "auto", &records) == PHASE_E_USAGE);

  phase_dataset* dataset = nullptr;
  CHECK(phase_dataset_read("/nonexistent/archive.jsonl", &dataset) == PHASE_E_USAGE);

  phase_records* synth = nullptr;
  CHECK(phase_synth_generate("not-a-profile", 1, 1, 1, nullptr, &synth, nullptr) ==
        PHASE_E_USAGE);
  CHECK(synth == nullptr);

  // bad featurize config: t_bins does not divide the day
  phase_records* beacons = nullptr;
  REQUIRE(phase_synth_generate("beacon", 1, 1, 5, nullptr, &beacons, nullptr) == PHASE_OK);
  CHECK(phase_featurize(beacons, nullptr, 1000, "UTC", &dataset) == PHASE_E_USAGE);
  CHECK(phase_featurize(beacons, nullptr, 96, "mars-time", &dataset) == PHASE_E_USAGE);
  phase_records_free(beacons);
}

TEST_CASE("c api: pseudonymization through the handle surface") {
  TempDir tmp;
  phase_records* records = nullptr;
  REQUIRE(phase_synth_generate("beacon", 2, 1, 9, nullptr, &records, nullptr) == PHASE_OK);
  const std::string key(64, 'c');
  REQUIRE(phase_records_pseudonymize(records, key.c_str(), "s",
                                     tmp.file("map.csv").c_str()) == PHASE_OK);
  CHECK(fs::exists(tmp.file("map.csv")));
  // short key is a usage error
  CHECK(phase_records_pseudonymize(records, "abc", "s", nullptr) == PHASE_E_USAGE);
  phase_records_free(records);
}

TEST_CASE("c api: version and error strings are stable") {
  CHECK(std::strlen(phase_version()) > 0);
  phase_records* r = nullptr;
  (void)phase_records_read(nullptr, nullptr, &r);
  CHECK(phase_last_error() != nullptr);
}
