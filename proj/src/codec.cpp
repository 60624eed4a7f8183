#include "phase/codec.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

namespace phase {

namespace {

// Ports sort numerically, everything else lexicographically.
void sort_vocab(std::size_t feature, std::vector<std::string>& tokens) {
  if (is_port_feature(feature)) {
    std::sort(tokens.begin(), tokens.end(), [](const std::string& a, const std::string& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });
  } else {
    std::sort(tokens.begin(), tokens.end());
  }
}

}  // namespace

void FeatureCodec::rebuild_index() {
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    vocab_index_[f].clear();
    for (std::size_t id = 0; id < vocab_[f].size(); ++id)
      vocab_index_[f][vocab_[f][id]] = static_cast<int>(id);
  }
}

FeatureCodec FeatureCodec::fit(const std::vector<DaySequence>& sequences) {
  if (sequences.empty()) fail_data("codec fit requires at least one sequence");
  FeatureCodec codec;
  codec.t_bins_ = sequences.front().rows.size();
  for (const auto& s : sequences)
    if (s.rows.size() != codec.t_bins_)
      fail_data("codec fit: sequences disagree on row count");

  std::array<std::set<std::string>, kFeatureCount> tokens;
  for (const auto& s : sequences) {
    for (const auto& row : s.rows) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        if (!is_categorical(f) || cell_missing(row[f])) continue;
        tokens[f].insert(std::get<std::string>(row[f]));
      }
    }
  }
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (!is_categorical(f)) continue;
    codec.vocab_[f].assign(tokens[f].begin(), tokens[f].end());
    sort_vocab(f, codec.vocab_[f]);
  }
  codec.rebuild_index();

  // ranges over the encoded cells after the missing -> -1 fill
  codec.min_.fill(0.0);
  codec.max_.fill(0.0);
  bool first = true;
  for (const auto& s : sequences) {
    for (const auto& row : s.rows) {
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        double v = codec.encode_cell(f, row[f]);
        if (first) {
          codec.min_[f] = v;
          codec.max_[f] = v;
        } else {
          codec.min_[f] = std::min(codec.min_[f], v);
          codec.max_[f] = std::max(codec.max_[f], v);
        }
      }
      first = false;
    }
  }
  return codec;
}

double FeatureCodec::encode_cell(std::size_t feature, const Cell& cell) const {
  if (cell_missing(cell)) return -1.0;
  if (is_categorical(feature)) {
    const auto& token = std::get<std::string>(cell);
    auto it = vocab_index_[feature].find(token);
    if (it == vocab_index_[feature].end()) return -1.0;  // unseen -> missing sentinel
    return static_cast<double>(it->second);
  }
  return std::get<double>(cell);
}

double FeatureCodec::scale(std::size_t feature, double encoded) const {
  const double lo = min_[feature];
  const double hi = max_[feature];
  if (hi <= lo) return 0.0;  // degenerate feature
  double v = (encoded - lo) / (hi - lo);
  return std::clamp(v, 0.0, 1.0);
}

double FeatureCodec::unscale(std::size_t feature, double scaled) const {
  const double lo = min_[feature];
  const double hi = max_[feature];
  double v = hi <= lo ? lo : lo + scaled * (hi - lo);
  if (is_categorical(feature)) v = std::round(v);
  return v;
}

std::string FeatureCodec::translate(std::size_t feature, double scaled) const {
  double v = unscale(feature, scaled);
  if (is_categorical(feature)) {
    auto id = static_cast<long>(v);
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_[feature].size()) return "-1";
    return vocab_[feature][static_cast<std::size_t>(id)];
  }
  return format_double(v);
}

nn::Tensor FeatureCodec::transform(const DaySequence& sequence) const {
  if (sequence.rows.size() != t_bins_)
    fail_data("transform: sequence has " + std::to_string(sequence.rows.size()) +
              " rows, codec expects " + std::to_string(t_bins_));
  nn::Tensor out({t_bins_, kFeatureCount});
  for (std::size_t t = 0; t < t_bins_; ++t)
    for (std::size_t f = 0; f < kFeatureCount; ++f)
      out(t, f) = scale(f, encode_cell(f, sequence.rows[t][f]));
  return out;
}

const std::vector<std::string>& FeatureCodec::vocabulary(std::size_t feature) const {
  return vocab_[feature];
}

void FeatureCodec::save(std::ostream& out, const std::string& config_hash,
                        std::uint64_t seed) const {
  nlohmann::json doc;
  doc["version"] = kVersion;
  doc["t_bins"] = t_bins_;
  if (!config_hash.empty()) doc["meta"] = {{"config_hash", config_hash}, {"seed", seed}};
  nlohmann::json order = nlohmann::json::array();
  for (auto name : kFeatureNames) order.push_back(std::string(name));
  doc["feature_order"] = std::move(order);
  nlohmann::json feats;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    nlohmann::json entry;
    entry["kind"] = is_categorical(f) ? "categorical" : "quantitative";
    entry["min"] = min_[f];
    entry["max"] = max_[f];
    if (is_categorical(f)) entry["vocab"] = vocab_[f];
    feats[std::string(kFeatureNames[f])] = std::move(entry);
  }
  doc["features"] = std::move(feats);
  out << doc.dump(2) << '\n';
}

FeatureCodec FeatureCodec::load(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) fail_data("codec file: invalid JSON");
  if (!doc.contains("version") || doc["version"].get<int>() != kVersion)
    fail_data("codec file: incompatible version (expected " + std::to_string(kVersion) + ")");
  FeatureCodec codec;
  codec.t_bins_ = doc.at("t_bins").get<std::size_t>();
  const auto& order = doc.at("feature_order");
  if (order.size() != kFeatureCount) fail_data("codec file: wrong feature count");
  for (std::size_t f = 0; f < kFeatureCount; ++f)
    if (order[f].get<std::string>() != kFeatureNames[f])
      fail_data("codec file: feature order mismatch at position " + std::to_string(f));
  const auto& feats = doc.at("features");
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    const auto& entry = feats.at(std::string(kFeatureNames[f]));
    codec.min_[f] = entry.at("min").get<double>();
    codec.max_[f] = entry.at("max").get<double>();
    if (codec.min_[f] > codec.max_[f]) fail_data("codec file: min > max for feature");
    if (is_categorical(f)) codec.vocab_[f] = entry.at("vocab").get<std::vector<std::string>>();
  }
  codec.rebuild_index();
  return codec;
}

}  // namespace phase
