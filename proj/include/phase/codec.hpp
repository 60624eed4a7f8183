#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "phase/featurize.hpp"
#include "phase/nn/tensor.hpp"
#include "phase/schema.hpp"

namespace phase {

// Fitted categorical vocabularies and per-feature min/max ranges, persisted
// so training-time and inference-time encodings never drift. Missing cells
// are filled with -1 before the ranges are computed, so -1 sits at or below
// every minimum and unseen tokens collapse to the missing sentinel.
class FeatureCodec {
public:
  static constexpr int kVersion = 1;

  static FeatureCodec fit(const std::vector<DaySequence>& sequences);

  // T x F matrix, every cell min-max scaled into [0, 1].
  nn::Tensor transform(const DaySequence& sequence) const;

  // Encoded id / filled value before scaling (missing or unseen -> -1).
  double encode_cell(std::size_t feature, const Cell& cell) const;
  double scale(std::size_t feature, double encoded) const;

  // Inverse of scale: scaled [0,1] value back to the encoded range. For
  // categorical features the result is rounded to the nearest id.
  double unscale(std::size_t feature, double scaled) const;
  // Human-readable original-scale value ("-1" for missing, token for ids).
  std::string translate(std::size_t feature, double scaled) const;

  std::size_t t_bins() const { return t_bins_; }
  const std::vector<std::string>& vocabulary(std::size_t feature) const;
  double range_min(std::size_t feature) const { return min_[feature]; }
  double range_max(std::size_t feature) const { return max_[feature]; }

  // `config_hash`, when set, is embedded (with the seed) as artifact
  // provenance; load() ignores it.
  void save(std::ostream& out, const std::string& config_hash = "",
            std::uint64_t seed = 0) const;
  static FeatureCodec load(std::istream& in);

  bool operator==(const FeatureCodec&) const = default;

private:
  std::size_t t_bins_ = 0;
  std::array<std::vector<std::string>, kFeatureCount> vocab_;  // id -> token
  std::array<std::unordered_map<std::string, int>, kFeatureCount> vocab_index_;
  std::array<double, kFeatureCount> min_{};
  std::array<double, kFeatureCount> max_{};

  void rebuild_index();
};

}  // namespace phase
