#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "phase/codec.hpp"
#include "phase/featurize.hpp"
#include "phase/model.hpp"

namespace phase {

enum class Band {
  ConfidentNonHuman,  // S < 0.2
  LikelyNonHuman,     // 0.2 <= S < 0.4
  Ambiguous,          // 0.4 <= S < 0.6
  LikelyHuman,        // 0.6 <= S < 0.8
  ConfidentHuman,     // S >= 0.8
};

std::string_view band_name(Band b);

// Lower edges of the four upper bands, strictly decreasing.
struct BandEdges {
  double confident_human = 0.8;
  double likely_human = 0.6;
  double ambiguous = 0.4;
  double likely_nonhuman = 0.2;

  void validate() const;
};

// Half-open confidence bands over the reported range [0.01, 0.99].
Band band(double reported_score, const BandEdges& edges = {});

struct PhaseScore {
  std::string entity;
  std::string date;
  double raw = 0.0;       // model probability
  double reported = 0.0;  // raw clamped to [0.01, 0.99]
  Band band = Band::Ambiguous;
};

double clamp_reported(double raw);

std::vector<PhaseScore> score_days(const PhaseModel& model, const FeatureCodec& codec,
                                   const std::vector<DaySequence>& sequences,
                                   const BandEdges& edges = {});

struct EntityScoreSummary {
  std::string entity;
  std::vector<double> day_scores;  // reported values, day order
  double mean = 0.0;
  double stddev = 0.0;  // population std
  Band dominant = Band::Ambiguous;
};

// Per-entity mean/std over reported day scores. Dominant band is the modal
// band across days; ties resolve to the band of the mean.
std::vector<EntityScoreSummary> summarize_entities(const std::vector<PhaseScore>& scores);

void write_scores_csv(const std::vector<PhaseScore>& scores, std::ostream& out,
                      const std::string& config_hash, std::uint64_t seed);
std::string summaries_to_json(const std::vector<EntityScoreSummary>& summaries,
                              const std::string& config_hash, std::uint64_t seed);

}  // namespace phase
