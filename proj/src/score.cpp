#include "phase/score.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

namespace phase {

std::string_view band_name(Band b) {
  switch (b) {
    case Band::ConfidentHuman: return "ConfidentHuman";
    case Band::LikelyHuman: return "LikelyHuman";
    case Band::Ambiguous: return "Ambiguous";
    case Band::LikelyNonHuman: return "LikelyNonHuman";
    default: return "ConfidentNonHuman";
  }
}

void BandEdges::validate() const {
  if (!(confident_human > likely_human && likely_human > ambiguous &&
        ambiguous > likely_nonhuman && likely_nonhuman > 0.0 && confident_human < 1.0))
    fail_usage("band edges must be strictly decreasing within (0, 1)");
}

Band band(double s, const BandEdges& edges) {
  if (s < 0.01 || s > 0.99) fail_data("band: score outside the reported range [0.01, 0.99]");
  if (s >= edges.confident_human) return Band::ConfidentHuman;
  if (s >= edges.likely_human) return Band::LikelyHuman;
  if (s >= edges.ambiguous) return Band::Ambiguous;
  if (s >= edges.likely_nonhuman) return Band::LikelyNonHuman;
  return Band::ConfidentNonHuman;
}

double clamp_reported(double raw) { return std::clamp(raw, 0.01, 0.99); }

std::vector<PhaseScore> score_days(const PhaseModel& model, const FeatureCodec& codec,
                                   const std::vector<DaySequence>& sequences,
                                   const BandEdges& edges) {
  std::vector<PhaseScore> out;
  out.reserve(sequences.size());
  for (const auto& seq : sequences) {
    PhaseScore s;
    s.entity = seq.entity;
    s.date = seq.date;
    s.raw = model.forward(codec.transform(seq), nn::Mode::Infer, 0);
    s.reported = clamp_reported(s.raw);
    s.band = band(s.reported, edges);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<EntityScoreSummary> summarize_entities(const std::vector<PhaseScore>& scores) {
  std::map<std::string, std::vector<const PhaseScore*>> grouped;
  for (const auto& s : scores) grouped[s.entity].push_back(&s);

  std::vector<EntityScoreSummary> out;
  out.reserve(grouped.size());
  for (const auto& [entity, day_scores] : grouped) {
    EntityScoreSummary summary;
    summary.entity = entity;
    double sum = 0.0;
    std::map<Band, std::size_t> band_counts;
    for (const auto* s : day_scores) {
      summary.day_scores.push_back(s->reported);
      sum += s->reported;
      ++band_counts[s->band];
    }
    const double n = static_cast<double>(day_scores.size());
    summary.mean = sum / n;
    double sq = 0.0;
    for (double v : summary.day_scores) sq += (v - summary.mean) * (v - summary.mean);
    summary.stddev = std::sqrt(sq / n);

    std::size_t best_count = 0;
    for (const auto& [b, c] : band_counts) best_count = std::max(best_count, c);
    std::vector<Band> modal;
    for (const auto& [b, c] : band_counts)
      if (c == best_count) modal.push_back(b);
    summary.dominant = modal.size() == 1 ? modal.front() : band(clamp_reported(summary.mean));
    out.push_back(std::move(summary));
  }
  return out;
}

void write_scores_csv(const std::vector<PhaseScore>& scores, std::ostream& out,
                      const std::string& config_hash, std::uint64_t seed) {
  out << "# config_hash=" << config_hash << " seed=" << seed << "\n";
  out << "entity,date,raw,reported,band\n";
  for (const auto& s : scores) {
    out << s.entity << ',' << s.date << ',' << format_double(s.raw) << ','
        << format_double(s.reported) << ',' << band_name(s.band) << '\n';
  }
}

std::string summaries_to_json(const std::vector<EntityScoreSummary>& summaries,
                              const std::string& config_hash, std::uint64_t seed) {
  nlohmann::json doc;
  doc["config_hash"] = config_hash;
  doc["seed"] = seed;
  nlohmann::json entities;
  for (const auto& s : summaries) {
    nlohmann::json e;
    e["mean"] = s.mean;
    e["std"] = s.stddev;
    e["days"] = s.day_scores.size();
    e["dominant_band"] = std::string(band_name(s.dominant));
    e["scores"] = s.day_scores;
    entities[s.entity] = std::move(e);
  }
  doc["entities"] = std::move(entities);
  return doc.dump(2) + "\n";
}

}  // namespace phase
