#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "phase/common.hpp"
#include "phase/schema.hpp"
#include "phase/zeek.hpp"

namespace phase {

// address -> class label (1 = human, 0 = non-human), optional provenance note.
struct LabelManifest {
  struct Entry {
    int label = 0;
    std::string note;
  };
  std::map<std::string, Entry> entries;

  std::optional<int> label_for(const std::string& address) const {
    auto it = entries.find(address);
    if (it == entries.end()) return std::nullopt;
    return it->second.label;
  }

  static LabelManifest read_csv(std::istream& in);
  void write_csv(std::ostream& out) const;
};

// One aggregated bin cell: quantitative value, categorical token, or missing.
using Cell = std::variant<std::monostate, double, std::string>;

inline bool cell_missing(const Cell& c) { return std::holds_alternative<std::monostate>(c); }

using MinuteRow = std::array<Cell, kFeatureCount>;

struct DaySequence {
  std::string entity;
  std::string date;  // YYYY-MM-DD in the configured timezone
  std::vector<MinuteRow> rows;
  std::optional<int> label;
};

struct FeaturizeConfig {
  std::size_t t_bins = 1440;     // must divide 86,400 evenly
  std::string timezone = "UTC";  // "UTC" or fixed offset like "UTC-05:00"
};

struct FeaturizeResult {
  std::vector<DaySequence> sequences;  // sorted by (entity, date)
  std::size_t skipped_records = 0;     // unusable timestamps
};

// Group records into per-(entity, day) sequences of T bins. Entity is
// orig_addr when local_orig is true, else resp_addr when local_resp is true,
// else orig_addr. Quantitative cells average the present values, categorical
// cells take the most frequent token (ties: lexicographically smallest),
// norm_vol counts the bin's records. Empty bins stay all-missing.
FeaturizeResult bin_to_days(const std::vector<ConnRecord>& records,
                            const LabelManifest& manifest, const FeaturizeConfig& config);

// Seeded entity-level fold assignment: entities shuffled, then round-robin.
std::map<std::string, std::size_t> make_entity_folds(const std::vector<DaySequence>& sequences,
                                                     std::size_t k, std::uint64_t seed);

// Partition labeled sequences by the entity fold assignment. Every sequence
// must be labeled and every entity assigned.
std::vector<std::vector<std::size_t>> split_by_entity(
    const std::vector<DaySequence>& sequences,
    const std::map<std::string, std::size_t>& assignment, std::size_t k);

// JSON-lines archive: one sequence per line, cells as numbers/strings/null.
void write_sequences(const std::vector<DaySequence>& sequences, std::ostream& out);
std::vector<DaySequence> read_sequences(std::istream& in);

}  // namespace phase
