#include "phase/featurize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phase/rng.hpp"

namespace phase {

LabelManifest LabelManifest::read_csv(std::istream& in) {
  LabelManifest m;
  std::string line;
  std::size_t lineno = 0;
  bool body_started = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!body_started) {
      body_started = true;
      if (line.rfind("address,label", 0) == 0) continue;  // header
    }
    auto cols = split_view(line, ',');
    if (cols.size() < 2)
      fail_data("manifest line " + std::to_string(lineno) + ": expected address,label[,note]");
    std::string address(trim_view(cols[0]));
    auto label_str = trim_view(cols[1]);
    if (label_str != "0" && label_str != "1")
      fail_data("manifest line " + std::to_string(lineno) + ": label must be 0 or 1");
    if (m.entries.count(address))
      fail_data("manifest line " + std::to_string(lineno) + ": duplicate address '" + address +
                "'");
    Entry e;
    e.label = label_str == "1" ? 1 : 0;
    if (cols.size() >= 3) e.note = std::string(trim_view(cols[2]));
    m.entries.emplace(std::move(address), std::move(e));
  }
  return m;
}

void LabelManifest::write_csv(std::ostream& out) const {
  out << "address,label,note\n";
  for (const auto& [addr, e] : entries) out << addr << ',' << e.label << ',' << e.note << '\n';
}

namespace {

const std::string& entity_of(const ConnRecord& r) {
  if (r.local_orig == Ternary::True) return r.orig_addr;
  if (r.local_resp == Ternary::True) return r.resp_addr;
  return r.orig_addr;
}

// Per-bin accumulation state for one (entity, day).
struct BinAgg {
  std::uint64_t count = 0;                              // norm_vol
  std::array<double, kFeatureCount> sum{};              // quantitative sums
  std::array<std::uint64_t, kFeatureCount> present{};   // quantitative counts
  std::array<std::map<std::string, std::uint64_t>, kFeatureCount> tokens;  // categorical
};

void add_token(BinAgg& agg, std::size_t f, std::string token) {
  ++agg.tokens[f][std::move(token)];
}

void add_value(BinAgg& agg, std::size_t f, double v) {
  agg.sum[f] += v;
  ++agg.present[f];
}

void accumulate(BinAgg& agg, const ConnRecord& r) {
  ++agg.count;
  add_token(agg, 0, std::to_string(r.orig_port));
  add_token(agg, 1, std::to_string(r.resp_port));
  add_token(agg, 2, r.proto);
  if (r.service) add_token(agg, 3, *r.service);
  add_token(agg, 4, r.conn_state);
  add_token(agg, 5, std::string(ternary_token(r.local_orig)));
  add_token(agg, 6, std::string(ternary_token(r.local_resp)));
  if (r.history) add_token(agg, 7, *r.history);
  if (r.duration) add_value(agg, 8, *r.duration);
  if (r.orig_bytes) add_value(agg, 9, static_cast<double>(*r.orig_bytes));
  if (r.resp_bytes) add_value(agg, 10, static_cast<double>(*r.resp_bytes));
  add_value(agg, 11, static_cast<double>(r.missed_bytes));
  add_value(agg, 12, static_cast<double>(r.orig_ip_bytes));
  add_value(agg, 13, static_cast<double>(r.resp_ip_bytes));
  add_value(agg, 14, static_cast<double>(r.orig_pkts));
  add_value(agg, 15, static_cast<double>(r.resp_pkts));
}

MinuteRow finish_bin(const BinAgg& agg) {
  MinuteRow row;  // default: all missing
  if (agg.count == 0) return row;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    if (f == 16) {
      row[f] = static_cast<double>(agg.count);
    } else if (is_categorical(f)) {
      const auto& counts = agg.tokens[f];
      if (counts.empty()) continue;
      // most frequent token; ties break to the lexicographically smallest,
      // which std::map iteration order delivers for free
      auto best = counts.begin();
      for (auto it = std::next(counts.begin()); it != counts.end(); ++it)
        if (it->second > best->second) best = it;
      row[f] = best->first;
    } else if (agg.present[f] > 0) {
      row[f] = agg.sum[f] / static_cast<double>(agg.present[f]);
    }
  }
  return row;
}

}  // namespace

FeaturizeResult bin_to_days(const std::vector<ConnRecord>& records,
                            const LabelManifest& manifest, const FeaturizeConfig& config) {
  if (config.t_bins == 0 || 86400 % config.t_bins != 0)
    fail_usage("t_bins (" + std::to_string(config.t_bins) + ") must divide 86,400 evenly");
  const std::int64_t offset = parse_utc_offset(config.timezone);
  const double bin_seconds = 86400.0 / static_cast<double>(config.t_bins);

  FeaturizeResult result;
  // (entity, day index) -> bin aggregations
  std::map<std::pair<std::string, std::int64_t>, std::vector<BinAgg>> groups;
  for (const auto& r : records) {
    if (!std::isfinite(r.ts) || r.ts <= 0.0) {
      ++result.skipped_records;
      continue;
    }
    const double local = r.ts + static_cast<double>(offset);
    const auto day = static_cast<std::int64_t>(std::floor(local / 86400.0));
    const double within = local - static_cast<double>(day) * 86400.0;
    auto bin = static_cast<std::size_t>(within / bin_seconds);
    if (bin >= config.t_bins) bin = config.t_bins - 1;  // guard the 24:00 boundary
    auto& bins = groups[{entity_of(r), day}];
    if (bins.empty()) bins.resize(config.t_bins);
    accumulate(bins[bin], r);
  }

  for (const auto& [key, bins] : groups) {
    DaySequence seq;
    seq.entity = key.first;
    seq.date = format_date(civil_from_days(key.second));
    seq.rows.reserve(config.t_bins);
    for (const auto& agg : bins) seq.rows.push_back(finish_bin(agg));
    seq.label = manifest.label_for(seq.entity);
    result.sequences.push_back(std::move(seq));
  }
  // std::map iteration already gives (entity, day) order; keep it explicit
  std::sort(result.sequences.begin(), result.sequences.end(),
            [](const DaySequence& a, const DaySequence& b) {
              return std::tie(a.entity, a.date) < std::tie(b.entity, b.date);
            });
  return result;
}

std::map<std::string, std::size_t> make_entity_folds(const std::vector<DaySequence>& sequences,
                                                     std::size_t k, std::uint64_t seed) {
  if (k == 0) fail_usage("fold count must be positive");
  std::vector<std::string> entities;
  for (const auto& s : sequences)
    if (std::find(entities.begin(), entities.end(), s.entity) == entities.end())
      entities.push_back(s.entity);
  std::sort(entities.begin(), entities.end());
  Rng rng(seed);
  rng.shuffle(entities);
  std::map<std::string, std::size_t> assignment;
  for (std::size_t i = 0; i < entities.size(); ++i) assignment[entities[i]] = i % k;
  return assignment;
}

std::vector<std::vector<std::size_t>> split_by_entity(
    const std::vector<DaySequence>& sequences,
    const std::map<std::string, std::size_t>& assignment, std::size_t k) {
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const auto& s = sequences[i];
    if (!s.label)
      fail_data("unlabeled sequence for entity '" + s.entity + "' in a labeled split");
    auto it = assignment.find(s.entity);
    if (it == assignment.end())
      fail_data("entity '" + s.entity + "' has no fold assignment");
    if (it->second >= k) fail_data("fold id out of range for entity '" + s.entity + "'");
    folds[it->second].push_back(i);
  }
  return folds;
}

void write_sequences(const std::vector<DaySequence>& sequences, std::ostream& out) {
  for (const auto& s : sequences) {
    nlohmann::json obj;
    obj["entity"] = s.entity;
    obj["date"] = s.date;
    if (s.label) obj["label"] = *s.label;
    else obj["label"] = nullptr;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : s.rows) {
      nlohmann::json cells = nlohmann::json::array();
      for (const auto& cell : row) {
        if (cell_missing(cell)) cells.push_back(nullptr);
        else if (std::holds_alternative<double>(cell)) cells.push_back(std::get<double>(cell));
        else cells.push_back(std::get<std::string>(cell));
      }
      rows.push_back(std::move(cells));
    }
    obj["rows"] = std::move(rows);
    out << obj.dump() << '\n';
  }
}

std::vector<DaySequence> read_sequences(std::istream& in) {
  std::vector<DaySequence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto trimmed = trim_view(line);
    if (trimmed.empty()) continue;
    nlohmann::json obj = nlohmann::json::parse(trimmed, nullptr, false);
    if (obj.is_discarded() || !obj.is_object() || !obj.contains("rows"))
      fail_data("sequence archive line " + std::to_string(lineno) + ": invalid record");
    DaySequence s;
    s.entity = obj.value("entity", "");
    s.date = obj.value("date", "");
    if (obj.contains("label") && !obj["label"].is_null()) s.label = obj["label"].get<int>();
    for (const auto& row_json : obj["rows"]) {
      if (!row_json.is_array() || row_json.size() != kFeatureCount)
        fail_data("sequence archive line " + std::to_string(lineno) + ": row width mismatch");
      MinuteRow row;
      for (std::size_t f = 0; f < kFeatureCount; ++f) {
        const auto& c = row_json[f];
        if (c.is_null()) continue;
        if (c.is_number()) row[f] = c.get<double>();
        else if (c.is_string()) row[f] = c.get<std::string>();
        else fail_data("sequence archive line " + std::to_string(lineno) + ": bad cell type");
      }
      s.rows.push_back(std::move(row));
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace phase
