#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "phase/featurize.hpp"
#include "phase/zeek.hpp"

namespace phase {

enum class PersonaProfile { HumanDiurnal, AutomatedBeacon, PersonaDefault, PersonaEnhanced };

PersonaProfile profile_from_name(std::string_view name);
std::string_view profile_name(PersonaProfile p);

struct PersonaSpec {
  PersonaProfile profile = PersonaProfile::HumanDiurnal;
  std::size_t entities = 1;
  std::size_t days = 1;
  std::uint64_t seed = 1;
  std::string start_date = "2025-03-03";
  // entity addresses <prefix>.<i>.<j>; empty = per-profile default
  // (10.1 human, 10.2 beacon, 10.3 default persona, 10.4 enhanced)
  std::string address_prefix;

  // active window (human profile), minutes of day
  std::size_t active_start_min = 540;  // 09:00
  std::size_t active_end_min = 1020;   // 17:00

  // task interarrival, seconds (personas; human uses bursty clusters)
  double interarrival_min_s = 120.0;
  double interarrival_max_s = 600.0;

  // beacon period, seconds
  double beacon_period_s = 300.0;
  bool maintenance_spike = true;  // burst near 01:00 for automated devices

  // idle rule (enhanced persona): after N ~ U[n_min, n_max] tasks, go idle
  std::size_t idle_tasks_min = 5;
  std::size_t idle_tasks_max = 12;
  double idle_minutes = 60.0;

  // payload scale (log-normal for human, near-constant for the rest)
  double human_bytes_mu = 8.0;
  double human_bytes_sigma = 2.0;

  void validate() const;
};

struct SynthResult {
  std::vector<ConnRecord> records;  // sorted by (entity, ts)
  LabelManifest manifest;
};

// Deterministic per (spec, seed); entities get derived seeds so generation
// order never changes the traffic.
SynthResult generate(const PersonaSpec& spec);

// Desk-scale stand-in corpus: 40 human-diurnal + 120 automated-beacon
// entity-days at T = 96 (15-minute bins), labels included.
SynthResult default_benchmark(std::uint64_t seed);

inline constexpr std::size_t kBenchmarkTBins = 96;

}  // namespace phase
