#include "phase/synth.hpp"

#include <algorithm>
#include <cmath>

#include "phase/rng.hpp"

namespace phase {

PersonaProfile profile_from_name(std::string_view name) {
  if (name == "human" || name == "HumanDiurnal") return PersonaProfile::HumanDiurnal;
  if (name == "beacon" || name == "AutomatedBeacon") return PersonaProfile::AutomatedBeacon;
  if (name == "persona-default" || name == "PersonaDefault")
    return PersonaProfile::PersonaDefault;
  if (name == "persona-enhanced" || name == "PersonaEnhanced")
    return PersonaProfile::PersonaEnhanced;
  fail_usage("unknown persona profile '" + std::string(name) +
             "' (human, beacon, persona-default, persona-enhanced)");
}

std::string_view profile_name(PersonaProfile p) {
  switch (p) {
    case PersonaProfile::HumanDiurnal: return "HumanDiurnal";
    case PersonaProfile::AutomatedBeacon: return "AutomatedBeacon";
    case PersonaProfile::PersonaDefault: return "PersonaDefault";
    default: return "PersonaEnhanced";
  }
}

void PersonaSpec::validate() const {
  if (entities == 0 || days == 0) fail_usage("persona spec: entities and days must be > 0");
  if (active_start_min >= 1440 || active_end_min > 1440 || active_start_min >= active_end_min)
    fail_usage("persona spec: active window must lie within [0, 1440)");
  if (interarrival_min_s <= 0 || interarrival_max_s < interarrival_min_s)
    fail_usage("persona spec: interarrival range invalid");
  if (beacon_period_s <= 0) fail_usage("persona spec: beacon period must be positive");
  if (idle_tasks_min > idle_tasks_max || idle_tasks_min == 0)
    fail_usage("persona spec: idle task range invalid");
  if (idle_minutes <= 0) fail_usage("persona spec: idle duration must be positive");
  parse_date(start_date);
}

namespace {

struct Emitter {
  std::vector<ConnRecord>* out;
  std::string entity;

  void emit(double ts, int orig_port, int resp_port, const std::string& peer,
            const std::string& proto, const std::string& service, double duration,
            std::uint64_t orig_bytes, std::uint64_t resp_bytes, std::uint64_t orig_pkts,
            std::uint64_t resp_pkts, const std::string& conn_state,
            const std::string& history) {
    ConnRecord r;
    r.ts = ts;
    r.orig_addr = entity;
    r.resp_addr = peer;
    r.orig_port = orig_port;
    r.resp_port = resp_port;
    r.proto = proto;
    r.service = service;
    r.duration = duration;
    r.orig_bytes = orig_bytes;
    r.resp_bytes = resp_bytes;
    r.conn_state = conn_state;
    r.local_orig = Ternary::True;
    r.local_resp = Ternary::False;
    r.missed_bytes = 0;
    r.history = history;
    r.orig_pkts = orig_pkts;
    r.orig_ip_bytes = orig_bytes + 40 * orig_pkts;
    r.resp_pkts = resp_pkts;
    r.resp_ip_bytes = resp_bytes + 40 * resp_pkts;
    out->push_back(std::move(r));
  }
};

std::string peer_address(Rng& rng) {
  return "203.0.113." + std::to_string(rng.uniform_int(1, 254));
}

struct WebPick {
  std::string service;
  int port;
};

WebPick pick_service(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.55) return {"ssl", 443};
  if (u < 0.85) return {"http", 80};
  return {"dns", 53};
}

void human_day(Emitter& em, Rng& rng, double day_start, std::size_t window_start_min,
               std::size_t window_end_min, double bytes_mu, double bytes_sigma) {
  // bursty task clusters concentrated in the active window; cluster centers
  // average two uniforms so density ramps up and down at the edges
  const double w0 = static_cast<double>(window_start_min) * 60.0;
  const double w1 = static_cast<double>(window_end_min) * 60.0;
  const auto clusters = static_cast<std::size_t>(rng.uniform_int(8, 18));
  for (std::size_t c = 0; c < clusters; ++c) {
    const double u = 0.5 * (rng.uniform() + rng.uniform());
    double t = day_start + w0 + u * (w1 - w0);
    const auto burst = static_cast<std::size_t>(rng.uniform_int(4, 40));
    for (std::size_t i = 0; i < burst; ++i) {
      t += rng.exponential(1.0 / 4.0);  // ~4 s between connections in a burst
      if (t >= day_start + 86400.0) break;
      auto svc = pick_service(rng);
      const auto orig_b = static_cast<std::uint64_t>(rng.lognormal(bytes_mu - 1.5, bytes_sigma));
      const auto resp_b = static_cast<std::uint64_t>(rng.lognormal(bytes_mu, bytes_sigma));
      const std::uint64_t orig_p = 1 + orig_b / 1200;
      const std::uint64_t resp_p = 1 + resp_b / 1200;
      const bool ok = rng.uniform() < 0.9;
      em.emit(t, static_cast<int>(rng.uniform_int(32768, 60999)), svc.port, peer_address(rng),
              svc.service == "dns" ? "udp" : "tcp", svc.service,
              std::min(600.0, rng.lognormal(-0.5, 1.2)), orig_b, resp_b, orig_p, resp_p,
              ok ? "SF" : (rng.uniform() < 0.5 ? "S1" : "RSTO"),
              ok ? "ShADadFf" : "ShADad");
    }
  }
  // sparse background traffic at night
  for (std::size_t hour = 0; hour < 24; ++hour) {
    const std::size_t minute = hour * 60;
    if (minute >= window_start_min && minute < window_end_min) continue;
    if (rng.uniform() >= 0.25) continue;
    const auto n = static_cast<std::size_t>(rng.uniform_int(1, 3));
    for (std::size_t i = 0; i < n; ++i) {
      const double t = day_start + static_cast<double>(minute) * 60.0 + rng.uniform(0, 3540);
      em.emit(t, static_cast<int>(rng.uniform_int(32768, 60999)), 443, peer_address(rng),
              "tcp", "ssl", rng.uniform(0.01, 2.0), 150 + rng.below(400), 200 + rng.below(900),
              2, 2, "SF", "ShADaFf");
    }
  }
}

void beacon_day(Emitter& em, Rng& rng, double day_start, double period, double phase,
                const WebPick& svc, std::uint64_t orig_b, std::uint64_t resp_b, int orig_port,
                bool maintenance) {
  for (double t = day_start + phase; t < day_start + 86400.0; t += period) {
    em.emit(t, orig_port, svc.port, "203.0.113.10", svc.service == "dns" ? "udp" : "tcp",
            svc.service, 0.02, orig_b, resp_b, 1, 1, "SF", "Dd");
  }
  if (maintenance) {
    // scheduled update burst shortly after 01:00
    double t = day_start + 3660.0 + rng.uniform(0, 120);
    const auto n = static_cast<std::size_t>(rng.uniform_int(30, 45));
    for (std::size_t i = 0; i < n; ++i) {
      t += rng.uniform(15.0, 40.0);
      em.emit(t, static_cast<int>(rng.uniform_int(32768, 60999)), 443, "203.0.113.20", "tcp",
              "ssl", rng.uniform(0.5, 8.0), 400 + rng.below(4000), 20000 + rng.below(400000),
              5 + rng.below(40), 20 + rng.below(400), "SF", "ShADadFf");
    }
  }
}

void persona_day(Emitter& em, Rng& rng, double day_start, const PersonaSpec& spec,
                 bool idle_rule) {
  double t = day_start + rng.uniform(0, spec.interarrival_max_s);
  std::size_t tasks_until_idle =
      idle_rule ? static_cast<std::size_t>(
                      rng.uniform_int(static_cast<std::int64_t>(spec.idle_tasks_min),
                                      static_cast<std::int64_t>(spec.idle_tasks_max)))
                : 0;
  while (t < day_start + 86400.0) {
    // one task: a short browse/shell action of 1-3 connections
    const auto conns = static_cast<std::size_t>(rng.uniform_int(1, 3));
    for (std::size_t i = 0; i < conns; ++i) {
      auto svc = pick_service(rng);
      const double ts = t + static_cast<double>(i) * rng.uniform(0.5, 3.0);
      if (ts >= day_start + 86400.0) break;
      // minimal data exchange in both directions
      em.emit(ts, static_cast<int>(rng.uniform_int(32768, 60999)), svc.port, peer_address(rng),
              svc.service == "dns" ? "udp" : "tcp", svc.service, rng.uniform(0.01, 0.4),
              60 + rng.below(160), 60 + rng.below(160), 1 + rng.below(3), 1 + rng.below(3),
              "SF", "ShADFf");
    }
    if (idle_rule) {
      if (tasks_until_idle <= 1) {
        t += spec.idle_minutes * 60.0;
        tasks_until_idle = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(spec.idle_tasks_min),
                            static_cast<std::int64_t>(spec.idle_tasks_max)));
      } else {
        --tasks_until_idle;
      }
    }
    t += rng.uniform(spec.interarrival_min_s, spec.interarrival_max_s);
  }
}

}  // namespace

SynthResult generate(const PersonaSpec& spec) {
  spec.validate();
  SynthResult result;
  const std::int64_t day0 = days_from_civil(parse_date(spec.start_date));
  const int label = spec.profile == PersonaProfile::HumanDiurnal ? 1 : 0;
  std::string prefix = spec.address_prefix;
  if (prefix.empty()) {
    switch (spec.profile) {
      case PersonaProfile::HumanDiurnal: prefix = "10.1"; break;
      case PersonaProfile::AutomatedBeacon: prefix = "10.2"; break;
      case PersonaProfile::PersonaDefault: prefix = "10.3"; break;
      case PersonaProfile::PersonaEnhanced: prefix = "10.4"; break;
    }
  }

  for (std::size_t e = 0; e < spec.entities; ++e) {
    Rng entity_rng = Rng(spec.seed).derive(0xe17 + e);
    const std::string address =
        prefix + "." + std::to_string(e / 250 + 1) + "." + std::to_string(e % 250 + 1);
    Emitter em{&result.records, address};
    result.manifest.entries[address] = {label, std::string(profile_name(spec.profile))};

    // per-entity stable habits
    const auto window_shift = entity_rng.uniform_int(-45, 45);
    const auto w_start = static_cast<std::size_t>(std::clamp<std::int64_t>(
        static_cast<std::int64_t>(spec.active_start_min) + window_shift, 0, 1380));
    const auto w_end = static_cast<std::size_t>(std::clamp<std::int64_t>(
        static_cast<std::int64_t>(spec.active_end_min) + window_shift,
        static_cast<std::int64_t>(w_start) + 60, 1440));
    const double beacon_phase = entity_rng.uniform(0.0, spec.beacon_period_s);
    const auto beacon_orig_port = static_cast<int>(entity_rng.uniform_int(40000, 60000));
    const WebPick beacon_svc = entity_rng.uniform() < 0.5 ? WebPick{"ssl", 443}
                                                          : WebPick{"dns", 53};
    const std::uint64_t beacon_orig_b = 90 + 8 * entity_rng.below(6);
    const std::uint64_t beacon_resp_b = 60 + 8 * entity_rng.below(6);

    for (std::size_t d = 0; d < spec.days; ++d) {
      Rng rng = entity_rng.derive(0xda7 + d);
      const double day_start = static_cast<double>((day0 + static_cast<std::int64_t>(d)) * 86400);
      switch (spec.profile) {
        case PersonaProfile::HumanDiurnal:
          human_day(em, rng, day_start, w_start, w_end, spec.human_bytes_mu,
                    spec.human_bytes_sigma);
          break;
        case PersonaProfile::AutomatedBeacon:
          beacon_day(em, rng, day_start, spec.beacon_period_s, beacon_phase, beacon_svc,
                     beacon_orig_b, beacon_resp_b, beacon_orig_port, spec.maintenance_spike);
          break;
        case PersonaProfile::PersonaDefault:
          persona_day(em, rng, day_start, spec, false);
          break;
        case PersonaProfile::PersonaEnhanced:
          persona_day(em, rng, day_start, spec, true);
          break;
      }
    }
  }
  std::sort(result.records.begin(), result.records.end(),
            [](const ConnRecord& a, const ConnRecord& b) {
              return std::tie(a.ts, a.orig_addr) < std::tie(b.ts, b.orig_addr);
            });
  return result;
}

SynthResult default_benchmark(std::uint64_t seed) {
  SynthResult result;
  auto merge = [&result](SynthResult&& part) {
    for (auto& [addr, entry] : part.manifest.entries)
      result.manifest.entries[addr] = std::move(entry);
    result.records.insert(result.records.end(),
                          std::make_move_iterator(part.records.begin()),
                          std::make_move_iterator(part.records.end()));
  };

  PersonaSpec humans;
  humans.profile = PersonaProfile::HumanDiurnal;
  humans.entities = 8;
  humans.days = 5;
  humans.seed = mix_seed(seed, 1);
  humans.address_prefix = "10.1";
  merge(generate(humans));

  // three beacon cadences, half with the maintenance burst
  const double periods[] = {120.0, 300.0, 600.0};
  for (std::size_t g = 0; g < 3; ++g) {
    PersonaSpec beacons;
    beacons.profile = PersonaProfile::AutomatedBeacon;
    beacons.entities = 8;
    beacons.days = 5;
    beacons.seed = mix_seed(seed, 100 + g);
    beacons.address_prefix = "10." + std::to_string(20 + g);
    beacons.beacon_period_s = periods[g];
    beacons.maintenance_spike = g % 2 == 0;
    merge(generate(beacons));
  }

  std::sort(result.records.begin(), result.records.end(),
            [](const ConnRecord& a, const ConnRecord& b) {
              return std::tie(a.ts, a.orig_addr) < std::tie(b.ts, b.orig_addr);
            });
  return result;
}

}  // namespace phase
