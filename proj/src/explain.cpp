#include "phase/explain.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "phase/rng.hpp"
#include "phase/schema.hpp"

namespace phase {

void PlayerGrouping::validate(std::size_t cell_count) const {
  if (groups.empty()) fail_usage("player grouping must have at least one group");
  std::set<std::size_t> seen;
  for (const auto& g : groups) {
    if (g.cells.empty()) fail_usage("player group '" + g.name + "' is empty");
    for (auto c : g.cells) {
      if (c >= cell_count) fail_usage("player group cell index out of range");
      if (!seen.insert(c).second) fail_usage("player groups overlap at cell " + std::to_string(c));
    }
  }
}

PlayerGrouping per_feature_grouping(std::size_t t_bins) {
  PlayerGrouping g;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    PlayerGrouping::Group group;
    group.name = std::string(kFeatureNames[f]);
    for (std::size_t t = 0; t < t_bins; ++t) group.cells.push_back(t * kFeatureCount + f);
    g.groups.push_back(std::move(group));
  }
  return g;
}

PlayerGrouping features_at_timestep_grouping(std::size_t t_bins, std::size_t timestep) {
  if (timestep >= t_bins) fail_usage("timestep out of range for grouping");
  PlayerGrouping g;
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    PlayerGrouping::Group group;
    group.name = std::string(kFeatureNames[f]);
    group.cells.push_back(timestep * kFeatureCount + f);
    g.groups.push_back(std::move(group));
  }
  return g;
}

namespace {

double factorial(std::size_t n) {
  double r = 1.0;
  for (std::size_t i = 2; i <= n; ++i) r *= static_cast<double>(i);
  return r;
}

double binom(std::size_t n, std::size_t k) {
  return factorial(n) / (factorial(k) * factorial(n - k));
}

std::vector<bool> mask_to_coalition(std::uint32_t mask, std::size_t players) {
  std::vector<bool> c(players, false);
  for (std::size_t i = 0; i < players; ++i)
    if (mask & (1u << i)) c[i] = true;
  return c;
}

// Gaussian elimination with partial pivoting; true on success.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
    if (std::fabs(a[pivot][col]) < 1e-12) return false;
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
      b[r] -= factor * b[col];
    }
  }
  for (std::size_t col = n; col-- > 0;) {
    double acc = b[col];
    for (std::size_t c = col + 1; c < n; ++c) acc -= a[col][c] * b[c];
    b[col] = acc / a[col][col];
  }
  return true;
}

}  // namespace

AttributionMap shapley_exact_game(const ValueFunction& v, std::size_t players) {
  if (players == 0) fail_usage("shapley: need at least one player");
  if (players > 12)
    fail_usage("shapley_exact supports at most 12 players (2^P evaluations); "
               "use the kernel estimator");
  const std::uint32_t total = 1u << players;
  std::vector<double> values(total);
  for (std::uint32_t mask = 0; mask < total; ++mask)
    values[mask] = v(mask_to_coalition(mask, players));

  // weight per |S| for the marginal-contribution sum
  std::vector<double> weight(players);
  const double p_fact = factorial(players);
  for (std::size_t s = 0; s < players; ++s)
    weight[s] = factorial(s) * factorial(players - s - 1) / p_fact;

  AttributionMap out;
  out.method = "exact";
  out.base_value = values[0];
  out.group_phi.assign(players, 0.0);
  for (std::size_t i = 0; i < players; ++i) {
    const std::uint32_t bit = 1u << i;
    for (std::uint32_t mask = 0; mask < total; ++mask) {
      if (mask & bit) continue;
      const auto s = static_cast<std::size_t>(std::popcount(mask));
      out.group_phi[i] += weight[s] * (values[mask | bit] - values[mask]);
    }
  }
  return out;
}

AttributionMap kernel_shap_game(const ValueFunction& v, std::size_t players,
                                std::size_t n_samples, std::uint64_t seed) {
  if (players == 0) fail_usage("shapley: need at least one player");
  if (players == 1) {
    AttributionMap out;
    out.method = "kernel";
    out.n_samples = n_samples;
    out.base_value = v(std::vector<bool>(1, false));
    out.group_phi = {v(std::vector<bool>(1, true)) - out.base_value};
    return out;
  }
  if (n_samples < 2 * players + 2)
    fail_usage("kernel_shap: n_samples must be at least 2*P + 2");

  const double f_base = v(std::vector<bool>(players, false));
  const double f_full = v(std::vector<bool>(players, true));
  const double delta = f_full - f_base;

  // rows: coalition indicator z, value v(z), kernel weight
  struct Row {
    std::vector<bool> z;
    double value = 0.0;
    double weight = 0.0;
  };
  std::vector<Row> rows;

  auto kernel_weight = [&](std::size_t s) {
    return static_cast<double>(players - 1) /
           (binom(players, s) * static_cast<double>(s) * static_cast<double>(players - s));
  };

  const bool enumerate = players <= 20 && (1ull << players) <= n_samples;
  if (enumerate) {
    const std::uint64_t total = 1ull << players;
    for (std::uint64_t mask = 1; mask + 1 < total; ++mask) {
      Row r;
      r.z.assign(players, false);
      std::size_t s = 0;
      for (std::size_t i = 0; i < players; ++i)
        if (mask & (1ull << i)) {
          r.z[i] = true;
          ++s;
        }
      r.value = v(r.z);
      r.weight = kernel_weight(s);
      rows.push_back(std::move(r));
    }
  } else {
    // sample sizes proportionally to the kernel mass per size, subsets
    // uniformly within a size; realized frequency then carries the kernel
    Rng rng(mix_seed(seed, 0x5a11ull + players));
    std::vector<double> size_mass(players, 0.0);  // index s = 1..P-1
    double mass_total = 0.0;
    for (std::size_t s = 1; s < players; ++s) {
      size_mass[s] = static_cast<double>(players - 1) /
                     (static_cast<double>(s) * static_cast<double>(players - s));
      mass_total += size_mass[s];
    }
    std::vector<std::size_t> perm(players);
    std::iota(perm.begin(), perm.end(), 0);
    while (rows.size() + 2 < n_samples) {
      double pick = rng.uniform() * mass_total;
      std::size_t s = 1;
      for (; s < players - 1; ++s) {
        if (pick < size_mass[s]) break;
        pick -= size_mass[s];
      }
      rng.shuffle(perm);
      Row r;
      r.z.assign(players, false);
      for (std::size_t i = 0; i < s; ++i) r.z[perm[i]] = true;
      r.value = v(r.z);
      r.weight = 1.0;
      rows.push_back(std::move(r));
    }
  }

  // Efficiency constraint folded in by eliminating the last player:
  // phi_last = delta - sum(others). Regress y on (z_j - z_last).
  const std::size_t q = players - 1;
  std::vector<std::vector<double>> ata(q, std::vector<double>(q, 0.0));
  std::vector<double> atb(q, 0.0);
  for (const auto& r : rows) {
    const double z_last = r.z[q] ? 1.0 : 0.0;
    const double y = r.value - f_base - z_last * delta;
    std::vector<double> x(q);
    for (std::size_t j = 0; j < q; ++j) x[j] = (r.z[j] ? 1.0 : 0.0) - z_last;
    for (std::size_t j = 0; j < q; ++j) {
      if (x[j] == 0.0) continue;
      atb[j] += r.weight * x[j] * y;
      for (std::size_t l = 0; l < q; ++l) ata[j][l] += r.weight * x[j] * x[l];
    }
  }

  AttributionMap out;
  out.method = "kernel";
  out.n_samples = rows.size() + 2;
  out.base_value = f_base;

  auto ata_copy = ata;
  auto sol = atb;
  if (!solve_linear(ata_copy, sol)) {
    out.ridge_applied = true;
    ata_copy = ata;
    for (std::size_t j = 0; j < q; ++j) ata_copy[j][j] += 1e-9;
    sol = atb;
    if (!solve_linear(ata_copy, sol))
      fail_numeric("kernel_shap: regression system is singular even with ridge");
  }
  out.group_phi.assign(players, 0.0);
  double sum = 0.0;
  for (std::size_t j = 0; j < q; ++j) {
    out.group_phi[j] = sol[j];
    sum += sol[j];
  }
  out.group_phi[q] = delta - sum;
  return out;
}

namespace {

ValueFunction masked_forward(const PhaseModel& model, const nn::Tensor& instance,
                             const nn::Tensor& background, const PlayerGrouping& grouping) {
  if (!instance.same_shape(background))
    fail_usage("explain: instance and background shapes differ");
  grouping.validate(instance.size());
  return [&model, &instance, &background, &grouping](const std::vector<bool>& coalition) {
    nn::Tensor x = instance;
    for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
      if (coalition[g]) continue;
      for (auto c : grouping.groups[g].cells) x[c] = background[c];
    }
    return model.forward(x, nn::Mode::Infer, 0);
  };
}

void spread_group_values(AttributionMap& map, const PlayerGrouping& grouping,
                         const std::vector<std::size_t>& shape) {
  map.values = nn::Tensor(shape);
  for (std::size_t g = 0; g < grouping.groups.size(); ++g) {
    const auto& cells = grouping.groups[g].cells;
    const double share = map.group_phi[g] / static_cast<double>(cells.size());
    for (auto c : cells) map.values[c] = share;
  }
}

}  // namespace

AttributionMap shapley_exact(const PhaseModel& model, const nn::Tensor& instance,
                             const nn::Tensor& background, const PlayerGrouping& grouping) {
  auto v = masked_forward(model, instance, background, grouping);
  AttributionMap map = shapley_exact_game(v, grouping.groups.size());
  spread_group_values(map, grouping, instance.shape);
  map.background_ref = "background";
  return map;
}

AttributionMap kernel_shap(const PhaseModel& model, const nn::Tensor& instance,
                           const nn::Tensor& background, const PlayerGrouping& grouping,
                           std::size_t n_samples, std::uint64_t seed) {
  auto v = masked_forward(model, instance, background, grouping);
  AttributionMap map = kernel_shap_game(v, grouping.groups.size(), n_samples, seed);
  spread_group_values(map, grouping, instance.shape);
  map.background_ref = "background";
  return map;
}

nn::Tensor missing_background(const FeatureCodec& codec) {
  nn::Tensor bg({codec.t_bins(), kFeatureCount});
  for (std::size_t t = 0; t < codec.t_bins(); ++t)
    for (std::size_t f = 0; f < kFeatureCount; ++f) bg(t, f) = codec.scale(f, -1.0);
  return bg;
}

AttributionMap explain_day(const PhaseModel& model, const nn::Tensor& instance,
                           const nn::Tensor& background, std::size_t n_samples,
                           std::uint64_t seed, std::size_t threads) {
  if (instance.dim(1) != kFeatureCount)
    fail_usage("explain_day expects the full feature schema");
  const std::size_t t_bins = instance.dim(0);
  AttributionMap day;
  day.method = "kernel";
  day.n_samples = n_samples;
  day.values = nn::Tensor({t_bins, kFeatureCount});
  day.base_value = model.forward(background, nn::Mode::Infer, 0);
  day.background_ref = "all-missing";

  auto explain_timestep = [&](std::size_t t) {
    const auto grouping = features_at_timestep_grouping(t_bins, t);
    AttributionMap step = kernel_shap(model, instance, background, grouping, n_samples,
                                      mix_seed(seed, t));
    for (std::size_t f = 0; f < kFeatureCount; ++f) day.values(t, f) = step.values(t, f);
  };
  if (threads > 1 && t_bins > 1) {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(std::min(threads, t_bins));
    for (std::size_t w = 0; w < errors.size(); ++w) {
      pool.emplace_back([&, w]() {
        try {
          for (std::size_t t = next.fetch_add(1); t < t_bins; t = next.fetch_add(1))
            explain_timestep(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (std::size_t t = 0; t < t_bins; ++t) explain_timestep(t);
  }
  return day;
}

std::vector<TopFeature> top_feature_series(const AttributionMap& attribution) {
  const std::size_t t_bins = attribution.values.dim(0);
  // feature order by name, so argmax ties resolve lexicographically
  std::vector<std::size_t> by_name(kFeatureCount);
  std::iota(by_name.begin(), by_name.end(), 0);
  std::sort(by_name.begin(), by_name.end(), [](std::size_t a, std::size_t b) {
    return kFeatureNames[a] < kFeatureNames[b];
  });

  std::vector<TopFeature> out;
  out.reserve(t_bins);
  for (std::size_t t = 0; t < t_bins; ++t) {
    std::size_t best = by_name[0];
    for (auto f : by_name)
      if (std::fabs(attribution.values(t, f)) > std::fabs(attribution.values(t, best)))
        best = f;
    out.push_back({t, std::string(kFeatureNames[best]), attribution.values(t, best)});
  }
  return out;
}

nn::Tensor importance_heatmap(const std::vector<AttributionMap>& attributions) {
  if (attributions.empty()) fail_data("importance_heatmap: need at least one explained instance");
  const std::size_t t_bins = attributions.front().values.dim(0);
  nn::Tensor heat({kFeatureCount, t_bins});
  for (const auto& a : attributions) {
    if (a.values.dim(0) != t_bins) fail_data("importance_heatmap: mixed sequence lengths");
    for (std::size_t t = 0; t < t_bins; ++t)
      for (std::size_t f = 0; f < kFeatureCount; ++f)
        heat(f, t) += std::fabs(a.values(t, f));
  }
  const double inv = 1.0 / static_cast<double>(attributions.size());
  for (auto& v : heat.data) v *= inv;
  return heat;
}

std::vector<BeeswarmRow> beeswarm_table(const std::vector<AttributionMap>& attributions,
                                        const std::vector<nn::Tensor>& encoded_instances,
                                        const FeatureCodec& codec, std::size_t timestep) {
  if (attributions.size() != encoded_instances.size() || attributions.empty())
    fail_data("beeswarm_table: attributions and instances must align");
  if (timestep >= attributions.front().values.dim(0))
    fail_data("beeswarm_table: timestep out of range");

  std::vector<double> mean_abs(kFeatureCount, 0.0);
  for (const auto& a : attributions)
    for (std::size_t f = 0; f < kFeatureCount; ++f)
      mean_abs[f] += std::fabs(a.values(timestep, f));
  for (auto& v : mean_abs) v /= static_cast<double>(attributions.size());

  std::vector<std::size_t> order(kFeatureCount);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (mean_abs[a] != mean_abs[b]) return mean_abs[a] > mean_abs[b];
    return kFeatureNames[a] < kFeatureNames[b];
  });

  std::vector<BeeswarmRow> rows;
  rows.reserve(kFeatureCount * attributions.size());
  for (auto f : order) {
    for (std::size_t i = 0; i < attributions.size(); ++i) {
      BeeswarmRow row;
      row.feature = std::string(kFeatureNames[f]);
      row.encoded = encoded_instances[i](timestep, f);
      row.real = codec.translate(f, row.encoded);
      row.phi = attributions[i].values(timestep, f);
      row.instance = i;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_top_series_csv(const std::vector<TopFeature>& series, std::ostream& out,
                          const std::string& config_hash, std::uint64_t seed) {
  out << "# config_hash=" << config_hash << " seed=" << seed << "\n";
  out << "t,feature,phi\n";
  for (const auto& s : series)
    out << s.timestep << ',' << s.feature << ',' << format_double(s.phi) << '\n';
}

void write_heatmap_csv(const nn::Tensor& heatmap, std::ostream& out,
                       const std::string& config_hash, std::uint64_t seed) {
  out << "# config_hash=" << config_hash << " seed=" << seed << "\n";
  out << "feature";
  for (std::size_t t = 0; t < heatmap.dim(1); ++t) out << ",t" << t;
  out << '\n';
  for (std::size_t f = 0; f < heatmap.dim(0); ++f) {
    out << kFeatureNames[f];
    for (std::size_t t = 0; t < heatmap.dim(1); ++t) out << ',' << format_double(heatmap(f, t));
    out << '\n';
  }
}

void write_beeswarm_csv(const std::vector<BeeswarmRow>& rows, std::ostream& out,
                        const std::string& config_hash, std::uint64_t seed) {
  out << "# config_hash=" << config_hash << " seed=" << seed << "\n";
  out << "feature,instance,encoded,real,phi\n";
  for (const auto& r : rows)
    out << r.feature << ',' << r.instance << ',' << format_double(r.encoded) << ',' << r.real
        << ',' << format_double(r.phi) << '\n';
}

void write_heatmap_svg(const nn::Tensor& heatmap, std::ostream& out) {
  const std::size_t rows = heatmap.dim(0), cols = heatmap.dim(1);
  double max_v = 0.0;
  for (double v : heatmap.data) max_v = std::max(max_v, v);
  if (max_v <= 0.0) max_v = 1.0;

  const int cell_w = 8, cell_h = 16, label_w = 110;
  const int width = label_w + static_cast<int>(cols) * cell_w;
  const int height = static_cast<int>(rows) * cell_h + 24;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"#1a1a2e\"/>\n";
  for (std::size_t f = 0; f < rows; ++f) {
    out << "<text x=\"4\" y=\"" << (f * cell_h + 12)
        << "\" font-family=\"monospace\" font-size=\"11\" fill=\"#e0e0e0\">"
        << kFeatureNames[f] << "</text>\n";
    for (std::size_t t = 0; t < cols; ++t) {
      const double ratio = heatmap(f, t) / max_v;
      // dark blue -> yellow ramp
      const int r = static_cast<int>(30 + ratio * 225);
      const int g = static_cast<int>(30 + ratio * 200);
      const int b = static_cast<int>(80 + (1.0 - ratio) * 120);
      out << "<rect x=\"" << (label_w + static_cast<int>(t) * cell_w) << "\" y=\""
          << (f * cell_h) << "\" width=\"" << cell_w << "\" height=\"" << cell_h
          << "\" fill=\"rgb(" << r << ',' << g << ',' << b << ")\"/>\n";
    }
  }
  out << "<text x=\"4\" y=\"" << (height - 8)
      << "\" font-family=\"monospace\" font-size=\"11\" fill=\"#e0e0e0\">mean |phi| per "
         "(feature, timestep)</text>\n";
  out << "</svg>\n";
}

}  // namespace phase
