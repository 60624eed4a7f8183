#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "phase/codec.hpp"
#include "phase/model.hpp"
#include "phase/nn/tensor.hpp"

namespace phase {

// Partition of (timestep, feature) cells into named player groups. Cells not
// covered by any group are held at the instance's values in every coalition.
struct PlayerGrouping {
  struct Group {
    std::string name;
    std::vector<std::size_t> cells;  // flat index t * F + f
  };
  std::vector<Group> groups;

  void validate(std::size_t cell_count) const;  // disjointness, bounds
};

PlayerGrouping per_feature_grouping(std::size_t t_bins);
PlayerGrouping features_at_timestep_grouping(std::size_t t_bins, std::size_t timestep);

struct AttributionMap {
  double base_value = 0.0;  // model output with every player masked out
  nn::Tensor values;        // T x F, group attributions spread over cells
  std::vector<double> group_phi;
  std::string instance_ref;
  std::string background_ref;
  std::string method;  // "exact" | "kernel"
  std::size_t n_samples = 0;
  bool ridge_applied = false;
};

using ValueFunction = std::function<double(const std::vector<bool>& coalition)>;

// Exact Shapley over all 2^P coalitions; refuses P > 12.
AttributionMap shapley_exact_game(const ValueFunction& v, std::size_t players);

// Shapley-kernel weighted least squares on sampled coalitions, efficiency
// constrained. Enumerates all coalitions when the budget covers them.
AttributionMap kernel_shap_game(const ValueFunction& v, std::size_t players,
                                std::size_t n_samples, std::uint64_t seed);

// Masked-forward games over a model instance: coalition members keep the
// instance's cells, everything else in the grouping takes the background.
AttributionMap shapley_exact(const PhaseModel& model, const nn::Tensor& instance,
                             const nn::Tensor& background, const PlayerGrouping& grouping);
AttributionMap kernel_shap(const PhaseModel& model, const nn::Tensor& instance,
                           const nn::Tensor& background, const PlayerGrouping& grouping,
                           std::size_t n_samples, std::uint64_t seed);

// All-missing reference sequence (encoded -1 cells, then scaled).
nn::Tensor missing_background(const FeatureCodec& codec);

// Per-timestep games across a whole day assembled into one T x F map. The
// games are independent, so they may run on several threads; per-timestep
// seeds are derived from `seed`, keeping the result identical for any
// thread count.
AttributionMap explain_day(const PhaseModel& model, const nn::Tensor& instance,
                           const nn::Tensor& background, std::size_t n_samples,
                           std::uint64_t seed, std::size_t threads = 1);

// argmax_f |phi[t, f]| per timestep; ties pick the lexicographically
// smallest feature name.
struct TopFeature {
  std::size_t timestep = 0;
  std::string feature;
  double phi = 0.0;
};
std::vector<TopFeature> top_feature_series(const AttributionMap& attribution);

// F x T elementwise mean of |phi| across instances.
nn::Tensor importance_heatmap(const std::vector<AttributionMap>& attributions);

struct BeeswarmRow {
  std::string feature;
  double encoded = 0.0;   // scaled model input in [0, 1]
  std::string real;       // inverse-codec translation
  double phi = 0.0;
  std::size_t instance = 0;
};

// Plot-ready rows at one timestep over a set of explained instances,
// features ordered by mean |phi| descending (ties by name).
std::vector<BeeswarmRow> beeswarm_table(const std::vector<AttributionMap>& attributions,
                                        const std::vector<nn::Tensor>& encoded_instances,
                                        const FeatureCodec& codec, std::size_t timestep);

void write_top_series_csv(const std::vector<TopFeature>& series, std::ostream& out,
                          const std::string& config_hash, std::uint64_t seed);
void write_heatmap_csv(const nn::Tensor& heatmap, std::ostream& out,
                       const std::string& config_hash, std::uint64_t seed);
void write_beeswarm_csv(const std::vector<BeeswarmRow>& rows, std::ostream& out,
                        const std::string& config_hash, std::uint64_t seed);
void write_heatmap_svg(const nn::Tensor& heatmap, std::ostream& out);

}  // namespace phase
