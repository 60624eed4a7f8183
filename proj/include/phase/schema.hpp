#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace phase {

// The model's feature contract: 8 categorical, 8 quantitative, plus the
// per-minute connection count (norm_vol). Raw timestamps are consumed by
// binning and never appear as a feature; addresses are used only for
// grouping and labeling.
enum class FeatureKind { Categorical, Quantitative };

inline constexpr std::size_t kFeatureCount = 17;

inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "orig_port", "resp_port", "proto",         "service",
    "conn_state", "local_orig", "local_resp",  "history",
    "duration",  "orig_bytes", "resp_bytes",   "missed_bytes",
    "orig_ip_bytes", "resp_ip_bytes", "orig_pkts", "resp_pkts",
    "norm_vol",
};

inline constexpr std::array<FeatureKind, kFeatureCount> kFeatureKinds = {
    FeatureKind::Categorical, FeatureKind::Categorical, FeatureKind::Categorical,
    FeatureKind::Categorical, FeatureKind::Categorical, FeatureKind::Categorical,
    FeatureKind::Categorical, FeatureKind::Categorical,
    FeatureKind::Quantitative, FeatureKind::Quantitative, FeatureKind::Quantitative,
    FeatureKind::Quantitative, FeatureKind::Quantitative, FeatureKind::Quantitative,
    FeatureKind::Quantitative, FeatureKind::Quantitative, FeatureKind::Quantitative,
};

inline constexpr bool is_categorical(std::size_t f) {
  return kFeatureKinds[f] == FeatureKind::Categorical;
}

// Port vocabularies sort numerically, everything else lexicographically.
inline constexpr bool is_port_feature(std::size_t f) { return f == 0 || f == 1; }

int feature_index(std::string_view name);  // -1 if unknown

}  // namespace phase
