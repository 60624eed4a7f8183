#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "phase/nn/attention.hpp"
#include "phase/nn/lstm.hpp"
#include "phase/nn/ops.hpp"
#include "phase/nn/tensor.hpp"

namespace phase {

struct PhaseModelConfig {
  std::size_t t_bins = 1440;
  std::size_t features = 17;
  std::size_t conv_filters = 32;
  std::size_t conv_kernel = 3;
  std::size_t lstm_hidden = 32;
  std::size_t attn_heads = 4;
  double dropout_rate = 0.2;
  std::uint64_t seed = 1;

  void validate() const;
  bool operator==(const PhaseModelConfig&) const = default;
};

struct ModelCache {
  nn::Tensor x;
  nn::Tensor conv_out;
  nn::BilstmCache lstm1;
  nn::Tensor lstm1_out;
  nn::MhaCache attn1;
  nn::Tensor drop1_mask, drop1_out;
  nn::BilstmCache lstm2;
  nn::Tensor lstm2_out;
  nn::MhaCache attn2;
  nn::Tensor drop2_mask, drop2_out;
  nn::Tensor pooled;
  double logit = 0.0;
  double p = 0.0;
};

// Conv1D -> BiLSTM -> MHA -> dropout -> BiLSTM -> MHA -> dropout ->
// global average pool over time -> dense(1) -> sigmoid.
struct PhaseModel {
  PhaseModelConfig config;
  nn::Tensor conv_kernel;  // k x F x conv_filters
  nn::Tensor conv_bias;    // conv_filters
  nn::BilstmParams lstm1;  // input conv_filters, hidden H
  nn::MhaParams attn1;     // dim 2H
  nn::BilstmParams lstm2;  // input 2H, hidden H
  nn::MhaParams attn2;     // dim 2H
  nn::Tensor head_w;       // 2H x 1
  nn::Tensor head_b;       // 1

  static PhaseModel init(const PhaseModelConfig& config);

  double forward(const nn::Tensor& x, nn::Mode mode, std::uint64_t seed,
                 ModelCache* cache = nullptr) const;
  // d(loss)/d(p) in, gradients aligned with params() out.
  std::vector<nn::Tensor> backward(const ModelCache& cache, double dp) const;

  std::vector<nn::Tensor*> params();
  std::vector<std::pair<std::string, const nn::Tensor*>> named_params() const;

  void save(std::ostream& out, const std::string& config_hash = "",
            std::uint64_t seed = 0) const;
  static PhaseModel load(std::istream& in);

  bool operator==(const PhaseModel&) const;
};

}  // namespace phase
