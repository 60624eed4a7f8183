#pragma once

#include <cstdint>
#include <vector>

#include "phase/nn/tensor.hpp"

namespace phase::nn {

// Adamax: Adam's infinity-norm variant. Only the learning rate comes from
// the training protocol; beta1/beta2/epsilon keep the optimizer's customary
// defaults and are overridable through config.
struct AdamaxState {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t t = 0;
  std::vector<Tensor> m;  // first moment
  std::vector<Tensor> u;  // infinity-norm accumulator

  void reset() {
    t = 0;
    m.clear();
    u.clear();
  }
};

// params[i] is updated in place with grads[i]; state buffers are created on
// first use. Raises on non-finite gradients.
void adamax_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                 AdamaxState& state);

}  // namespace phase::nn
