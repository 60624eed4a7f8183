#pragma once

#include <functional>
#include <vector>

#include "phase/nn/tensor.hpp"

namespace phase::nn {

// Central finite differences against analytic gradients. `loss` evaluates
// the scalar objective at the current parameter values; `analytic` returns
// gradients aligned with `params`. Returns the max over all coordinates of
// |a - n| / max(|a|, |n|, 1e-8).
double grad_check(const std::function<double()>& loss, const std::vector<Tensor*>& params,
                  const std::function<std::vector<Tensor>()>& analytic, double step = 1e-5);

}  // namespace phase::nn
