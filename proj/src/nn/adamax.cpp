#include "phase/nn/adamax.hpp"

#include <cmath>

#include "phase/common.hpp"

namespace phase::nn {

void adamax_step(std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
                 AdamaxState& state) {
  if (params.size() != grads.size()) fail_numeric("adamax: parameter/gradient count mismatch");
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(p->shape);
      state.u.emplace_back(p->shape);
    }
  }
  if (state.m.size() != params.size()) fail_numeric("adamax: state size mismatch");

  state.t += 1;
  const double step = state.lr / (1.0 - std::pow(state.beta1, static_cast<double>(state.t)));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    const Tensor& g = grads[i];
    if (!p.same_shape(g)) fail_numeric("adamax: gradient shape mismatch");
    Tensor& m = state.m[i];
    Tensor& u = state.u[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double gj = g[j];
      if (!std::isfinite(gj)) fail_numeric("adamax: non-finite gradient");
      m[j] = state.beta1 * m[j] + (1.0 - state.beta1) * gj;
      u[j] = std::max(state.beta2 * u[j], std::fabs(gj));
      p[j] -= step * m[j] / (u[j] + state.epsilon);
    }
  }
}

}  // namespace phase::nn
