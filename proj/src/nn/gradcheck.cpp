#include "phase/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "phase/common.hpp"

namespace phase::nn {

double grad_check(const std::function<double()>& loss, const std::vector<Tensor*>& params,
                  const std::function<std::vector<Tensor>()>& analytic, double step) {
  std::vector<Tensor> grads = analytic();
  if (grads.size() != params.size()) fail_numeric("grad_check: gradient count mismatch");

  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = *params[i];
    if (!p.same_shape(grads[i])) fail_numeric("grad_check: gradient shape mismatch");
    for (std::size_t j = 0; j < p.size(); ++j) {
      const double saved = p[j];
      p[j] = saved + step;
      const double up = loss();
      p[j] = saved - step;
      const double down = loss();
      p[j] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = grads[i][j];
      const double err = std::fabs(a - numeric) / std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace phase::nn
