#include "phase/nn/lstm.hpp"

#include <cmath>

#include "phase/common.hpp"
#include "phase/nn/ops.hpp"

namespace phase::nn {

Tensor lstm_forward(const Tensor& x, const LstmParams& p, LstmCache* cache) {
  const std::size_t T = x.dim(0), d = x.dim(1), h = p.hidden();
  if (p.w.dim(1) != d || p.w.dim(0) != 4 * h || p.u.dim(0) != 4 * h || p.u.dim(1) != h)
    fail_numeric("lstm: shape mismatch");

  Tensor gates({T, 4 * h});
  Tensor cs({T, h});
  Tensor tanh_cs({T, h});
  Tensor hs({T, h});
  std::vector<double> z(4 * h);

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t r = 0; r < 4 * h; ++r) z[r] = p.b[r];
    for (std::size_t i = 0; i < d; ++i) {
      const double xv = x(t, i);
      if (xv == 0.0) continue;
      for (std::size_t r = 0; r < 4 * h; ++r) z[r] += p.w(r, i) * xv;
    }
    if (t > 0) {
      for (std::size_t j = 0; j < h; ++j) {
        const double hv = hs(t - 1, j);
        if (hv == 0.0) continue;
        for (std::size_t r = 0; r < 4 * h; ++r) z[r] += p.u(r, j) * hv;
      }
    }
    for (std::size_t j = 0; j < h; ++j) {
      const double ig = sigmoid(z[j]);
      const double fg = sigmoid(z[h + j]);
      const double gg = std::tanh(z[2 * h + j]);
      const double og = sigmoid(z[3 * h + j]);
      const double c_prev = t > 0 ? cs(t - 1, j) : 0.0;
      const double c = fg * c_prev + ig * gg;
      const double tc = std::tanh(c);
      gates(t, j) = ig;
      gates(t, h + j) = fg;
      gates(t, 2 * h + j) = gg;
      gates(t, 3 * h + j) = og;
      cs(t, j) = c;
      tanh_cs(t, j) = tc;
      hs(t, j) = og * tc;
    }
  }
  if (cache) {
    cache->x = x;
    cache->gates = std::move(gates);
    cache->c = std::move(cs);
    cache->tanh_c = std::move(tanh_cs);
    cache->h = hs;
  }
  return hs;
}

void lstm_backward(const LstmParams& p, const LstmCache& cache, const Tensor& dh_out,
                   Tensor& dx, LstmParams& grads) {
  const std::size_t T = cache.x.dim(0), d = cache.x.dim(1), h = p.hidden();
  dx = Tensor({T, d});
  grads.w = Tensor({4 * h, d});
  grads.u = Tensor({4 * h, h});
  grads.b = Tensor({4 * h});

  std::vector<double> dh(h, 0.0), dc(h, 0.0), dz(4 * h);
  for (std::size_t tt = T; tt-- > 0;) {
    for (std::size_t j = 0; j < h; ++j) dh[j] += dh_out(tt, j);
    for (std::size_t j = 0; j < h; ++j) {
      const double ig = cache.gates(tt, j);
      const double fg = cache.gates(tt, h + j);
      const double gg = cache.gates(tt, 2 * h + j);
      const double og = cache.gates(tt, 3 * h + j);
      const double tc = cache.tanh_c(tt, j);
      const double c_prev = tt > 0 ? cache.c(tt - 1, j) : 0.0;

      const double d_og = dh[j] * tc;
      double dcj = dc[j] + dh[j] * og * (1.0 - tc * tc);
      const double d_ig = dcj * gg;
      const double d_gg = dcj * ig;
      const double d_fg = dcj * c_prev;

      dz[j] = d_ig * ig * (1.0 - ig);
      dz[h + j] = d_fg * fg * (1.0 - fg);
      dz[2 * h + j] = d_gg * (1.0 - gg * gg);
      dz[3 * h + j] = d_og * og * (1.0 - og);
      dc[j] = dcj * fg;  // flows to c_{t-1}
    }
    for (std::size_t r = 0; r < 4 * h; ++r) {
      const double g = dz[r];
      if (g == 0.0) continue;
      grads.b[r] += g;
      for (std::size_t i = 0; i < d; ++i) grads.w(r, i) += g * cache.x(tt, i);
      if (tt > 0)
        for (std::size_t j = 0; j < h; ++j) grads.u(r, j) += g * cache.h(tt - 1, j);
    }
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      for (std::size_t r = 0; r < 4 * h; ++r) acc += p.w(r, i) * dz[r];
      dx(tt, i) = acc;
    }
    if (tt > 0) {
      for (std::size_t j = 0; j < h; ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < 4 * h; ++r) acc += p.u(r, j) * dz[r];
        dh[j] = acc;
      }
    }
  }
}

Tensor reverse_time(const Tensor& x) {
  const std::size_t T = x.dim(0), d = x.dim(1);
  Tensor y({T, d});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < d; ++j) y(t, j) = x(T - 1 - t, j);
  return y;
}

Tensor bilstm_forward(const Tensor& x, const BilstmParams& p, BilstmCache* cache) {
  const std::size_t T = x.dim(0), h = p.fwd.hidden();
  if (p.bwd.hidden() != h) fail_numeric("bilstm: direction hidden sizes differ");
  Tensor h_fwd = lstm_forward(x, p.fwd, cache ? &cache->fwd : nullptr);
  Tensor x_rev = reverse_time(x);
  Tensor h_bwd_rev = lstm_forward(x_rev, p.bwd, cache ? &cache->bwd : nullptr);
  Tensor h_bwd = reverse_time(h_bwd_rev);

  Tensor y({T, 2 * h});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < h; ++j) {
      y(t, j) = h_fwd(t, j);
      y(t, h + j) = h_bwd(t, j);
    }
  }
  return y;
}

void bilstm_backward(const BilstmParams& p, const BilstmCache& cache, const Tensor& dy,
                     Tensor& dx, BilstmParams& grads) {
  const std::size_t T = dy.dim(0), h = p.fwd.hidden();
  Tensor dh_fwd({T, h});
  Tensor dh_bwd({T, h});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < h; ++j) {
      dh_fwd(t, j) = dy(t, j);
      dh_bwd(t, j) = dy(t, h + j);
    }
  }
  Tensor dx_fwd;
  lstm_backward(p.fwd, cache.fwd, dh_fwd, dx_fwd, grads.fwd);
  Tensor dx_bwd_rev;
  lstm_backward(p.bwd, cache.bwd, reverse_time(dh_bwd), dx_bwd_rev, grads.bwd);
  Tensor dx_bwd = reverse_time(dx_bwd_rev);

  dx = std::move(dx_fwd);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dx_bwd[i];
}

}  // namespace phase::nn
