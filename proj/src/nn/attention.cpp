#include "phase/nn/attention.hpp"

#include <cmath>
#include <vector>

#include "phase/common.hpp"
#include "phase/nn/ops.hpp"

namespace phase::nn {

namespace {

// y = x W + b for row-major T x D inputs
Tensor project(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t T = x.dim(0), d = x.dim(1), m = w.dim(1);
  Tensor y({T, m});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < m; ++j) y(t, j) = b[j];
    for (std::size_t i = 0; i < d; ++i) {
      const double xv = x(t, i);
      if (xv == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) y(t, j) += xv * w(i, j);
    }
  }
  return y;
}

void project_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dx,
                      Tensor& dw, Tensor& db) {
  const std::size_t T = x.dim(0), d = x.dim(1), m = w.dim(1);
  dx = Tensor({T, d});
  dw = Tensor({d, m});
  db = Tensor({m});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j < m; ++j) db[j] += dy(t, j);
    for (std::size_t i = 0; i < d; ++i) {
      double acc = 0.0;
      const double xv = x(t, i);
      for (std::size_t j = 0; j < m; ++j) {
        const double g = dy(t, j);
        dw(i, j) += xv * g;
        acc += w(i, j) * g;
      }
      dx(t, i) = acc;
    }
  }
}

}  // namespace

Tensor mha_forward(const Tensor& x, const MhaParams& p, std::size_t heads, MhaCache* cache) {
  const std::size_t T = x.dim(0), d = x.dim(1);
  if (heads == 0 || d % heads != 0) fail_numeric("mha: model dim not divisible by head count");
  const std::size_t hd = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  Tensor q = project(x, p.wq, p.bq);
  Tensor k = project(x, p.wk, p.bk);
  Tensor v = project(x, p.wv, p.bv);

  Tensor attn({heads, T, T});
  Tensor concat({T, d});
  for (std::size_t a = 0; a < heads; ++a) {
    const std::size_t off = a * hd;
    Tensor scores({T, T});
    for (std::size_t i = 0; i < T; ++i)
      for (std::size_t j = 0; j < T; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < hd; ++c) s += q(i, off + c) * k(j, off + c);
        scores(i, j) = s * scale;
      }
    softmax_rows(scores);
    for (std::size_t i = 0; i < T; ++i) {
      for (std::size_t j = 0; j < T; ++j) attn(a, i, j) = scores(i, j);
      for (std::size_t c = 0; c < hd; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < T; ++j) s += scores(i, j) * v(j, off + c);
        concat(i, off + c) = s;
      }
    }
  }
  Tensor y = project(concat, p.wo, p.bo);
  if (cache) {
    cache->x = x;
    cache->q = std::move(q);
    cache->k = std::move(k);
    cache->v = std::move(v);
    cache->attn = std::move(attn);
    cache->concat = std::move(concat);
  }
  return y;
}

void mha_backward(const MhaParams& p, std::size_t heads, const MhaCache& cache,
                  const Tensor& dy, Tensor& dx, MhaParams& grads) {
  const std::size_t T = cache.x.dim(0), d = cache.x.dim(1);
  const std::size_t hd = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

  Tensor dconcat;
  project_backward(cache.concat, p.wo, dy, dconcat, grads.wo, grads.bo);

  Tensor dq({T, d}), dk({T, d}), dv({T, d});
  std::vector<double> ds_row(T), da_row(T);
  for (std::size_t a = 0; a < heads; ++a) {
    const std::size_t off = a * hd;
    for (std::size_t i = 0; i < T; ++i) {
      // upstream into the attention weights of row i
      for (std::size_t j = 0; j < T; ++j) {
        double acc = 0.0;
        for (std::size_t c = 0; c < hd; ++c) acc += dconcat(i, off + c) * cache.v(j, off + c);
        da_row[j] = acc;
      }
      // through softmax
      const double* s = &cache.attn.data[(a * T + i) * T];
      softmax_row_backward(s, da_row.data(), ds_row.data(), T);
      // into q, k and v
      for (std::size_t j = 0; j < T; ++j) {
        const double g = ds_row[j] * scale;
        const double aij = s[j];
        for (std::size_t c = 0; c < hd; ++c) {
          dq(i, off + c) += g * cache.k(j, off + c);
          dk(j, off + c) += g * cache.q(i, off + c);
          dv(j, off + c) += aij * dconcat(i, off + c);
        }
      }
    }
  }

  Tensor dx_q, dx_k, dx_v;
  project_backward(cache.x, p.wq, dq, dx_q, grads.wq, grads.bq);
  project_backward(cache.x, p.wk, dk, dx_k, grads.wk, grads.bk);
  project_backward(cache.x, p.wv, dv, dx_v, grads.wv, grads.bv);
  dx = std::move(dx_q);
  for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dx_k[i] + dx_v[i];
}

}  // namespace phase::nn
