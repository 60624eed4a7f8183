#include "phase/nn/ops.hpp"

#include <algorithm>
#include <cmath>

#include "phase/common.hpp"
#include "phase/rng.hpp"

namespace phase::nn {

namespace {
constexpr double kBceClamp = 1e-7;
}

void check_finite(const Tensor& t, const char* what) {
  for (double v : t.data)
    if (!std::isfinite(v)) fail_numeric(std::string("non-finite value in ") + what);
}

Tensor conv1d_forward(const Tensor& x, const Tensor& kernel, const Tensor& bias) {
  const std::size_t T = x.dim(0), cin = x.dim(1);
  const std::size_t k = kernel.dim(0), cout = kernel.dim(2);
  if (kernel.dim(1) != cin || bias.dim(0) != cout) fail_numeric("conv1d: shape mismatch");
  if (k % 2 == 0) fail_numeric("conv1d: kernel width must be odd");
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);

  Tensor y({T, cout});
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t o = 0; o < cout; ++o) y(t, o) = bias[o];
    for (std::size_t dk = 0; dk < k; ++dk) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + dk) - pad;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(T)) continue;
      for (std::size_t ci = 0; ci < cin; ++ci) {
        const double xv = x(static_cast<std::size_t>(src), ci);
        if (xv == 0.0) continue;
        for (std::size_t o = 0; o < cout; ++o) y(t, o) += xv * kernel(dk, ci, o);
      }
    }
  }
  return y;
}

void conv1d_backward(const Tensor& x, const Tensor& kernel, const Tensor& dy, Tensor& dx,
                     Tensor& dkernel, Tensor& dbias) {
  const std::size_t T = x.dim(0), cin = x.dim(1);
  const std::size_t k = kernel.dim(0), cout = kernel.dim(2);
  const std::ptrdiff_t pad = static_cast<std::ptrdiff_t>(k / 2);
  dx = Tensor({T, cin});
  dkernel = Tensor({k, cin, cout});
  dbias = Tensor({cout});

  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t o = 0; o < cout; ++o) dbias[o] += dy(t, o);
    for (std::size_t dk = 0; dk < k; ++dk) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t + dk) - pad;
      if (src < 0 || src >= static_cast<std::ptrdiff_t>(T)) continue;
      for (std::size_t ci = 0; ci < cin; ++ci) {
        const double xv = x(static_cast<std::size_t>(src), ci);
        double acc = 0.0;
        for (std::size_t o = 0; o < cout; ++o) {
          const double g = dy(t, o);
          dkernel(dk, ci, o) += xv * g;
          acc += g * kernel(dk, ci, o);
        }
        dx(static_cast<std::size_t>(src), ci) += acc;
      }
    }
  }
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b) {
  const std::size_t d = x.dim(0), m = w.dim(1);
  if (w.dim(0) != d || b.dim(0) != m) fail_numeric("dense: shape mismatch");
  Tensor y({m});
  for (std::size_t j = 0; j < m; ++j) y[j] = b[j];
  for (std::size_t i = 0; i < d; ++i) {
    const double xv = x[i];
    for (std::size_t j = 0; j < m; ++j) y[j] += xv * w(i, j);
  }
  return y;
}

void dense_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dx, Tensor& dw,
                    Tensor& db) {
  const std::size_t d = x.dim(0), m = w.dim(1);
  dx = Tensor({d});
  dw = Tensor({d, m});
  db = dy;
  for (std::size_t i = 0; i < d; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      dw(i, j) = x[i] * dy[j];
      acc += w(i, j) * dy[j];
    }
    dx[i] = acc;
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double sigmoid_backward(double y, double dy) { return dy * y * (1.0 - y); }

double bce_loss(const double* p, const double* y, std::size_t n) {
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
    loss -= y[i] * std::log(pi) + (1.0 - y[i]) * std::log(1.0 - pi);
  }
  return loss / static_cast<double>(n);
}

void bce_backward(const double* p, const double* y, std::size_t n, double* dp) {
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] < kBceClamp || p[i] > 1.0 - kBceClamp) {
      dp[i] = 0.0;  // clamped region is flat
      continue;
    }
    dp[i] = (p[i] - y[i]) / (p[i] * (1.0 - p[i])) / static_cast<double>(n);
  }
}

Tensor dropout_forward(const Tensor& x, double rate, Mode mode, std::uint64_t seed,
                       Tensor* mask_out) {
  if (rate < 0.0 || rate >= 1.0) fail_numeric("dropout: rate must be in [0, 1)");
  if (mode == Mode::Infer || rate == 0.0) {
    if (mask_out) {
      *mask_out = Tensor(x.shape);
      mask_out->fill(1.0);
    }
    return x;
  }
  Rng rng(seed);
  const double keep_scale = 1.0 / (1.0 - rate);
  Tensor mask(x.shape);
  Tensor y(x.shape);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double m = rng.uniform() >= rate ? keep_scale : 0.0;
    mask[i] = m;
    y[i] = x[i] * m;
  }
  if (mask_out) *mask_out = std::move(mask);
  return y;
}

Tensor dropout_backward(const Tensor& dy, const Tensor& mask) {
  Tensor dx(dy.shape);
  for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = dy[i] * mask[i];
  return dx;
}

void softmax_rows(Tensor& x) {
  const std::size_t rows = x.dim(0), cols = x.dim(1);
  for (std::size_t r = 0; r < rows; ++r) {
    double* row = x.data.data() + r * cols;
    double mx = row[0];
    for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    for (std::size_t c = 0; c < cols; ++c) row[c] /= sum;
  }
}

void softmax_row_backward(const double* s, const double* ds, double* dx, std::size_t n) {
  double dot = 0.0;
  for (std::size_t i = 0; i < n; ++i) dot += s[i] * ds[i];
  for (std::size_t i = 0; i < n; ++i) dx[i] = s[i] * (ds[i] - dot);
}

Tensor mean_pool_time(const Tensor& x) {
  const std::size_t T = x.dim(0), d = x.dim(1);
  Tensor y({d});
  for (std::size_t t = 0; t < T; ++t)
    for (std::size_t j = 0; j < d; ++j) y[j] += x(t, j);
  for (std::size_t j = 0; j < d; ++j) y[j] /= static_cast<double>(T);
  return y;
}

Tensor mean_pool_time_backward(const Tensor& dy, std::size_t t_bins) {
  const std::size_t d = dy.dim(0);
  Tensor dx({t_bins, d});
  const double inv = 1.0 / static_cast<double>(t_bins);
  for (std::size_t t = 0; t < t_bins; ++t)
    for (std::size_t j = 0; j < d; ++j) dx(t, j) = dy[j] * inv;
  return dx;
}

}  // namespace phase::nn
