#pragma once

#include "phase/nn/tensor.hpp"

namespace phase::nn {

// One LSTM direction. Gate order in the stacked weights is i, f, g, o
// (input, forget, candidate, output); W maps the input, U the recurrent
// state, b is the stacked bias. Initial hidden and cell state are zero.
struct LstmParams {
  Tensor w;  // 4H x D
  Tensor u;  // 4H x H
  Tensor b;  // 4H

  std::size_t hidden() const { return b.dim(0) / 4; }
  std::size_t input() const { return w.dim(1); }
};

struct LstmCache {
  Tensor x;       // T x D
  Tensor gates;   // T x 4H, post-activation (i, f, g, o)
  Tensor c;       // T x H
  Tensor tanh_c;  // T x H
  Tensor h;       // T x H
};

Tensor lstm_forward(const Tensor& x, const LstmParams& p, LstmCache* cache);
void lstm_backward(const LstmParams& p, const LstmCache& cache, const Tensor& dh_out,
                   Tensor& dx, LstmParams& grads);

// Forward and reverse passes concatenated per timestep: T x D -> T x 2H.
struct BilstmParams {
  LstmParams fwd;
  LstmParams bwd;
};

struct BilstmCache {
  LstmCache fwd;
  LstmCache bwd;  // computed on the time-reversed input
};

Tensor bilstm_forward(const Tensor& x, const BilstmParams& p, BilstmCache* cache);
void bilstm_backward(const BilstmParams& p, const BilstmCache& cache, const Tensor& dy,
                     Tensor& dx, BilstmParams& grads);

Tensor reverse_time(const Tensor& x);

}  // namespace phase::nn
