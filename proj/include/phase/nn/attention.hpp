#pragma once

#include "phase/nn/tensor.hpp"

namespace phase::nn {

// Multi-head scaled dot-product self-attention with an output projection.
// D must be divisible by the head count; per-head dim is D / heads.
struct MhaParams {
  Tensor wq, wk, wv, wo;  // D x D each
  Tensor bq, bk, bv, bo;  // D each
};

struct MhaCache {
  Tensor x;       // T x D
  Tensor q, k, v; // T x D
  Tensor attn;    // heads x T x T, softmax rows
  Tensor concat;  // T x D, heads concatenated before the output projection
};

Tensor mha_forward(const Tensor& x, const MhaParams& p, std::size_t heads, MhaCache* cache);
void mha_backward(const MhaParams& p, std::size_t heads, const MhaCache& cache,
                  const Tensor& dy, Tensor& dx, MhaParams& grads);

}  // namespace phase::nn
