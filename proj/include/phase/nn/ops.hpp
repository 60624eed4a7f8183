#pragma once

#include <cstdint>

#include "phase/nn/tensor.hpp"

namespace phase::nn {

enum class Mode { Train, Infer };

// --- conv1d: cross-correlation along time, "same" zero padding -------------
// x: T x Cin, kernel: k x Cin x Cout (odd k), bias: Cout -> y: T x Cout
Tensor conv1d_forward(const Tensor& x, const Tensor& kernel, const Tensor& bias);
void conv1d_backward(const Tensor& x, const Tensor& kernel, const Tensor& dy, Tensor& dx,
                     Tensor& dkernel, Tensor& dbias);

// --- dense: y = x W + b ----------------------------------------------------
// x: D, W: D x M, b: M -> y: M
Tensor dense_forward(const Tensor& x, const Tensor& w, const Tensor& b);
void dense_backward(const Tensor& x, const Tensor& w, const Tensor& dy, Tensor& dx, Tensor& dw,
                    Tensor& db);

// --- logistic head and binary cross-entropy --------------------------------
double sigmoid(double x);
double sigmoid_backward(double y, double dy);  // y = sigmoid(x)

// mean BCE over N predictions; probabilities clamped to [1e-7, 1 - 1e-7]
double bce_loss(const double* p, const double* y, std::size_t n);
void bce_backward(const double* p, const double* y, std::size_t n, double* dp);

// --- inverted dropout -------------------------------------------------------
// Train: zero with probability `rate`, scale survivors by 1/(1-rate).
// Infer: identity. The mask is produced deterministically from `seed`.
Tensor dropout_forward(const Tensor& x, double rate, Mode mode, std::uint64_t seed,
                       Tensor* mask_out);
Tensor dropout_backward(const Tensor& dy, const Tensor& mask);

// --- softmax over the last axis of a 2-D tensor -----------------------------
void softmax_rows(Tensor& x);
// dx for one row given the row's softmax output s and upstream ds
void softmax_row_backward(const double* s, const double* ds, double* dx, std::size_t n);

// --- global average pooling over time ---------------------------------------
Tensor mean_pool_time(const Tensor& x);                       // T x D -> D
Tensor mean_pool_time_backward(const Tensor& dy, std::size_t t);  // D -> T x D

void check_finite(const Tensor& t, const char* what);

}  // namespace phase::nn
