#pragma once

#include <cassert>
#include <cstddef>
#include <numeric>
#include <vector>

namespace phase::nn {

// Dense row-major tensor of 64-bit floats. Small and value-semantic; every
// operator in this library works on these directly.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(count(shape), 0.0);
  }

  static std::size_t count(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (auto d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

  std::size_t size() const { return data.size(); }
  std::size_t dim(std::size_t i) const { return shape[i]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  double& operator()(std::size_t i, std::size_t j) {
    assert(shape.size() == 2);
    return data[i * shape[1] + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    assert(shape.size() == 2);
    return data[i * shape[1] + j];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k) {
    assert(shape.size() == 3);
    return data[(i * shape[1] + j) * shape[2] + k];
  }
  double operator()(std::size_t i, std::size_t j, std::size_t k) const {
    assert(shape.size() == 3);
    return data[(i * shape[1] + j) * shape[2] + k];
  }

  void fill(double v) { std::fill(data.begin(), data.end(), v); }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  bool operator==(const Tensor&) const = default;
};

}  // namespace phase::nn
