#include <doctest.h>

#include <cmath>

#include "phase/nn/gradcheck.hpp"
#include "phase/nn/ops.hpp"
#include "phase/rng.hpp"

using namespace phase;
using nn::Tensor;

namespace {

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (auto& v : t.data) v = rng.uniform(-scale, scale);
  return t;
}

}  // namespace

TEST_CASE("conv1d identity kernel copies the channel") {
  Tensor x({5, 1});
  for (std::size_t t = 0; t < 5; ++t) x(t, 0) = static_cast<double>(t) - 2.0;
  Tensor k({1, 1, 1});
  k[0] = 1.0;
  Tensor b({1});
  auto y = nn::conv1d_forward(x, k, b);
  CHECK(y == x);
}

TEST_CASE("conv1d zero kernel yields the bias") {
  Rng rng(3);
  Tensor x = random_tensor({6, 3}, rng);
  Tensor k({3, 3, 2});
  Tensor b({2});
  b[0] = 0.25;
  b[1] = -1.5;
  auto y = nn::conv1d_forward(x, k, b);
  for (std::size_t t = 0; t < 6; ++t) {
    CHECK(y(t, 0) == 0.25);
    CHECK(y(t, 1) == -1.5);
  }
}

TEST_CASE("conv1d matches a sliding-window dot product oracle") {
  Rng rng(11);
  Tensor x = random_tensor({8, 3}, rng);
  Tensor k = random_tensor({3, 3, 2}, rng);
  Tensor b = random_tensor({2}, rng);
  auto y = nn::conv1d_forward(x, k, b);
  for (std::size_t t = 0; t < 8; ++t) {
    for (std::size_t o = 0; o < 2; ++o) {
      double expect = b[o];
      for (int dk = 0; dk < 3; ++dk) {
        const int src = static_cast<int>(t) + dk - 1;
        if (src < 0 || src >= 8) continue;
        for (std::size_t ci = 0; ci < 3; ++ci)
          expect += x(static_cast<std::size_t>(src), ci) * k(static_cast<std::size_t>(dk), ci, o);
      }
      CHECK(y(t, o) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("conv1d gradients pass finite differences over 5 seeds") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    Tensor x = random_tensor({6, 2}, rng);
    Tensor k = random_tensor({3, 2, 3}, rng);
    Tensor b = random_tensor({3}, rng);
    Tensor target = random_tensor({6, 3}, rng);

    // loss = sum((y - target)^2) / 2 so dL/dy = y - target
    auto loss = [&]() {
      auto y = nn::conv1d_forward(x, k, b);
      double acc = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) acc += 5e-4 * (y[i] - target[i]) * (y[i] - target[i]);
      return acc;
    };
    auto analytic = [&]() {
      auto y = nn::conv1d_forward(x, k, b);
      Tensor dy(y.shape);
      for (std::size_t i = 0; i < y.size(); ++i) dy[i] = 1e-3 * (y[i] - target[i]);
      Tensor dx, dk, db;
      nn::conv1d_backward(x, k, dy, dx, dk, db);
      return std::vector<Tensor>{dx, dk, db};
    };
    const double err = nn::grad_check(loss, {&x, &k, &b}, analytic);
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("dense matches a matmul oracle and its gradient checks out") {
  Rng rng(7);
  Tensor x = random_tensor({4}, rng);
  Tensor w = random_tensor({4, 3}, rng);
  Tensor b = random_tensor({3}, rng);
  auto y = nn::dense_forward(x, w, b);
  for (std::size_t j = 0; j < 3; ++j) {
    double expect = b[j];
    for (std::size_t i = 0; i < 4; ++i) expect += x[i] * w(i, j);
    CHECK(y[j] == doctest::Approx(expect).epsilon(1e-12));
  }

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng r2(seed * 31);
    Tensor x2 = random_tensor({4}, r2);
    Tensor w2 = random_tensor({4, 3}, r2);
    Tensor b2 = random_tensor({3}, r2);
    Tensor target = random_tensor({3}, r2);
    auto loss = [&]() {
      auto out = nn::dense_forward(x2, w2, b2);
      double acc = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i)
        acc += 5e-4 * (out[i] - target[i]) * (out[i] - target[i]);
      return acc;
    };
    auto analytic = [&]() {
      auto out = nn::dense_forward(x2, w2, b2);
      Tensor dy(out.shape);
      for (std::size_t i = 0; i < out.size(); ++i) dy[i] = 1e-3 * (out[i] - target[i]);
      Tensor dx, dw, db;
      nn::dense_backward(x2, w2, dy, dx, dw, db);
      return std::vector<Tensor>{dx, dw, db};
    };
    CHECK(nn::grad_check(loss, {&x2, &w2, &b2}, analytic) <= 1e-4);
  }
}

TEST_CASE("sigmoid and bce basics") {
  CHECK(nn::sigmoid(0.0) == 0.5);
  CHECK(nn::sigmoid(10.0) > 0.9999);
  CHECK(nn::sigmoid(-10.0) < 0.0001);

  // perfect predictions cost at most the clamp epsilon
  const double p[] = {1.0, 0.0};
  const double y[] = {1.0, 0.0};
  CHECK(nn::bce_loss(p, y, 2) <= 1.1e-7);
  CHECK(nn::bce_loss(p, y, 2) >= 0.0);

  // hand value: p=0.8, y=1 -> -ln(0.8)
  const double p1 = 0.8, y1 = 1.0;
  CHECK(nn::bce_loss(&p1, &y1, 1) == doctest::Approx(-std::log(0.8)).epsilon(1e-12));
}

TEST_CASE("bce gradient matches finite differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed * 17);
    Tensor p({4});
    Tensor y({4});
    for (std::size_t i = 0; i < 4; ++i) {
      p[i] = rng.uniform(0.05, 0.95);
      y[i] = rng.uniform() < 0.5 ? 0.0 : 1.0;
    }
    auto loss = [&]() { return 1e-3 * nn::bce_loss(p.data.data(), y.data.data(), 4); };
    auto analytic = [&]() {
      Tensor dp({4});
      nn::bce_backward(p.data.data(), y.data.data(), 4, dp.data.data());
      for (auto& v : dp.data) v *= 1e-3;
      return std::vector<Tensor>{dp};
    };
    CHECK(nn::grad_check(loss, {&p}, analytic) <= 1e-4);
  }
}

TEST_CASE("dropout: inference is the identity, rate 0 is the identity") {
  Rng rng(5);
  Tensor x = random_tensor({40, 10}, rng);
  CHECK(nn::dropout_forward(x, 0.2, nn::Mode::Infer, 1, nullptr) == x);
  CHECK(nn::dropout_forward(x, 0.0, nn::Mode::Train, 1, nullptr) == x);
}

TEST_CASE("dropout survivor fraction lands within 3 sigma of the keep rate") {
  Tensor x({100, 100});
  x.fill(1.0);
  const double rate = 0.2;
  Tensor mask;
  auto y = nn::dropout_forward(x, rate, nn::Mode::Train, 42, &mask);
  std::size_t survivors = 0;
  for (double v : mask.data)
    if (v != 0.0) ++survivors;
  const double n = static_cast<double>(x.size());
  const double expect = n * (1.0 - rate);
  const double sigma = std::sqrt(n * rate * (1.0 - rate));
  CHECK(std::fabs(static_cast<double>(survivors) - expect) <= 3.0 * sigma);
  // survivors are scaled by 1/(1-rate)
  for (std::size_t i = 0; i < y.size(); ++i)
    CHECK((y[i] == 0.0 || y[i] == doctest::Approx(1.0 / (1.0 - rate))));
  // fixed seed reproduces the mask
  Tensor mask2;
  auto y2 = nn::dropout_forward(x, rate, nn::Mode::Train, 42, &mask2);
  CHECK(y == y2);
}

TEST_CASE("softmax rows sum to one and shifting logits changes nothing") {
  Rng rng(9);
  Tensor logits = random_tensor({6, 8}, rng, 4.0);
  Tensor shifted = logits;
  for (std::size_t r = 0; r < 6; ++r)
    for (std::size_t c = 0; c < 8; ++c) shifted(r, c) += 123.456;

  nn::softmax_rows(logits);
  nn::softmax_rows(shifted);
  for (std::size_t r = 0; r < 6; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 8; ++c) sum += logits(r, c);
    CHECK(std::fabs(sum - 1.0) <= 1e-12);
    for (std::size_t c = 0; c < 8; ++c)
      CHECK(logits(r, c) == doctest::Approx(shifted(r, c)).epsilon(1e-12));
  }
}

TEST_CASE("mean pool backward splits gradient evenly") {
  Rng rng(13);
  Tensor x = random_tensor({5, 3}, rng);
  auto pooled = nn::mean_pool_time(x);
  for (std::size_t j = 0; j < 3; ++j) {
    double sum = 0.0;
    for (std::size_t t = 0; t < 5; ++t) sum += x(t, j);
    CHECK(pooled[j] == doctest::Approx(sum / 5.0).epsilon(1e-12));
  }
  Tensor dy({3});
  dy[0] = 1.0;
  dy[1] = -2.0;
  dy[2] = 0.5;
  auto dx = nn::mean_pool_time_backward(dy, 5);
  for (std::size_t t = 0; t < 5; ++t)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(dx(t, j) == doctest::Approx(dy[j] / 5.0).epsilon(1e-12));
}
