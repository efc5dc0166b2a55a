#include <stdexcept>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "uavnet/nn.hpp"
#include "uavnet/rng.hpp"

using namespace uavnet;

namespace {

// central finite difference of f with respect to *x
double central_diff(double* x, const std::function<double()>& f,
                    double h = 1e-6) {
  const double orig = *x;
  *x = orig + h;
  const double fp = f();
  *x = orig - h;
  const double fm = f();
  *x = orig;
  return (fp - fm) / (2.0 * h);
}

double rel_err(double a, double b) {
  const double denom = std::abs(a) + std::abs(b);
  if (denom < 1e-10) return 0.0;
  return std::abs(a - b) / denom;
}

void fill_uniform(std::vector<double>& v, rng::SplitMix& g, double lo,
                  double hi) {
  for (auto& x : v) x = lo + (hi - lo) * g.next_double();
}

// checks every parameter gradient and (optionally) the input gradient of a
// layer against central differences under the projection loss L = r . y
template <typename Layer>
void check_layer_gradients(Layer& layer, nn::Tensor<double>& x,
                           std::uint64_t seed, bool training_flag,
                           bool check_input = true) {
  rng::SplitMix g(seed);
  std::vector<double> r;

  auto forward = [&]() -> nn::Tensor<double> {
    if constexpr (requires { layer.forward(x, true); })
      return layer.forward(x, training_flag);
    else
      return layer.forward(x);
  };

  auto loss = [&]() {
    const auto y = forward();
    double acc = 0.0;
    for (size_t i = 0; i < y.size(); ++i) acc += r[i] * y.v[i];
    return acc;
  };

  // analytic pass
  auto y0 = forward();
  r.resize(y0.size());
  fill_uniform(r, g, -1.0, 1.0);
  for (auto& p : layer.params()) std::fill(p.grad, p.grad + p.size, 0.0);
  nn::Tensor<double> dy = y0;
  dy.v.assign(r.begin(), r.end());
  // re-run forward so caches match the state used by loss()
  (void)forward();
  auto dx = layer.backward(dy);

  for (auto& p : layer.params()) {
    for (size_t i = 0; i < p.size; ++i) {
      const double fd = central_diff(&p.value[i], loss);
      INFO("param grad index ", i);
      CHECK(rel_err(p.grad[i], fd) < 1e-4);
    }
  }
  if (check_input) {
    for (size_t i = 0; i < x.size(); ++i) {
      const double fd = central_diff(&x.v[i], loss);
      INFO("input grad index ", i);
      CHECK(rel_err(dx.v[i], fd) < 1e-4);
    }
  }
}

}  // namespace

TEST_CASE("conv3x3 gradients match central differences") {
  rng::SplitMix g(11);
  nn::Conv3x3<double> conv(2, 3);
  conv.init_he(g);
  for (auto& p : conv.params())
    for (size_t i = 0; i < p.size; ++i)
      p.value[i] += 0.05 * (g.next_double() - 0.5);
  auto x = nn::Tensor<double>::make(2, 2, 4, 4);
  fill_uniform(x.v, g, -1.0, 1.0);
  check_layer_gradients(conv, x, 101, false);
}

TEST_CASE("batch-norm gradients match central differences") {
  rng::SplitMix g(12);
  nn::BatchNorm2d<double> bn(3);
  for (auto& p : bn.params())
    for (size_t i = 0; i < p.size; ++i)
      p.value[i] += 0.3 * (g.next_double() - 0.5);
  auto x = nn::Tensor<double>::make(2, 3, 3, 3);
  fill_uniform(x.v, g, -2.0, 2.0);
  check_layer_gradients(bn, x, 102, true);
}

TEST_CASE("dense gradients match central differences") {
  rng::SplitMix g(13);
  nn::Dense<double> fc(10, 4);
  fc.init_he(g);
  for (auto& p : fc.params())
    for (size_t i = 0; i < p.size; ++i)
      p.value[i] += 0.05 * (g.next_double() - 0.5);
  auto x = nn::Tensor<double>::make(3, 10, 1, 1);
  fill_uniform(x.v, g, -1.0, 1.0);
  check_layer_gradients(fc, x, 103, false);
}

TEST_CASE("relu backward matches central differences") {
  rng::SplitMix g(14);
  const int n = 64;
  std::vector<double> x(n), r(n);
  fill_uniform(x, g, -1.0, 1.0);
  fill_uniform(r, g, -1.0, 1.0);
  std::vector<double> y(n), dx(n);
  auto loss = [&]() {
    kernels::relu(x.data(), y.data(), n);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += r[i] * y[i];
    return acc;
  };
  kernels::relu(x.data(), y.data(), n);
  kernels::relu_backward(x.data(), r.data(), dx.data(), n);
  for (int i = 0; i < n; ++i) {
    if (std::abs(x[i]) < 1e-5) continue;  // kink of the hinge
    const double fd = central_diff(&x[i], loss);
    CHECK(rel_err(dx[i], fd) < 1e-4);
  }
}

TEST_CASE("squared loss gradient matches central differences") {
  rng::SplitMix g(15);
  const int n = 12;
  std::vector<double> q(n), y(n);
  fill_uniform(q, g, -1.0, 1.0);
  fill_uniform(y, g, -1.0, 1.0);
  auto loss = [&]() {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += (q[i] - y[i]) * (q[i] - y[i]);
    return acc / n;
  };
  for (int i = 0; i < n; ++i) {
    const double analytic = 2.0 * (q[i] - y[i]) / n;
    const double fd = central_diff(&q[i], loss);
    CHECK(rel_err(analytic, fd) < 1e-4);
  }
}

TEST_CASE("full network gradient check on a tiny spec") {
  // stem of 4 channels, one layer of one residual block, 4x4 grid
  nn::QNetworkSpec spec{3, 4, 4, 1, 1, 5};
  nn::QNetwork<double> net(spec);
  net.init(77);

  const int B = 3;
  rng::SplitMix g(16);
  auto x = nn::Tensor<double>::make(B, 3, 4, 4);
  fill_uniform(x.v, g, 0.0, 2.0);
  std::vector<int> actions(B);
  std::vector<double> targets(B);
  for (int b = 0; b < B; ++b) {
    actions[b] = static_cast<int>(g.next_below(5));
    targets[b] = 2.0 * g.next_double() - 1.0;
  }

  auto loss = [&]() {
    const auto q = net.forward(x, /*training=*/true);
    double acc = 0.0;
    for (int b = 0; b < B; ++b) {
      const double d = q.v[static_cast<size_t>(b) * 5 + actions[b]] -
                       targets[b];
      acc += d * d;
    }
    return acc / B;
  };

  const auto q = net.forward(x, /*training=*/true);
  auto dq = nn::Tensor<double>::make(B, 5, 1, 1);
  for (int b = 0; b < B; ++b) {
    const size_t idx = static_cast<size_t>(b) * 5 + actions[b];
    dq.v[idx] = 2.0 * (q.v[idx] - targets[b]) / B;
  }
  net.zero_grad();
  net.backward(dq);

  int checked = 0;
  for (auto& p : net.params()) {
    for (size_t i = 0; i < p.size; ++i) {
      const double fd = central_diff(&p.value[i], loss, 1e-5);
      INFO("param ", checked, " offset ", i);
      CHECK(rel_err(p.grad[i], fd) < 1e-4);
      ++checked;
    }
  }
  CHECK(checked == static_cast<int>(net.param_count()));
}

TEST_CASE("zero-initialized head maps any state to all-zero values") {
  nn::QNetworkSpec spec = nn::QNetworkSpec::desk();
  spec.m = 6;
  nn::QNetwork<float> net(spec);  // all weights zero by construction
  auto x = nn::Tensor<float>::make(1, 3, 6, 6);
  rng::SplitMix g(17);
  for (auto& v : x.v) v = static_cast<float>(g.next_double());
  const auto q = net.forward(x, false);
  REQUIRE(q.size() == 5);
  for (int a = 0; a < 5; ++a) CHECK(q.v[a] == 0.0f);
}

TEST_CASE("inference forward is deterministic for identical states") {
  nn::QNetworkSpec spec = nn::QNetworkSpec::desk();
  spec.m = 6;
  nn::QNetwork<float> net(spec);
  net.init(5);
  auto x = nn::Tensor<float>::make(1, 3, 6, 6);
  rng::SplitMix g(18);
  for (auto& v : x.v) v = static_cast<float>(g.next_double());
  const auto q1 = net.forward(x, false);
  const auto q2 = net.forward(x, false);
  for (int a = 0; a < 5; ++a) CHECK(q1.v[a] == q2.v[a]);
}

TEST_CASE("paper preset produces 5 action values") {
  const auto spec = nn::QNetworkSpec::paper();
  CHECK(spec.stem_channels == 64);
  CHECK(spec.residual_layers == 3);
  CHECK(spec.blocks_per_layer == 6);
  nn::QNetwork<float> net(spec);
  net.init(9);
  auto x = nn::Tensor<float>::make(1, 3, 10, 10);
  const auto q = net.forward(x, false);
  CHECK(q.size() == 5);
}

TEST_CASE("network spec validation") {
  nn::QNetworkSpec bad = nn::QNetworkSpec::desk();
  bad.action_count = 4;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = nn::QNetworkSpec::desk();
  bad.stem_channels = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  nn::QNetwork<float> net(nn::QNetworkSpec::desk());
  auto wrong = nn::Tensor<float>::make(1, 3, 7, 7);
  CHECK_THROWS_AS(net.forward(wrong, false), std::invalid_argument);
}

TEST_CASE("copy_state_from transfers parameters and statistics") {
  nn::QNetworkSpec spec{3, 4, 4, 1, 1, 5};
  nn::QNetwork<float> a(spec), b(spec);
  a.init(21);
  auto x = nn::Tensor<float>::make(2, 3, 4, 4);
  rng::SplitMix g(19);
  for (auto& v : x.v) v = static_cast<float>(g.next_double());
  (void)a.forward(x, true);  // move the running statistics off the default
  b.copy_state_from(a);
  const auto qa = a.forward(x, false);
  const auto qb = b.forward(x, false);
  for (int i = 0; i < 5 * 2; ++i) CHECK(qa.v[i] == qb.v[i]);
}

TEST_CASE("adaptive optimizer drives a quadratic toward its minimum") {
  // minimizing mean (Q(s,a)-1)^2 through the optimizer should reduce loss
  nn::QNetworkSpec spec{3, 4, 4, 1, 1, 5};
  nn::QNetwork<float> net(spec);
  net.init(33);
  nn::Adam<float> opt(net, 1e-2);
  auto x = nn::Tensor<float>::make(2, 3, 4, 4);
  rng::SplitMix g(20);
  for (auto& v : x.v) v = static_cast<float>(g.next_double());

  auto loss_of = [&](bool training) {
    const auto q = net.forward(x, training);
    double acc = 0.0;
    for (size_t i = 0; i < q.size(); ++i)
      acc += (q.v[i] - 1.0) * (q.v[i] - 1.0);
    return acc / static_cast<double>(q.size());
  };
  const double before = loss_of(true);
  for (int it = 0; it < 50; ++it) {
    const auto q = net.forward(x, true);
    auto dq = nn::Tensor<float>::make(2, 5, 1, 1);
    for (size_t i = 0; i < q.size(); ++i)
      dq.v[i] = 2.0f * (q.v[i] - 1.0f) / static_cast<float>(q.size());
    net.zero_grad();
    net.backward(dq);
    opt.step(net);
  }
  const double after = loss_of(true);
  CHECK(after < 0.2 * before);
}
