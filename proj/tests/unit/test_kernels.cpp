#include <cmath>
#include <vector>

#include "doctest.h"
#include "uavnet/kernels.hpp"
#include "uavnet/rng.hpp"

using namespace uavnet;

namespace {

template <typename T>
std::vector<T> random_vec(rng::SplitMix& g, size_t n) {
  std::vector<T> v(n);
  for (auto& x : v) x = static_cast<T>(g.next_double() * 2.0 - 1.0);
  return v;
}

struct IsaGuard {
  kernels::Isa saved = kernels::active_isa();
  ~IsaGuard() { kernels::force_isa(saved); }
};

}  // namespace

TEST_CASE("scalar and simd kernel variants agree") {
  if (kernels::force_isa(kernels::Isa::avx2) != kernels::Isa::avx2) {
    MESSAGE("no AVX2 on this CPU; dispatch equivalence trivially holds");
    return;
  }
  IsaGuard guard;
  rng::SplitMix g(123);

  // odd lengths cover the vector tails
  for (size_t n : {1u, 3u, 7u, 8u, 15u, 64u, 100u, 144u, 1001u}) {
    const auto af = random_vec<float>(g, n);
    const auto bf = random_vec<float>(g, n);
    const auto ad = random_vec<double>(g, n);
    const auto bd = random_vec<double>(g, n);

    kernels::force_isa(kernels::Isa::avx2);
    const float dot_f_v = kernels::dot(af.data(), bf.data(), n);
    const double dot_d_v = kernels::dot(ad.data(), bd.data(), n);
    const float sum_f_v = kernels::sum(af.data(), n);
    const double sum_d_v = kernels::sum(ad.data(), n);
    std::vector<float> yf_v = bf;
    kernels::axpy(0.37f, af.data(), yf_v.data(), n);
    std::vector<double> yd_v = bd;
    kernels::axpy(0.37, ad.data(), yd_v.data(), n);
    std::vector<float> rf_v(n), rbf_v(n);
    kernels::relu(af.data(), rf_v.data(), n);
    kernels::relu_backward(af.data(), bf.data(), rbf_v.data(), n);

    kernels::force_isa(kernels::Isa::scalar);
    CHECK(kernels::dot(af.data(), bf.data(), n) ==
          doctest::Approx(dot_f_v).epsilon(1e-5));
    CHECK(kernels::dot(ad.data(), bd.data(), n) ==
          doctest::Approx(dot_d_v).epsilon(1e-13));
    CHECK(kernels::sum(af.data(), n) ==
          doctest::Approx(sum_f_v).epsilon(1e-5));
    CHECK(kernels::sum(ad.data(), n) ==
          doctest::Approx(sum_d_v).epsilon(1e-13));
    std::vector<float> yf_s = bf;
    kernels::axpy(0.37f, af.data(), yf_s.data(), n);
    for (size_t i = 0; i < n; ++i)
      CHECK(yf_s[i] == doctest::Approx(yf_v[i]).epsilon(1e-6));
    std::vector<double> yd_s = bd;
    kernels::axpy(0.37, ad.data(), yd_s.data(), n);
    for (size_t i = 0; i < n; ++i)
      CHECK(yd_s[i] == doctest::Approx(yd_v[i]).epsilon(1e-14));
    std::vector<float> rf_s(n), rbf_s(n);
    kernels::relu(af.data(), rf_s.data(), n);
    kernels::relu_backward(af.data(), bf.data(), rbf_s.data(), n);
    // relu and its mask are exact in both variants
    CHECK(rf_s == rf_v);
    CHECK(rbf_s == rbf_v);
  }
}

TEST_CASE("kernel reference values") {
  IsaGuard guard;
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{5, 4, 3, 2, 1};
  for (auto isa : {kernels::Isa::scalar, kernels::Isa::avx2}) {
    kernels::force_isa(isa);
    CHECK(kernels::dot(a.data(), b.data(), 5) == doctest::Approx(35.0));
    CHECK(kernels::sum(a.data(), 5) == doctest::Approx(15.0));
    std::vector<double> y = b;
    kernels::axpy(2.0, a.data(), y.data(), 5);
    CHECK(y[0] == doctest::Approx(7.0));
    CHECK(y[4] == doctest::Approx(11.0));
    const std::vector<double> x{-1.0, 0.0, 2.5};
    std::vector<double> r(3);
    kernels::relu(x.data(), r.data(), 3);
    CHECK(r == std::vector<double>{0.0, 0.0, 2.5});
  }
}
