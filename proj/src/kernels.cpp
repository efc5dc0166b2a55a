// Copyright 2026 The uavnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uavnet/kernels.hpp"

#include <algorithm>

namespace uavnet::kernels {

// AVX2 variants, compiled in kernels_avx2.cpp with -mavx2 -mfma.
namespace avx2 {
float dot_f32(const float* a, const float* b, std::size_t n);
double dot_f64(const double* a, const double* b, std::size_t n);
void axpy_f32(float alpha, const float* x, float* y, std::size_t n);
void axpy_f64(double alpha, const double* x, double* y, std::size_t n);
void relu_f32(const float* x, float* y, std::size_t n);
void relu_f64(const double* x, double* y, std::size_t n);
void relu_bwd_f32(const float* x, const float* dy, float* dx, std::size_t n);
void relu_bwd_f64(const double* x, const double* dy, double* dx,
                  std::size_t n);
float sum_f32(const float* x, std::size_t n);
double sum_f64(const double* x, std::size_t n);
}  // namespace avx2

namespace scalar {

template <typename T>
T dot_impl(const T* a, const T* b, std::size_t n) {
  T acc{0};
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

template <typename T>
void axpy_impl(T alpha, const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void relu_impl(const T* x, T* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = x[i] > T{0} ? x[i] : T{0};
}

template <typename T>
void relu_bwd_impl(const T* x, const T* dy, T* dx, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) dx[i] = x[i] > T{0} ? dy[i] : T{0};
}

template <typename T>
T sum_impl(const T* x, std::size_t n) {
  T acc{0};
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace scalar

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa g_isa = cpu_has_avx2() ? Isa::avx2 : Isa::scalar;

}  // namespace

Isa active_isa() { return g_isa; }

Isa force_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) return g_isa;
  g_isa = isa;
  return g_isa;
}

std::string_view isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

float dot(const float* a, const float* b, std::size_t n) {
  return g_isa == Isa::avx2 ? avx2::dot_f32(a, b, n)
                            : scalar::dot_impl(a, b, n);
}

double dot(const double* a, const double* b, std::size_t n) {
  return g_isa == Isa::avx2 ? avx2::dot_f64(a, b, n)
                            : scalar::dot_impl(a, b, n);
}

void axpy(float alpha, const float* x, float* y, std::size_t n) {
  g_isa == Isa::avx2 ? avx2::axpy_f32(alpha, x, y, n)
                     : scalar::axpy_impl(alpha, x, y, n);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  g_isa == Isa::avx2 ? avx2::axpy_f64(alpha, x, y, n)
                     : scalar::axpy_impl(alpha, x, y, n);
}

void relu(const float* x, float* y, std::size_t n) {
  g_isa == Isa::avx2 ? avx2::relu_f32(x, y, n) : scalar::relu_impl(x, y, n);
}

void relu(const double* x, double* y, std::size_t n) {
  g_isa == Isa::avx2 ? avx2::relu_f64(x, y, n) : scalar::relu_impl(x, y, n);
}

void relu_backward(const float* x, const float* dy, float* dx,
                   std::size_t n) {
  g_isa == Isa::avx2 ? avx2::relu_bwd_f32(x, dy, dx, n)
                     : scalar::relu_bwd_impl(x, dy, dx, n);
}

void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n) {
  g_isa == Isa::avx2 ? avx2::relu_bwd_f64(x, dy, dx, n)
                     : scalar::relu_bwd_impl(x, dy, dx, n);
}

float sum(const float* x, std::size_t n) {
  return g_isa == Isa::avx2 ? avx2::sum_f32(x, n) : scalar::sum_impl(x, n);
}

double sum(const double* x, std::size_t n) {
  return g_isa == Isa::avx2 ? avx2::sum_f64(x, n) : scalar::sum_impl(x, n);
}

}  // namespace uavnet::kernels
