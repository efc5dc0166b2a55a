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

#ifndef UAVNET_KERNELS_HPP
#define UAVNET_KERNELS_HPP

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the neural network and the heatmap
// pipeline. Scalar reference implementations always exist; an AVX2 variant
// is selected at runtime when the CPU supports it. The two variants are
// equivalence-tested against each other (see tests/test_kernels.cpp);
// they may differ by reduction order at the level of floating-point
// rounding only.

namespace uavnet::kernels {

enum class Isa { scalar, avx2 };

// ISA chosen at startup from CPU feature detection.
Isa active_isa();

// Test hook: force a specific ISA (no-op request to use avx2 on a CPU
// without it is ignored). Returns the ISA actually in effect.
Isa force_isa(Isa isa);

std::string_view isa_name(Isa isa);

// y = sum_i a[i] * b[i]
float dot(const float* a, const float* b, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);

// y[i] += alpha * x[i]
void axpy(float alpha, const float* x, float* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);

// y[i] = max(x[i], 0)
void relu(const float* x, float* y, std::size_t n);
void relu(const double* x, double* y, std::size_t n);

// dx[i] = x[i] > 0 ? dy[i] : 0   (x is the forward input)
void relu_backward(const float* x, const float* dy, float* dx, std::size_t n);
void relu_backward(const double* x, const double* dy, double* dx,
                   std::size_t n);

// sum of all entries
float sum(const float* x, std::size_t n);
double sum(const double* x, std::size_t n);

}  // namespace uavnet::kernels

#endif  // UAVNET_KERNELS_HPP
