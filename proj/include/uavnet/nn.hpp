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

#ifndef UAVNET_NN_HPP
#define UAVNET_NN_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "uavnet/kernels.hpp"
#include "uavnet/rng.hpp"

// A small layer-based network with explicit backward passes. Templated on
// the scalar type: float for training speed, double for finite-difference
// gradient verification. Inner products and elementwise loops go through
// the dispatched kernels.

namespace uavnet::nn {

template <typename T>
struct Tensor {
  int b = 0, c = 0, h = 0, w = 0;
  std::vector<T> v;

  static Tensor make(int b_, int c_, int h_, int w_) {
    Tensor t;
    t.b = b_;
    t.c = c_;
    t.h = h_;
    t.w = w_;
    t.v.assign(static_cast<size_t>(b_) * c_ * h_ * w_, T{0});
    return t;
  }
  size_t size() const { return v.size(); }
  T* plane(int bi, int ci) {
    return v.data() + (static_cast<size_t>(bi) * c + ci) * h * w;
  }
  const T* plane(int bi, int ci) const {
    return v.data() + (static_cast<size_t>(bi) * c + ci) * h * w;
  }
};

// Mutable view over one parameter array and its gradient accumulator.
template <typename T>
struct ParamView {
  T* value = nullptr;
  T* grad = nullptr;
  size_t size = 0;
};

// 3x3 convolution, stride 1, zero padding 1; spatial size preserved.
// Implemented as im2col followed by per-output-channel dot products.
template <typename T>
class Conv3x3 {
 public:
  Conv3x3(int in_ch, int out_ch) : in_ch_(in_ch), out_ch_(out_ch) {
    weight_.assign(static_cast<size_t>(out_ch) * in_ch * 9, T{0});
    bias_.assign(out_ch, T{0});
    wgrad_.assign(weight_.size(), T{0});
    bgrad_.assign(bias_.size(), T{0});
  }

  void init_he(rng::SplitMix& g) {
    const double stddev = std::sqrt(2.0 / (in_ch_ * 9));
    for (auto& w : weight_) w = static_cast<T>(stddev * g.next_gaussian());
  }

  Tensor<T> forward(const Tensor<T>& x) {
    const int hw = x.h * x.w;
    const int k = in_ch_ * 9;
    in_h_ = x.h;
    in_w_ = x.w;
    in_b_ = x.b;
    col_.assign(static_cast<size_t>(x.b) * hw * k, T{0});
    Tensor<T> y = Tensor<T>::make(x.b, out_ch_, x.h, x.w);
    for (int bi = 0; bi < x.b; ++bi) {
      T* col = col_.data() + static_cast<size_t>(bi) * hw * k;
      im2col(x, bi, col);
      for (int oc = 0; oc < out_ch_; ++oc) {
        T* out = y.plane(bi, oc);
        const T* w = weight_.data() + static_cast<size_t>(oc) * k;
        for (int p = 0; p < hw; ++p)
          out[p] = kernels::dot(w, col + static_cast<size_t>(p) * k, k) +
                   bias_[oc];
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int hw = in_h_ * in_w_;
    const int k = in_ch_ * 9;
    Tensor<T> dx = Tensor<T>::make(in_b_, in_ch_, in_h_, in_w_);
    std::vector<T> dcol(static_cast<size_t>(hw) * k);
    for (int bi = 0; bi < in_b_; ++bi) {
      const T* col = col_.data() + static_cast<size_t>(bi) * hw * k;
      std::fill(dcol.begin(), dcol.end(), T{0});
      for (int oc = 0; oc < out_ch_; ++oc) {
        const T* g = dy.plane(bi, oc);
        T* wg = wgrad_.data() + static_cast<size_t>(oc) * k;
        const T* w = weight_.data() + static_cast<size_t>(oc) * k;
        for (int p = 0; p < hw; ++p) {
          if (g[p] == T{0}) continue;
          kernels::axpy(g[p], col + static_cast<size_t>(p) * k, wg, k);
          kernels::axpy(g[p], w, dcol.data() + static_cast<size_t>(p) * k, k);
        }
        bgrad_[oc] += kernels::sum(g, hw);
      }
      col2im(dcol.data(), dx, bi);
    }
    return dx;
  }

  std::vector<ParamView<T>> params() {
    return {{weight_.data(), wgrad_.data(), weight_.size()},
            {bias_.data(), bgrad_.data(), bias_.size()}};
  }

 private:
  void im2col(const Tensor<T>& x, int bi, T* col) const {
    const int h = x.h, w = x.w;
    for (int ci = 0; ci < in_ch_; ++ci) {
      const T* src = x.plane(bi, ci);
      for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
          T* dst =
              col + (static_cast<size_t>(y) * w + xx) * in_ch_ * 9 + ci * 9;
          for (int ky = -1; ky <= 1; ++ky) {
            const int sy = y + ky;
            for (int kx = -1; kx <= 1; ++kx) {
              const int sx = xx + kx;
              *dst++ = (sy >= 0 && sy < h && sx >= 0 && sx < w)
                           ? src[sy * w + sx]
                           : T{0};
            }
          }
        }
      }
    }
  }

  void col2im(const T* dcol, Tensor<T>& dx, int bi) const {
    const int h = dx.h, w = dx.w;
    for (int ci = 0; ci < in_ch_; ++ci) {
      T* dst = dx.plane(bi, ci);
      for (int y = 0; y < h; ++y) {
        for (int xx = 0; xx < w; ++xx) {
          const T* src =
              dcol + (static_cast<size_t>(y) * w + xx) * in_ch_ * 9 + ci * 9;
          for (int ky = -1; ky <= 1; ++ky) {
            const int sy = y + ky;
            for (int kx = -1; kx <= 1; ++kx) {
              const int sx = xx + kx;
              const T g = *src++;
              if (sy >= 0 && sy < h && sx >= 0 && sx < w)
                dst[sy * w + sx] += g;
            }
          }
        }
      }
    }
  }

  int in_ch_, out_ch_;
  std::vector<T> weight_, bias_, wgrad_, bgrad_;
  std::vector<T> col_;  // cached im2col of the last forward input
  int in_h_ = 0, in_w_ = 0, in_b_ = 0;
};

// Per-channel batch normalization over (batch, height, width). Training
// mode uses batch statistics and updates the running ones; inference mode
// uses running statistics only, so single-state forwards are deterministic.
template <typename T>
class BatchNorm2d {
 public:
  explicit BatchNorm2d(int channels) : ch_(channels) {
    gamma_.assign(ch_, T{1});
    beta_.assign(ch_, T{0});
    ggrad_.assign(ch_, T{0});
    bgrad_.assign(ch_, T{0});
    run_mean_.assign(ch_, T{0});
    run_var_.assign(ch_, T{1});
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    Tensor<T> y = Tensor<T>::make(x.b, x.c, x.h, x.w);
    const int hw = x.h * x.w;
    const size_t n = static_cast<size_t>(x.b) * hw;
    if (training) {
      xhat_ = Tensor<T>::make(x.b, x.c, x.h, x.w);
      invstd_.assign(ch_, T{0});
      for (int ci = 0; ci < ch_; ++ci) {
        T mean{0};
        for (int bi = 0; bi < x.b; ++bi)
          mean += kernels::sum(x.plane(bi, ci), hw);
        mean /= static_cast<T>(n);
        T var{0};
        for (int bi = 0; bi < x.b; ++bi) {
          const T* p = x.plane(bi, ci);
          for (int i = 0; i < hw; ++i) {
            const T d = p[i] - mean;
            var += d * d;
          }
        }
        var /= static_cast<T>(n);
        const T inv = T{1} / std::sqrt(var + eps());
        invstd_[ci] = inv;
        for (int bi = 0; bi < x.b; ++bi) {
          const T* p = x.plane(bi, ci);
          T* xh = xhat_.plane(bi, ci);
          T* out = y.plane(bi, ci);
          for (int i = 0; i < hw; ++i) {
            xh[i] = (p[i] - mean) * inv;
            out[i] = gamma_[ci] * xh[i] + beta_[ci];
          }
        }
        run_mean_[ci] =
            (T{1} - momentum()) * run_mean_[ci] + momentum() * mean;
        run_var_[ci] = (T{1} - momentum()) * run_var_[ci] + momentum() * var;
      }
    } else {
      for (int ci = 0; ci < ch_; ++ci) {
        const T inv = T{1} / std::sqrt(run_var_[ci] + eps());
        for (int bi = 0; bi < x.b; ++bi) {
          const T* p = x.plane(bi, ci);
          T* out = y.plane(bi, ci);
          for (int i = 0; i < hw; ++i)
            out[i] = gamma_[ci] * (p[i] - run_mean_[ci]) * inv + beta_[ci];
        }
      }
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    const int hw = dy.h * dy.w;
    const size_t n = static_cast<size_t>(dy.b) * hw;
    Tensor<T> dx = Tensor<T>::make(dy.b, dy.c, dy.h, dy.w);
    for (int ci = 0; ci < ch_; ++ci) {
      T sum_dy{0}, sum_dy_xhat{0};
      for (int bi = 0; bi < dy.b; ++bi) {
        const T* g = dy.plane(bi, ci);
        const T* xh = xhat_.plane(bi, ci);
        sum_dy += kernels::sum(g, hw);
        sum_dy_xhat += kernels::dot(g, xh, hw);
      }
      ggrad_[ci] += sum_dy_xhat;
      bgrad_[ci] += sum_dy;
      const T scale = gamma_[ci] * invstd_[ci] / static_cast<T>(n);
      for (int bi = 0; bi < dy.b; ++bi) {
        const T* g = dy.plane(bi, ci);
        const T* xh = xhat_.plane(bi, ci);
        T* out = dx.plane(bi, ci);
        for (int i = 0; i < hw; ++i)
          out[i] = scale * (static_cast<T>(n) * g[i] - sum_dy -
                            xh[i] * sum_dy_xhat);
      }
    }
    return dx;
  }

  std::vector<ParamView<T>> params() {
    return {{gamma_.data(), ggrad_.data(), gamma_.size()},
            {beta_.data(), bgrad_.data(), beta_.size()}};
  }

  std::vector<T>& running_mean() { return run_mean_; }
  std::vector<T>& running_var() { return run_var_; }

  static constexpr T eps() { return static_cast<T>(1e-5); }
  static constexpr T momentum() { return static_cast<T>(0.1); }

 private:
  int ch_;
  std::vector<T> gamma_, beta_, ggrad_, bgrad_;
  std::vector<T> run_mean_, run_var_;
  Tensor<T> xhat_;
  std::vector<T> invstd_;
};

// Fully connected layer on flattened input [B, in].
template <typename T>
class Dense {
 public:
  Dense(int in, int out) : in_(in), out_(out) {
    weight_.assign(static_cast<size_t>(out) * in, T{0});
    bias_.assign(out, T{0});
    wgrad_.assign(weight_.size(), T{0});
    bgrad_.assign(bias_.size(), T{0});
  }

  void init_he(rng::SplitMix& g) {
    const double stddev = std::sqrt(2.0 / in_);
    for (auto& w : weight_) w = static_cast<T>(stddev * g.next_gaussian());
  }

  // x: [B, in] flattened; returns [B, out]
  Tensor<T> forward(const Tensor<T>& x) {
    in_cache_ = x;
    Tensor<T> y = Tensor<T>::make(x.b, out_, 1, 1);
    for (int bi = 0; bi < x.b; ++bi) {
      const T* xp = x.v.data() + static_cast<size_t>(bi) * in_;
      T* yp = y.v.data() + static_cast<size_t>(bi) * out_;
      for (int o = 0; o < out_; ++o)
        yp[o] = kernels::dot(weight_.data() + static_cast<size_t>(o) * in_,
                             xp, in_) +
                bias_[o];
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) {
    Tensor<T> dx = Tensor<T>::make(in_cache_.b, in_cache_.c, in_cache_.h,
                                   in_cache_.w);
    for (int bi = 0; bi < dy.b; ++bi) {
      const T* xp = in_cache_.v.data() + static_cast<size_t>(bi) * in_;
      const T* gp = dy.v.data() + static_cast<size_t>(bi) * out_;
      T* dxp = dx.v.data() + static_cast<size_t>(bi) * in_;
      for (int o = 0; o < out_; ++o) {
        if (gp[o] == T{0}) continue;
        kernels::axpy(gp[o], xp,
                      wgrad_.data() + static_cast<size_t>(o) * in_, in_);
        kernels::axpy(gp[o], weight_.data() + static_cast<size_t>(o) * in_,
                      dxp, in_);
        bgrad_[o] += gp[o];
      }
    }
    return dx;
  }

  std::vector<ParamView<T>> params() {
    return {{weight_.data(), wgrad_.data(), weight_.size()},
            {bias_.data(), bgrad_.data(), bias_.size()}};
  }

 private:
  int in_, out_;
  std::vector<T> weight_, bias_, wgrad_, bgrad_;
  Tensor<T> in_cache_;
};

struct QNetworkSpec {
  int input_channels = 3;
  int m = 10;
  int stem_channels = 16;
  int residual_layers = 2;
  int blocks_per_layer = 2;
  int action_count = 5;

  // full-scale config
  static QNetworkSpec paper() { return {3, 10, 64, 3, 6, 5}; }
  // small config trainable on a desktop CPU
  static QNetworkSpec desk() { return {3, 10, 16, 2, 2, 5}; }

  int total_blocks() const { return residual_layers * blocks_per_layer; }

  void validate() const {
    if (action_count != 5)
      throw std::invalid_argument("action_count must be 5");
    if (stem_channels < 1 || residual_layers < 1 || blocks_per_layer < 1 ||
        m < 2 || input_channels < 1)
      throw std::invalid_argument("invalid network spec");
  }
};

// Residual CNN Q-function: stem conv+bn+relu, residual blocks of two
// convs with a skip connection, flatten, one dense layer to the 5 action
// values.
template <typename T>
class QNetwork {
 public:
  explicit QNetwork(const QNetworkSpec& spec)
      : spec_(spec),
        stem_(spec.input_channels, spec.stem_channels),
        head_(spec.stem_channels * spec.m * spec.m, spec.action_count) {
    spec.validate();
    const int nb = spec.total_blocks();
    blocks_.reserve(nb);
    for (int i = 0; i < nb; ++i) blocks_.emplace_back(spec.stem_channels);
  }

  const QNetworkSpec& spec() const { return spec_; }

  void init(std::uint64_t seed) {
    rng::SplitMix g(rng::mix(seed, 0xcdc1));
    stem_.conv().init_he(g);
    for (auto& b : blocks_) {
      b.c1.init_he(g);
      b.c2.init_he(g);
    }
    head_.init_he(g);
  }

  Tensor<T> forward(const Tensor<T>& x, bool training) {
    if (x.c != spec_.input_channels || x.h != spec_.m || x.w != spec_.m)
      throw std::invalid_argument("state shape does not match network spec");
    Tensor<T> cur = stem_.forward_act(x, training);
    for (auto& blk : blocks_) cur = blk.forward(cur, training);
    // flatten: [B, C, M, M] -> [B, C*M*M]
    Tensor<T> flat = cur;
    flat.c = cur.c * cur.h * cur.w;
    flat.h = flat.w = 1;
    return head_.forward(flat);
  }

  // dy: [B, action_count]; accumulates parameter gradients
  void backward(const Tensor<T>& dy) {
    Tensor<T> cur = head_.backward(dy);
    cur.w = spec_.m;
    cur.h = spec_.m;
    cur.c = spec_.stem_channels;
    for (auto it = blocks_.rbegin(); it != blocks_.rend(); ++it)
      cur = it->backward(cur);
    stem_.backward(cur);
  }

  std::vector<ParamView<T>> params() {
    std::vector<ParamView<T>> out;
    auto add = [&](std::vector<ParamView<T>> vs) {
      for (auto& v : vs) out.push_back(v);
    };
    add(stem_.conv().params());
    add(stem_.bn().params());
    for (auto& b : blocks_) {
      add(b.c1.params());
      add(b.b1.params());
      add(b.c2.params());
      add(b.b2.params());
    }
    add(head_.params());
    return out;
  }

  // batch-norm running statistics; part of the transferable state but not
  // touched by the optimizer
  std::vector<std::vector<T>*> aux_state() {
    std::vector<std::vector<T>*> out{&stem_.bn().running_mean(),
                                     &stem_.bn().running_var()};
    for (auto& b : blocks_) {
      out.push_back(&b.b1.running_mean());
      out.push_back(&b.b1.running_var());
      out.push_back(&b.b2.running_mean());
      out.push_back(&b.b2.running_var());
    }
    return out;
  }

  void zero_grad() {
    for (auto& p : params()) std::fill(p.grad, p.grad + p.size, T{0});
  }

  void copy_state_from(QNetwork& other) {
    auto a = params();
    auto b = other.params();
    for (size_t i = 0; i < a.size(); ++i)
      std::copy(b[i].value, b[i].value + b[i].size, a[i].value);
    auto am = aux_state();
    auto bm = other.aux_state();
    for (size_t i = 0; i < am.size(); ++i) *am[i] = *bm[i];
  }

  size_t param_count() {
    size_t n = 0;
    for (auto& p : params()) n += p.size;
    return n;
  }

 private:
  struct Stem {
    Stem(int in_ch, int out_ch) : conv_(in_ch, out_ch), bn_(out_ch) {}
    Conv3x3<T>& conv() { return conv_; }
    BatchNorm2d<T>& bn() { return bn_; }

    Tensor<T> forward_act(const Tensor<T>& x, bool training) {
      pre_ = bn_.forward(conv_.forward(x), training);
      Tensor<T> y = Tensor<T>::make(pre_.b, pre_.c, pre_.h, pre_.w);
      kernels::relu(pre_.v.data(), y.v.data(), pre_.size());
      return y;
    }
    Tensor<T> backward(const Tensor<T>& dy) {
      Tensor<T> d = Tensor<T>::make(dy.b, dy.c, dy.h, dy.w);
      kernels::relu_backward(pre_.v.data(), dy.v.data(), d.v.data(),
                             d.size());
      return conv_.backward(bn_.backward(d));
    }

    Conv3x3<T> conv_;
    BatchNorm2d<T> bn_;
    Tensor<T> pre_;
  };

  struct Block {
    explicit Block(int ch) : c1(ch, ch), b1(ch), c2(ch, ch), b2(ch) {}

    Tensor<T> forward(const Tensor<T>& x, bool training) {
      pre1 = b1.forward(c1.forward(x), training);
      Tensor<T> a1 = Tensor<T>::make(pre1.b, pre1.c, pre1.h, pre1.w);
      kernels::relu(pre1.v.data(), a1.v.data(), pre1.size());
      Tensor<T> y2 = b2.forward(c2.forward(a1), training);
      pre_out = y2;
      for (size_t i = 0; i < pre_out.size(); ++i) pre_out.v[i] += x.v[i];
      Tensor<T> out = Tensor<T>::make(x.b, x.c, x.h, x.w);
      kernels::relu(pre_out.v.data(), out.v.data(), out.size());
      return out;
    }

    Tensor<T> backward(const Tensor<T>& dy) {
      Tensor<T> d_pre = Tensor<T>::make(dy.b, dy.c, dy.h, dy.w);
      kernels::relu_backward(pre_out.v.data(), dy.v.data(), d_pre.v.data(),
                             d_pre.size());
      // main branch
      Tensor<T> d1 = c2.backward(b2.backward(d_pre));
      Tensor<T> d1_pre = Tensor<T>::make(d1.b, d1.c, d1.h, d1.w);
      kernels::relu_backward(pre1.v.data(), d1.v.data(), d1_pre.v.data(),
                             d1_pre.size());
      Tensor<T> dx = c1.backward(b1.backward(d1_pre));
      // skip branch
      for (size_t i = 0; i < dx.size(); ++i) dx.v[i] += d_pre.v[i];
      return dx;
    }

    Conv3x3<T> c1;
    BatchNorm2d<T> b1;
    Conv3x3<T> c2;
    BatchNorm2d<T> b2;
    Tensor<T> pre1, pre_out;
  };

  QNetworkSpec spec_;
  Stem stem_;
  std::vector<Block> blocks_;
  Dense<T> head_;
};

// Per-parameter adaptive moment optimizer with standard defaults.
template <typename T>
class Adam {
 public:
  explicit Adam(QNetwork<T>& net, double lr)
      : lr_(lr) {
    for (auto& p : net.params()) total_ += p.size;
    m_.assign(total_, T{0});
    v_.assign(total_, T{0});
  }

  void step(QNetwork<T>& net) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    size_t off = 0;
    for (auto& p : net.params()) {
      for (size_t i = 0; i < p.size; ++i) {
        const double g = static_cast<double>(p.grad[i]);
        const double m = beta1_ * m_[off + i] + (1.0 - beta1_) * g;
        const double v = beta2_ * v_[off + i] + (1.0 - beta2_) * g * g;
        m_[off + i] = static_cast<T>(m);
        v_[off + i] = static_cast<T>(v);
        p.value[i] -= static_cast<T>(lr_ * (m / bc1) /
                                     (std::sqrt(v / bc2) + 1e-8));
      }
      off += p.size;
    }
  }

  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  double lr_;
  double beta1_ = 0.9, beta2_ = 0.999;
  long t_ = 0;
  size_t total_ = 0;
  std::vector<T> m_, v_;
};

}  // namespace uavnet::nn

#endif  // UAVNET_NN_HPP
