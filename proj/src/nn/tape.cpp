/*
 * Copyright 2026 The coastsurr Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "coastsurr/nn/tape.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Core>
#include <cmath>

#include "coastsurr/core/errors.hpp"

namespace coastsurr::nn {

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "[";
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (k) s += ", ";
    s += std::to_string(shape[k]);
  }
  return s + "]";
}

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MapM = Eigen::Map<Mat<T>>;
template <typename T>
using CMapM = Eigen::Map<const Mat<T>>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ShapeError(what);
}

template <typename T>
void require_chw(const Tensor<T>& t, const char* op) {
  require(t.rank() == 3, std::string(op) + " expects a [C, H, W] tensor, got " + shape_string(t.shape));
}

// Unfolds one group of x into col [cin_g * kh * kw, hout * wout].
template <typename T>
void im2col(const Tensor<T>& x, int c0, int cin_g, int kh, int kw, int stride, int pad, int hout,
            int wout, T* col) {
  const int h = x.height(), w = x.width();
  std::size_t row = 0;
  for (int c = 0; c < cin_g; ++c) {
    const T* plane = x.ptr() + static_cast<std::size_t>(c0 + c) * h * w;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx, ++row) {
        T* dst = col + row * static_cast<std::size_t>(hout) * wout;
        for (int oy = 0; oy < hout; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) {
            for (int ox = 0; ox < wout; ++ox) dst[oy * wout + ox] = T(0);
            continue;
          }
          for (int ox = 0; ox < wout; ++ox) {
            const int ix = ox * stride - pad + kx;
            dst[oy * wout + ox] = (ix >= 0 && ix < w) ? plane[iy * w + ix] : T(0);
          }
        }
      }
    }
  }
}

template <typename T>
void col2im(const T* col, int c0, int cin_g, int kh, int kw, int stride, int pad, int hout, int wout,
            Tensor<T>& dx) {
  const int h = dx.height(), w = dx.width();
  std::size_t row = 0;
  for (int c = 0; c < cin_g; ++c) {
    T* plane = dx.ptr() + static_cast<std::size_t>(c0 + c) * h * w;
    for (int ky = 0; ky < kh; ++ky) {
      for (int kx = 0; kx < kw; ++kx, ++row) {
        const T* src = col + row * static_cast<std::size_t>(hout) * wout;
        for (int oy = 0; oy < hout; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= h) continue;
          for (int ox = 0; ox < wout; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < w) plane[iy * w + ix] += src[oy * wout + ox];
          }
        }
      }
    }
  }
}

}  // namespace

template <typename T>
Var Tape<T>::push(Tensor<T> value, bool requires_grad) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad && record_;
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

template <typename T>
Var Tape<T>::constant(Tensor<T> value) {
  return push(std::move(value), false);
}

template <typename T>
Var Tape<T>::input(Tensor<T> value) {
  return push(std::move(value), true);
}

template <typename T>
Var Tape<T>::parameter(const Tensor<T>& value, Tensor<T>* grad) {
  Node n;
  n.ref = &value;
  n.ext_grad = grad;
  n.requires_grad = grad != nullptr && record_;
  if (grad != nullptr) {
    require(grad->shape == value.shape, "parameter gradient buffer shape mismatch");
  }
  nodes_.push_back(std::move(n));
  return static_cast<Var>(nodes_.size() - 1);
}

template <typename T>
const Tensor<T>& Tape<T>::value(Var v) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(v));
  return n.ref ? *n.ref : n.value;
}

template <typename T>
const Tensor<T>& Tape<T>::grad(Var v) const {
  const Node& n = nodes_.at(static_cast<std::size_t>(v));
  return n.ext_grad ? *n.ext_grad : n.grad;
}

template <typename T>
bool Tape<T>::any_grad(std::initializer_list<Var> vs) const {
  for (Var v : vs) {
    if (v != kNoVar && nodes_[v].requires_grad) return true;
  }
  return false;
}

template <typename T>
Tensor<T>& Tape<T>::grad_buffer(Var v) {
  Node& n = nodes_[v];
  if (n.ext_grad) return *n.ext_grad;
  if (n.grad.empty() && !value(v).empty()) n.grad = Tensor<T>(value(v).shape);
  if (n.grad.shape != value(v).shape) n.grad = Tensor<T>(value(v).shape);
  return n.grad;
}

template <typename T>
void Tape<T>::backward(Var out, const Tensor<T>& seed) {
  if (!record_) throw Error("backward() on a tape that is not recording");
  require(seed.shape == value(out).shape, "backward seed shape " + shape_string(seed.shape) +
                                              " does not match output " + shape_string(value(out).shape));
  if (!nodes_[out].requires_grad) return;
  Tensor<T>& g = grad_buffer(out);
  for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += seed.data[k];
  for (Var v = out; v >= 0; --v) {
    Node& n = nodes_[v];
    if (n.backward && !n.grad.empty()) n.backward();
  }
}

template <typename T>
Var Tape<T>::conv2d(Var xv, Var wv, Var bv, int stride, int pad, int groups) {
  const Tensor<T>& x = value(xv);
  const Tensor<T>& w = value(wv);
  require_chw(x, "conv2d");
  require(w.rank() == 4, "conv2d weight must be [Cout, Cin/groups, kh, kw]");
  const int cin = x.channels(), h = x.height(), wd = x.width();
  const int cout = w.dim(0), cin_g = w.dim(1), kh = w.dim(2), kw = w.dim(3);
  require(groups >= 1 && cin % groups == 0 && cout % groups == 0 && cin / groups == cin_g,
          "conv2d channel/group mismatch: input " + shape_string(x.shape) + ", weight " +
              shape_string(w.shape) + ", groups " + std::to_string(groups));
  require(stride >= 1 && pad >= 0, "conv2d stride/pad out of range");
  const int hout = (h + 2 * pad - kh) / stride + 1;
  const int wout = (wd + 2 * pad - kw) / stride + 1;
  require(hout > 0 && wout > 0, "conv2d kernel larger than padded input");
  if (bv != kNoVar) require(value(bv).size() == static_cast<std::size_t>(cout), "conv2d bias size mismatch");

  const int cout_g = cout / groups;
  const int kdim = cin_g * kh * kw;
  const int npix = hout * wout;
  const bool direct = kh == 1 && kw == 1 && stride == 1 && pad == 0;
  Tensor<T> out({cout, hout, wout});
  std::vector<T> cols;
  if (!direct) cols.resize(static_cast<std::size_t>(groups) * kdim * npix);
  for (int g = 0; g < groups; ++g) {
    const T* col;
    if (direct) {
      col = x.ptr() + static_cast<std::size_t>(g) * cin_g * npix;
    } else {
      T* c = cols.data() + static_cast<std::size_t>(g) * kdim * npix;
      im2col(x, g * cin_g, cin_g, kh, kw, stride, pad, hout, wout, c);
      col = c;
    }
    CMapM<T> wm(w.ptr() + static_cast<std::size_t>(g) * cout_g * kdim, cout_g, kdim);
    CMapM<T> cm(col, kdim, npix);
    MapM<T> om(out.ptr() + static_cast<std::size_t>(g) * cout_g * npix, cout_g, npix);
    om.noalias() = wm * cm;
  }
  if (bv != kNoVar) {
    const Tensor<T>& b = value(bv);
    for (int c = 0; c < cout; ++c) {
      T* o = out.ptr() + static_cast<std::size_t>(c) * npix;
      for (int p = 0; p < npix; ++p) o[p] += b.data[c];
    }
  }
  const Var ov = push(std::move(out), any_grad({xv, wv, bv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, wv, bv, stride, pad, groups, cout_g, cin_g, kh, kw, kdim, npix,
                           hout, wout, direct, cols = std::move(cols)]() {
      const Tensor<T>& go = nodes_[ov].grad;
      const Tensor<T>& x = value(xv);
      const Tensor<T>& w = value(wv);
      const bool need_x = nodes_[xv].requires_grad;
      const bool need_w = nodes_[wv].requires_grad;
      std::vector<T> dcol;
      if (need_x && !direct) dcol.resize(static_cast<std::size_t>(kdim) * npix);
      for (int g = 0; g < groups; ++g) {
        CMapM<T> gm(go.ptr() + static_cast<std::size_t>(g) * cout_g * npix, cout_g, npix);
        const T* col = direct ? x.ptr() + static_cast<std::size_t>(g) * cin_g * npix
                              : cols.data() + static_cast<std::size_t>(g) * kdim * npix;
        if (need_w) {
          Tensor<T>& gw = grad_buffer(wv);
          MapM<T> gwm(gw.ptr() + static_cast<std::size_t>(g) * cout_g * kdim, cout_g, kdim);
          gwm.noalias() += gm * CMapM<T>(col, kdim, npix).transpose();
        }
        if (need_x) {
          CMapM<T> wm(w.ptr() + static_cast<std::size_t>(g) * cout_g * kdim, cout_g, kdim);
          Tensor<T>& gx = grad_buffer(xv);
          if (direct) {
            MapM<T> gxm(gx.ptr() + static_cast<std::size_t>(g) * cin_g * npix, cin_g, npix);
            gxm.noalias() += wm.transpose() * gm;
          } else {
            MapM<T> dm(dcol.data(), kdim, npix);
            dm.noalias() = wm.transpose() * gm;
            col2im(dcol.data(), g * cin_g, cin_g, kh, kw, stride, pad, hout, wout, gx);
          }
        }
      }
      if (bv != kNoVar && nodes_[bv].requires_grad) {
        Tensor<T>& gb = grad_buffer(bv);
        const int cout = go.channels();
        for (int c = 0; c < cout; ++c) {
          const T* o = go.ptr() + static_cast<std::size_t>(c) * npix;
          T s = T(0);
          for (int p = 0; p < npix; ++p) s += o[p];
          gb.data[c] += s;
        }
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::conv_transpose2x2(Var xv, Var wv, Var bv) {
  const Tensor<T>& x = value(xv);
  const Tensor<T>& w = value(wv);
  require_chw(x, "conv_transpose2x2");
  require(w.rank() == 4 && w.dim(0) == x.channels() && w.dim(2) == 2 && w.dim(3) == 2,
          "conv_transpose2x2 weight must be [Cin, Cout, 2, 2]");
  const int cin = x.channels(), h = x.height(), wd = x.width(), cout = w.dim(1);
  const int npix = h * wd;
  Mat<T> y = CMapM<T>(w.ptr(), cin, cout * 4).transpose() * CMapM<T>(x.ptr(), cin, npix);
  Tensor<T> out({cout, 2 * h, 2 * wd});
  for (int c = 0; c < cout; ++c) {
    const T bias = bv != kNoVar ? value(bv).data[c] : T(0);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        const T* row = y.data() + static_cast<std::size_t>(c * 4 + a * 2 + b) * npix;
        for (int i = 0; i < h; ++i) {
          for (int j = 0; j < wd; ++j) out.at(c, 2 * i + a, 2 * j + b) = row[i * wd + j] + bias;
        }
      }
    }
  }
  const Var ov = push(std::move(out), any_grad({xv, wv, bv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, wv, bv, cin, cout, h, wd, npix]() {
      const Tensor<T>& go = nodes_[ov].grad;
      Mat<T> gy(cout * 4, npix);
      for (int c = 0; c < cout; ++c) {
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            T* row = gy.data() + static_cast<std::size_t>(c * 4 + a * 2 + b) * npix;
            for (int i = 0; i < h; ++i) {
              for (int j = 0; j < wd; ++j) row[i * wd + j] = go.at(c, 2 * i + a, 2 * j + b);
            }
          }
        }
      }
      if (nodes_[wv].requires_grad) {
        MapM<T>(grad_buffer(wv).ptr(), cin, cout * 4).noalias() +=
            CMapM<T>(value(xv).ptr(), cin, npix) * gy.transpose();
      }
      if (nodes_[xv].requires_grad) {
        MapM<T>(grad_buffer(xv).ptr(), cin, npix).noalias() +=
            CMapM<T>(value(wv).ptr(), cin, cout * 4) * gy;
      }
      if (bv != kNoVar && nodes_[bv].requires_grad) {
        Tensor<T>& gb = grad_buffer(bv);
        for (int c = 0; c < cout; ++c) gb.data[c] += gy.block(c * 4, 0, 4, npix).sum();
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::avg_pool(Var xv, int k) {
  const Tensor<T>& x = value(xv);
  require_chw(x, "avg_pool");
  require(k >= 1 && x.height() % k == 0 && x.width() % k == 0,
          "avg_pool factor " + std::to_string(k) + " does not divide " + shape_string(x.shape));
  const int c = x.channels(), ho = x.height() / k, wo = x.width() / k;
  const T inv = T(1) / static_cast<T>(k * k);
  Tensor<T> out({c, ho, wo});
  for (int ch = 0; ch < c; ++ch) {
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) out.at(ch, i / k, j / k) += x.at(ch, i, j);
    }
  }
  for (auto& v : out.data) v *= inv;
  const Var ov = push(std::move(out), any_grad({xv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, k, inv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      Tensor<T>& gx = grad_buffer(xv);
      for (int ch = 0; ch < gx.channels(); ++ch) {
        for (int i = 0; i < gx.height(); ++i) {
          for (int j = 0; j < gx.width(); ++j) gx.at(ch, i, j) += go.at(ch, i / k, j / k) * inv;
        }
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::relu(Var xv) {
  Tensor<T> out = value(xv);
  for (auto& v : out.data) v = v > T(0) ? v : T(0);
  const Var ov = push(std::move(out), any_grad({xv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      const Tensor<T>& y = nodes_[ov].value;
      Tensor<T>& gx = grad_buffer(xv);
      for (std::size_t k = 0; k < gx.size(); ++k) {
        if (y.data[k] > T(0)) gx.data[k] += go.data[k];
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::relu_revive(Var xv) {
  Tensor<T> out = value(xv);
  for (auto& v : out.data) v = v > T(0) ? v : T(0);
  const Var ov = push(std::move(out), any_grad({xv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      const Tensor<T>& y = nodes_[ov].value;
      Tensor<T>& gx = grad_buffer(xv);
      for (std::size_t k = 0; k < gx.size(); ++k) {
        if (y.data[k] > T(0) || go.data[k] < T(0)) gx.data[k] += go.data[k];
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::sigmoid(Var xv) {
  Tensor<T> out = value(xv);
  for (auto& v : out.data) {
    v = v >= T(0) ? T(1) / (T(1) + std::exp(-v)) : std::exp(v) / (T(1) + std::exp(v));
    v = std::clamp(v, std::numeric_limits<T>::min(), T(1) - std::numeric_limits<T>::epsilon() / 2);
  }
  const Var ov = push(std::move(out), any_grad({xv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      const Tensor<T>& y = nodes_[ov].value;
      Tensor<T>& gx = grad_buffer(xv);
      for (std::size_t k = 0; k < gx.size(); ++k) gx.data[k] += go.data[k] * y.data[k] * (T(1) - y.data[k]);
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::add(Var av, Var bv) {
  require(value(av).shape == value(bv).shape, "add shape mismatch: " + shape_string(value(av).shape) +
                                                  " vs " + shape_string(value(bv).shape));
  Tensor<T> out = value(av);
  const auto& b = value(bv);
  for (std::size_t k = 0; k < out.size(); ++k) out.data[k] += b.data[k];
  const Var ov = push(std::move(out), any_grad({av, bv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, av, bv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      for (Var v : {av, bv}) {
        if (!nodes_[v].requires_grad) continue;
        Tensor<T>& g = grad_buffer(v);
        for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += go.data[k];
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::mul(Var av, Var bv) {
  require(value(av).shape == value(bv).shape, "mul shape mismatch: " + shape_string(value(av).shape) +
                                                  " vs " + shape_string(value(bv).shape));
  Tensor<T> out = value(av);
  const auto& b = value(bv);
  for (std::size_t k = 0; k < out.size(); ++k) out.data[k] *= b.data[k];
  const Var ov = push(std::move(out), any_grad({av, bv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, av, bv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      if (nodes_[av].requires_grad) {
        Tensor<T>& g = grad_buffer(av);
        const auto& b = value(bv);
        for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += go.data[k] * b.data[k];
      }
      if (nodes_[bv].requires_grad) {
        Tensor<T>& g = grad_buffer(bv);
        const auto& a = value(av);
        for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += go.data[k] * a.data[k];
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::concat(Var av, Var bv) {
  const auto& a = value(av);
  const auto& b = value(bv);
  require_chw(a, "concat");
  require_chw(b, "concat");
  require(a.height() == b.height() && a.width() == b.width(),
          "concat spatial mismatch: " + shape_string(a.shape) + " vs " + shape_string(b.shape));
  Tensor<T> out({a.channels() + b.channels(), a.height(), a.width()});
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.size()));
  const std::size_t split = a.size();
  const Var ov = push(std::move(out), any_grad({av, bv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, av, bv, split]() {
      const Tensor<T>& go = nodes_[ov].grad;
      if (nodes_[av].requires_grad) {
        Tensor<T>& g = grad_buffer(av);
        for (std::size_t k = 0; k < split; ++k) g.data[k] += go.data[k];
      }
      if (nodes_[bv].requires_grad) {
        Tensor<T>& g = grad_buffer(bv);
        for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += go.data[split + k];
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::scale_channels(Var xv, Var sv) {
  const auto& x = value(xv);
  const auto& s = value(sv);
  require_chw(x, "scale_channels");
  require(s.size() == static_cast<std::size_t>(x.channels()), "scale_channels size mismatch");
  const std::size_t plane = static_cast<std::size_t>(x.height()) * x.width();
  Tensor<T> out = x;
  for (int c = 0; c < x.channels(); ++c) {
    for (std::size_t p = 0; p < plane; ++p) out.data[c * plane + p] *= s.data[c];
  }
  const Var ov = push(std::move(out), any_grad({xv, sv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, sv, plane]() {
      const Tensor<T>& go = nodes_[ov].grad;
      const auto& x = value(xv);
      const auto& s = value(sv);
      const int channels = x.channels();
      if (nodes_[xv].requires_grad) {
        Tensor<T>& g = grad_buffer(xv);
        for (int c = 0; c < channels; ++c) {
          for (std::size_t p = 0; p < plane; ++p) g.data[c * plane + p] += go.data[c * plane + p] * s.data[c];
        }
      }
      if (nodes_[sv].requires_grad) {
        Tensor<T>& g = grad_buffer(sv);
        for (int c = 0; c < channels; ++c) {
          T acc = T(0);
          for (std::size_t p = 0; p < plane; ++p) acc += go.data[c * plane + p] * x.data[c * plane + p];
          g.data[c] += acc;
        }
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::add_channel_bias(Var xv, Var vv) {
  const auto& x = value(xv);
  const auto& v = value(vv);
  require_chw(x, "add_channel_bias");
  require(v.size() == static_cast<std::size_t>(x.channels()), "add_channel_bias size mismatch");
  const std::size_t plane = static_cast<std::size_t>(x.height()) * x.width();
  Tensor<T> out = x;
  for (int c = 0; c < x.channels(); ++c) {
    for (std::size_t p = 0; p < plane; ++p) out.data[c * plane + p] += v.data[c];
  }
  const Var ov = push(std::move(out), any_grad({xv, vv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, vv, plane]() {
      const Tensor<T>& go = nodes_[ov].grad;
      if (nodes_[xv].requires_grad) {
        Tensor<T>& g = grad_buffer(xv);
        for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += go.data[k];
      }
      if (nodes_[vv].requires_grad) {
        Tensor<T>& g = grad_buffer(vv);
        for (std::size_t c = 0; c < g.size(); ++c) {
          T acc = T(0);
          for (std::size_t p = 0; p < plane; ++p) acc += go.data[c * plane + p];
          g.data[c] += acc;
        }
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::block_gate(Var xv, Var gv) {
  const auto& x = value(xv);
  const auto& gt = value(gv);
  require_chw(x, "block_gate");
  require(gt.rank() == 3 && gt.channels() == 1 && gt.height() > 0 && gt.width() > 0 &&
              x.height() % gt.height() == 0 && x.width() % gt.width() == 0,
          "block_gate map " + shape_string(gt.shape) + " does not tile " + shape_string(x.shape));
  const int bh = x.height() / gt.height();
  const int bw = x.width() / gt.width();
  Tensor<T> out = x;
  for (int c = 0; c < x.channels(); ++c) {
    for (int i = 0; i < x.height(); ++i) {
      for (int j = 0; j < x.width(); ++j) out.at(c, i, j) *= gt.at(0, i / bh, j / bw);
    }
  }
  const Var ov = push(std::move(out), any_grad({xv, gv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, gv, bh, bw]() {
      const Tensor<T>& go = nodes_[ov].grad;
      const auto& x = value(xv);
      const auto& gt = value(gv);
      const bool need_x = nodes_[xv].requires_grad;
      const bool need_g = nodes_[gv].requires_grad;
      Tensor<T>* gx = need_x ? &grad_buffer(xv) : nullptr;
      Tensor<T>* gg = need_g ? &grad_buffer(gv) : nullptr;
      for (int c = 0; c < x.channels(); ++c) {
        for (int i = 0; i < x.height(); ++i) {
          for (int j = 0; j < x.width(); ++j) {
            const T d = go.at(c, i, j);
            if (gx) gx->at(c, i, j) += d * gt.at(0, i / bh, j / bw);
            if (gg) gg->at(0, i / bh, j / bw) += d * x.at(c, i, j);
          }
        }
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::global_avg_pool(Var xv) {
  const auto& x = value(xv);
  require_chw(x, "global_avg_pool");
  const std::size_t plane = static_cast<std::size_t>(x.height()) * x.width();
  const T inv = T(1) / static_cast<T>(plane);
  Tensor<T> out({x.channels()});
  for (int c = 0; c < x.channels(); ++c) {
    T acc = T(0);
    for (std::size_t p = 0; p < plane; ++p) acc += x.data[c * plane + p];
    out.data[c] = acc * inv;
  }
  const Var ov = push(std::move(out), any_grad({xv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, plane, inv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      Tensor<T>& g = grad_buffer(xv);
      for (std::size_t c = 0; c < go.size(); ++c) {
        for (std::size_t p = 0; p < plane; ++p) g.data[c * plane + p] += go.data[c] * inv;
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::channel_mean(Var xv) {
  const auto& x = value(xv);
  require_chw(x, "channel_mean");
  const std::size_t plane = static_cast<std::size_t>(x.height()) * x.width();
  const T inv = T(1) / static_cast<T>(x.channels());
  Tensor<T> out({1, x.height(), x.width()});
  for (int c = 0; c < x.channels(); ++c) {
    for (std::size_t p = 0; p < plane; ++p) out.data[p] += x.data[c * plane + p];
  }
  for (auto& v : out.data) v *= inv;
  const Var ov = push(std::move(out), any_grad({xv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, plane, inv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      Tensor<T>& g = grad_buffer(xv);
      const std::size_t channels = g.size() / plane;
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t p = 0; p < plane; ++p) g.data[c * plane + p] += go.data[p] * inv;
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::dense(Var vv, Var wv, Var bv) {
  const auto& v = value(vv);
  const auto& w = value(wv);
  require(w.rank() == 2 && static_cast<std::size_t>(w.dim(1)) == v.size(),
          "dense weight " + shape_string(w.shape) + " does not accept input of " +
              std::to_string(v.size()) + " values");
  const int out_dim = w.dim(0), in_dim = w.dim(1);
  Tensor<T> out({out_dim});
  Eigen::Map<Eigen::Matrix<T, Eigen::Dynamic, 1>> om(out.ptr(), out_dim);
  om.noalias() = CMapM<T>(w.ptr(), out_dim, in_dim) *
                 Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(v.ptr(), in_dim);
  if (bv != kNoVar) {
    require(value(bv).size() == static_cast<std::size_t>(out_dim), "dense bias size mismatch");
    for (int k = 0; k < out_dim; ++k) out.data[k] += value(bv).data[k];
  }
  const Var ov = push(std::move(out), any_grad({vv, wv, bv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, vv, wv, bv, out_dim, in_dim]() {
      using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
      Eigen::Map<const Vec> gm(nodes_[ov].grad.ptr(), out_dim);
      if (nodes_[wv].requires_grad) {
        MapM<T>(grad_buffer(wv).ptr(), out_dim, in_dim).noalias() +=
            gm * Eigen::Map<const Vec>(value(vv).ptr(), in_dim).transpose();
      }
      if (nodes_[vv].requires_grad) {
        Eigen::Map<Vec>(grad_buffer(vv).ptr(), in_dim).noalias() +=
            CMapM<T>(value(wv).ptr(), out_dim, in_dim).transpose() * gm;
      }
      if (bv != kNoVar && nodes_[bv].requires_grad) {
        Tensor<T>& gb = grad_buffer(bv);
        for (int k = 0; k < out_dim; ++k) gb.data[k] += gm[k];
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::channel_weighted_sum(Var xv, Var wv) {
  const auto& x = value(xv);
  const auto& w = value(wv);
  require_chw(x, "channel_weighted_sum");
  require(w.size() == static_cast<std::size_t>(x.channels()), "channel_weighted_sum size mismatch");
  const std::size_t plane = static_cast<std::size_t>(x.height()) * x.width();
  Tensor<T> out({1, x.height(), x.width()});
  for (int c = 0; c < x.channels(); ++c) {
    for (std::size_t p = 0; p < plane; ++p) out.data[p] += x.data[c * plane + p] * w.data[c];
  }
  const Var ov = push(std::move(out), any_grad({xv, wv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv, wv, plane]() {
      const Tensor<T>& go = nodes_[ov].grad;
      const auto& x = value(xv);
      const auto& w = value(wv);
      const std::size_t channels = w.size();
      if (nodes_[xv].requires_grad) {
        Tensor<T>& g = grad_buffer(xv);
        for (std::size_t c = 0; c < channels; ++c) {
          for (std::size_t p = 0; p < plane; ++p) g.data[c * plane + p] += go.data[p] * w.data[c];
        }
      }
      if (nodes_[wv].requires_grad) {
        Tensor<T>& g = grad_buffer(wv);
        for (std::size_t c = 0; c < channels; ++c) {
          T acc = T(0);
          for (std::size_t p = 0; p < plane; ++p) acc += go.data[p] * x.data[c * plane + p];
          g.data[c] += acc;
        }
      }
    };
  }
  return ov;
}

template <typename T>
Var Tape<T>::reshape(Var xv, std::vector<int> shape) {
  require(Tensor<T>::count(shape) == value(xv).size(),
          "reshape " + shape_string(value(xv).shape) + " -> " + shape_string(shape) + " changes size");
  Tensor<T> out(std::move(shape), value(xv).data);
  const Var ov = push(std::move(out), any_grad({xv}));
  if (nodes_[ov].requires_grad) {
    nodes_[ov].backward = [this, ov, xv]() {
      const Tensor<T>& go = nodes_[ov].grad;
      Tensor<T>& g = grad_buffer(xv);
      for (std::size_t k = 0; k < g.size(); ++k) g.data[k] += go.data[k];
    };
  }
  return ov;
}

template class Tape<float>;
template class Tape<double>;

}  // namespace coastsurr::nn
