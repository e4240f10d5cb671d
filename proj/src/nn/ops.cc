// Copyright 2026 The Sketchvoice Authors
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

#include "sketchvoice/nn/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "sketchvoice/errors.h"

namespace sketchvoice::nn {

namespace {

using RowMatrix =
    Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXf>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXf>;

Node& parent(Node& n, std::size_t i) { return *n.parents[i]; }

void require(bool condition, const char* op, const std::string& detail) {
  if (!condition) throw InvalidArgument(std::string(op) + ": " + detail);
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  require(a.shape() == b.shape(), op,
          "shape mismatch " + shape_string(a.shape()) + " vs " +
              shape_string(b.shape()));
}

ConstMatrixMap as_matrix(const std::vector<float>& v, int rows, int cols) {
  return ConstMatrixMap(v.data(), rows, cols);
}

MatrixMap as_matrix(std::vector<float>& v, int rows, int cols) {
  return MatrixMap(v.data(), rows, cols);
}

// Elementwise unary op with derivative expressed in terms of input and output.
template <typename Forward, typename Derivative>
Tensor unary(const Tensor& x, Forward f, Derivative df) {
  std::vector<float> out(x.size());
  const auto& in = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return make_result(x.shape(), std::move(out), {x}, [df](Node& n) {
    Node& p = parent(n, 0);
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      g[i] += n.grad[i] * df(p.value[i], n.value[i]);
    }
  });
}

// im2col for [C, H, W] input and square kernel.
void im2col(const float* x, int channels, int height, int width, int kernel,
            int stride, int pad, int out_h, int out_w, float* cols) {
  const int out_size = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        float* row = cols + ((c * kernel + ky) * kernel + kx) * out_size;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          float* dst = row + oy * out_w;
          if (iy < 0 || iy >= height) {
            std::fill(dst, dst + out_w, 0.0f);
            continue;
          }
          const float* src = x + (c * height + iy) * width;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            dst[ox] = (ix < 0 || ix >= width) ? 0.0f : src[ix];
          }
        }
      }
    }
  }
}

void col2im(const float* cols, int channels, int height, int width, int kernel,
            int stride, int pad, int out_h, int out_w, float* x) {
  const int out_size = out_h * out_w;
  for (int c = 0; c < channels; ++c) {
    for (int ky = 0; ky < kernel; ++ky) {
      for (int kx = 0; kx < kernel; ++kx) {
        const float* row =
            cols + ((c * kernel + ky) * kernel + kx) * out_size;
        for (int oy = 0; oy < out_h; ++oy) {
          const int iy = oy * stride - pad + ky;
          if (iy < 0 || iy >= height) continue;
          float* dst = x + (c * height + iy) * width;
          const float* src = row + oy * out_w;
          for (int ox = 0; ox < out_w; ++ox) {
            const int ix = ox * stride - pad + kx;
            if (ix >= 0 && ix < width) dst[ix] += src[ox];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.rank() == 2 && b.rank() == 2 && a.dim(1) == b.dim(0), "matmul",
          shape_string(a.shape()) + " x " + shape_string(b.shape()));
  const int n = a.dim(0), k = a.dim(1), m = b.dim(1);
  std::vector<float> out(static_cast<std::size_t>(n) * m);
  as_matrix(out, n, m).noalias() =
      as_matrix(a.values(), n, k) * as_matrix(b.values(), k, m);
  return make_result({n, m}, std::move(out), {a, b}, [n, k, m](Node& node) {
    auto dy = as_matrix(static_cast<const std::vector<float>&>(node.grad), n, m);
    Node& pa = parent(node, 0);
    Node& pb = parent(node, 1);
    if (pa.requires_grad) {
      as_matrix(pa.ensure_grad(), n, k).noalias() +=
          dy * as_matrix(static_cast<const std::vector<float>&>(pb.value), k, m)
                   .transpose();
    }
    if (pb.requires_grad) {
      as_matrix(pb.ensure_grad(), k, m).noalias() +=
          as_matrix(static_cast<const std::vector<float>&>(pa.value), n, k)
              .transpose() *
          dy;
    }
  });
}

Tensor transpose(const Tensor& a) {
  require(a.rank() == 2, "transpose", "expects a matrix");
  const int n = a.dim(0), m = a.dim(1);
  std::vector<float> out(a.size());
  as_matrix(out, m, n) = as_matrix(a.values(), n, m).transpose();
  return make_result({m, n}, std::move(out), {a}, [n, m](Node& node) {
    Node& p = parent(node, 0);
    if (!p.requires_grad) return;
    as_matrix(p.ensure_grad(), n, m) +=
        as_matrix(static_cast<const std::vector<float>&>(node.grad), m, n)
            .transpose();
  });
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  Tensor y = matmul(x, w);
  return b.defined() ? add_row_vector(y, b) : y;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<float> out(a.size());
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& n) {
    for (std::size_t k = 0; k < 2; ++k) {
      Node& p = parent(n, k);
      if (!p.requires_grad) continue;
      auto& g = p.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<float> out(a.size());
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& n) {
    Node& pa = parent(n, 0);
    Node& pb = parent(n, 1);
    if (pa.requires_grad) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= n.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<float> out(a.size());
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_result(a.shape(), std::move(out), {a, b}, [](Node& n) {
    Node& pa = parent(n, 0);
    Node& pb = parent(n, 1);
    if (pa.requires_grad) {
      auto& g = pa.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * pb.value[i];
    }
    if (pb.requires_grad) {
      auto& g = pb.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i] * pa.value[i];
    }
  });
}

Tensor scale(const Tensor& a, float s) {
  return unary(
      a, [s](float v) { return v * s; }, [s](float, float) { return s; });
}

Tensor add_row_vector(const Tensor& x, const Tensor& v) {
  require(x.rank() == 2 && v.size() == static_cast<std::size_t>(x.dim(1)),
          "add_row_vector",
          shape_string(x.shape()) + " + " + shape_string(v.shape()));
  const int n = x.dim(0), m = x.dim(1);
  std::vector<float> out(x.values());
  const auto& vv = v.values();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) out[static_cast<std::size_t>(i) * m + j] += vv[j];
  }
  return make_result(x.shape(), std::move(out), {x, v}, [n, m](Node& node) {
    Node& px = parent(node, 0);
    Node& pv = parent(node, 1);
    if (px.requires_grad) {
      auto& g = px.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
    }
    if (pv.requires_grad) {
      auto& g = pv.ensure_grad();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) g[j] += node.grad[static_cast<std::size_t>(i) * m + j];
      }
    }
  });
}

Tensor add_channel_vector(const Tensor& x, const Tensor& v) {
  require(x.rank() >= 1 && v.size() == static_cast<std::size_t>(x.dim(0)),
          "add_channel_vector",
          shape_string(x.shape()) + " + " + shape_string(v.shape()));
  const int channels = x.dim(0);
  const std::size_t inner = x.size() / static_cast<std::size_t>(channels);
  std::vector<float> out(x.values());
  const auto& vv = v.values();
  for (int c = 0; c < channels; ++c) {
    for (std::size_t i = 0; i < inner; ++i) out[c * inner + i] += vv[c];
  }
  return make_result(
      x.shape(), std::move(out), {x, v}, [channels, inner](Node& node) {
        Node& px = parent(node, 0);
        Node& pv = parent(node, 1);
        if (px.requires_grad) {
          auto& g = px.ensure_grad();
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
        }
        if (pv.requires_grad) {
          auto& g = pv.ensure_grad();
          for (int c = 0; c < channels; ++c) {
            float acc = 0.0f;
            for (std::size_t i = 0; i < inner; ++i) acc += node.grad[c * inner + i];
            g[c] += acc;
          }
        }
      });
}

Tensor relu(const Tensor& x) {
  return unary(
      x, [](float v) { return v > 0.0f ? v : 0.0f; },
      [](float in, float) { return in > 0.0f ? 1.0f : 0.0f; });
}

Tensor silu(const Tensor& x) {
  return unary(
      x, [](float v) { return v / (1.0f + std::exp(-v)); },
      [](float in, float) {
        const float s = 1.0f / (1.0f + std::exp(-in));
        return s * (1.0f + in * (1.0f - s));
      });
}

Tensor exp(const Tensor& x) {
  return unary(
      x, [](float v) { return std::exp(v); },
      [](float, float out) { return out; });
}

Tensor softmax_rows(const Tensor& x) {
  require(x.rank() == 2, "softmax_rows", "expects a matrix");
  const int n = x.dim(0), m = x.dim(1);
  std::vector<float> out(x.size());
  const auto& in = x.values();
  for (int i = 0; i < n; ++i) {
    const float* row = in.data() + static_cast<std::size_t>(i) * m;
    float* dst = out.data() + static_cast<std::size_t>(i) * m;
    const float mx = *std::max_element(row, row + m);
    float total = 0.0f;
    for (int j = 0; j < m; ++j) total += (dst[j] = std::exp(row[j] - mx));
    for (int j = 0; j < m; ++j) dst[j] /= total;
  }
  return make_result(x.shape(), std::move(out), {x}, [n, m](Node& node) {
    Node& p = parent(node, 0);
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (int i = 0; i < n; ++i) {
      const std::size_t base = static_cast<std::size_t>(i) * m;
      float dot = 0.0f;
      for (int j = 0; j < m; ++j) dot += node.grad[base + j] * node.value[base + j];
      for (int j = 0; j < m; ++j) {
        g[base + j] += node.value[base + j] * (node.grad[base + j] - dot);
      }
    }
  });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  float eps) {
  require(x.rank() == 2 && gain.size() == static_cast<std::size_t>(x.dim(1)) &&
              bias.size() == gain.size(),
          "layer_norm", "parameter size mismatch");
  const int n = x.dim(0), m = x.dim(1);
  std::vector<float> out(x.size());
  std::vector<float> xhat(x.size());
  std::vector<float> inv_std(static_cast<std::size_t>(n));
  const auto& in = x.values();
  const auto& gv = gain.values();
  const auto& bv = bias.values();
  for (int i = 0; i < n; ++i) {
    const std::size_t base = static_cast<std::size_t>(i) * m;
    double mu = 0.0;
    for (int j = 0; j < m; ++j) mu += in[base + j];
    mu /= m;
    double var = 0.0;
    for (int j = 0; j < m; ++j) var += (in[base + j] - mu) * (in[base + j] - mu);
    var /= m;
    const float is = static_cast<float>(1.0 / std::sqrt(var + eps));
    inv_std[i] = is;
    for (int j = 0; j < m; ++j) {
      xhat[base + j] = static_cast<float>(in[base + j] - mu) * is;
      out[base + j] = xhat[base + j] * gv[j] + bv[j];
    }
  }
  return make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [n, m, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& node) {
        Node& px = parent(node, 0);
        Node& pg = parent(node, 1);
        Node& pb = parent(node, 2);
        const auto& dy = node.grad;
        if (pg.requires_grad || pb.requires_grad) {
          auto& gg = pg.ensure_grad();
          auto& gb = pb.ensure_grad();
          for (int i = 0; i < n; ++i) {
            const std::size_t base = static_cast<std::size_t>(i) * m;
            for (int j = 0; j < m; ++j) {
              gg[j] += dy[base + j] * xhat[base + j];
              gb[j] += dy[base + j];
            }
          }
        }
        if (!px.requires_grad) return;
        auto& gx = px.ensure_grad();
        for (int i = 0; i < n; ++i) {
          const std::size_t base = static_cast<std::size_t>(i) * m;
          float sum_d = 0.0f, sum_dx = 0.0f;
          for (int j = 0; j < m; ++j) {
            const float d = dy[base + j] * pg.value[j];
            sum_d += d;
            sum_dx += d * xhat[base + j];
          }
          for (int j = 0; j < m; ++j) {
            const float d = dy[base + j] * pg.value[j];
            gx[base + j] += inv_std[i] / m *
                            (m * d - sum_d - xhat[base + j] * sum_dx);
          }
        }
      });
}

Tensor group_norm(const Tensor& x, int groups, const Tensor& gain,
                  const Tensor& bias, float eps) {
  require(x.rank() >= 2 && x.dim(0) % groups == 0 &&
              gain.size() == static_cast<std::size_t>(x.dim(0)) &&
              bias.size() == gain.size(),
          "group_norm", "bad shape " + shape_string(x.shape()));
  const int channels = x.dim(0);
  const int per_group = channels / groups;
  const std::size_t inner = x.size() / static_cast<std::size_t>(channels);
  const std::size_t group_size = inner * per_group;
  std::vector<float> out(x.size());
  std::vector<float> xhat(x.size());
  std::vector<float> inv_std(static_cast<std::size_t>(groups));
  const auto& in = x.values();
  const auto& gv = gain.values();
  const auto& bv = bias.values();
  for (int g = 0; g < groups; ++g) {
    const std::size_t base = g * group_size;
    double mu = 0.0;
    for (std::size_t i = 0; i < group_size; ++i) mu += in[base + i];
    mu /= static_cast<double>(group_size);
    double var = 0.0;
    for (std::size_t i = 0; i < group_size; ++i) {
      var += (in[base + i] - mu) * (in[base + i] - mu);
    }
    var /= static_cast<double>(group_size);
    const float is = static_cast<float>(1.0 / std::sqrt(var + eps));
    inv_std[g] = is;
    for (std::size_t i = 0; i < group_size; ++i) {
      const int c = g * per_group + static_cast<int>(i / inner);
      xhat[base + i] = static_cast<float>(in[base + i] - mu) * is;
      out[base + i] = xhat[base + i] * gv[c] + bv[c];
    }
  }
  return make_result(
      x.shape(), std::move(out), {x, gain, bias},
      [groups, per_group, inner, group_size, xhat = std::move(xhat),
       inv_std = std::move(inv_std)](Node& node) {
        Node& px = parent(node, 0);
        Node& pg = parent(node, 1);
        Node& pb = parent(node, 2);
        const auto& dy = node.grad;
        if (pg.requires_grad || pb.requires_grad) {
          auto& gg = pg.ensure_grad();
          auto& gb = pb.ensure_grad();
          for (std::size_t i = 0; i < dy.size(); ++i) {
            const std::size_t c = i / inner;
            gg[c] += dy[i] * xhat[i];
            gb[c] += dy[i];
          }
        }
        if (!px.requires_grad) return;
        auto& gx = px.ensure_grad();
        const float count = static_cast<float>(group_size);
        for (int g = 0; g < groups; ++g) {
          const std::size_t base = g * group_size;
          float sum_d = 0.0f, sum_dx = 0.0f;
          for (std::size_t i = 0; i < group_size; ++i) {
            const int c = g * per_group + static_cast<int>(i / inner);
            const float d = dy[base + i] * pg.value[c];
            sum_d += d;
            sum_dx += d * xhat[base + i];
          }
          for (std::size_t i = 0; i < group_size; ++i) {
            const int c = g * per_group + static_cast<int>(i / inner);
            const float d = dy[base + i] * pg.value[c];
            gx[base + i] += inv_std[g] / count *
                            (count * d - sum_d - xhat[base + i] * sum_dx);
          }
        }
      });
}

Tensor conv1d(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(x.rank() == 2 && w.rank() == 3 && w.dim(1) == x.dim(1) &&
              w.dim(0) % 2 == 1,
          "conv1d",
          shape_string(x.shape()) + " with kernel " + shape_string(w.shape()));
  const int length = x.dim(0), in_ch = x.dim(1);
  const int kernel = w.dim(0), out_ch = w.dim(2);
  const int pad = kernel / 2;
  const int width = kernel * in_ch;
  std::vector<float> cols(static_cast<std::size_t>(length) * width, 0.0f);
  const auto& in = x.values();
  for (int t = 0; t < length; ++t) {
    for (int j = 0; j < kernel; ++j) {
      const int src = t + j - pad;
      if (src < 0 || src >= length) continue;
      std::copy_n(in.data() + static_cast<std::size_t>(src) * in_ch, in_ch,
                  cols.data() + static_cast<std::size_t>(t) * width + j * in_ch);
    }
  }
  std::vector<float> out(static_cast<std::size_t>(length) * out_ch);
  as_matrix(out, length, out_ch).noalias() =
      as_matrix(static_cast<const std::vector<float>&>(cols), length, width) *
      as_matrix(w.values(), width, out_ch);
  if (b.defined()) {
    const auto& bv = b.values();
    for (int t = 0; t < length; ++t) {
      for (int c = 0; c < out_ch; ++c) out[static_cast<std::size_t>(t) * out_ch + c] += bv[c];
    }
  }
  std::vector<Tensor> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_result(
      {length, out_ch}, std::move(out), std::move(parents),
      [=, cols = std::move(cols)](Node& node) {
        auto dy = as_matrix(static_cast<const std::vector<float>&>(node.grad),
                            length, out_ch);
        Node& px = parent(node, 0);
        Node& pw = parent(node, 1);
        if (pw.requires_grad) {
          as_matrix(pw.ensure_grad(), width, out_ch).noalias() +=
              as_matrix(cols, length, width).transpose() * dy;
        }
        if (node.parents.size() > 2 && parent(node, 2).requires_grad) {
          auto& gb = parent(node, 2).ensure_grad();
          for (int t = 0; t < length; ++t) {
            for (int c = 0; c < out_ch; ++c) gb[c] += dy(t, c);
          }
        }
        if (px.requires_grad) {
          RowMatrix dcols =
              dy * as_matrix(static_cast<const std::vector<float>&>(pw.value),
                             width, out_ch)
                       .transpose();
          auto& gx = px.ensure_grad();
          for (int t = 0; t < length; ++t) {
            for (int j = 0; j < kernel; ++j) {
              const int src = t + j - pad;
              if (src < 0 || src >= length) continue;
              float* dst = gx.data() + static_cast<std::size_t>(src) * in_ch;
              const float* s = dcols.data() + static_cast<std::size_t>(t) * width + j * in_ch;
              for (int c = 0; c < in_ch; ++c) dst[c] += s[c];
            }
          }
        }
      });
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor& b, int stride,
              int pad) {
  require(x.rank() == 3 && w.rank() == 4 && w.dim(1) == x.dim(0) &&
              w.dim(2) == w.dim(3),
          "conv2d",
          shape_string(x.shape()) + " with kernel " + shape_string(w.shape()));
  const int in_ch = x.dim(0), height = x.dim(1), width = x.dim(2);
  const int out_ch = w.dim(0), kernel = w.dim(2);
  const int out_h = (height + 2 * pad - kernel) / stride + 1;
  const int out_w = (width + 2 * pad - kernel) / stride + 1;
  require(out_h > 0 && out_w > 0, "conv2d", "input smaller than kernel");
  const int patch = in_ch * kernel * kernel;
  const int out_size = out_h * out_w;
  std::vector<float> cols(static_cast<std::size_t>(patch) * out_size);
  im2col(x.values().data(), in_ch, height, width, kernel, stride, pad, out_h,
         out_w, cols.data());
  std::vector<float> out(static_cast<std::size_t>(out_ch) * out_size);
  auto out_m = as_matrix(out, out_ch, out_size);
  out_m.noalias() =
      as_matrix(w.values(), out_ch, patch) *
      as_matrix(static_cast<const std::vector<float>&>(cols), patch, out_size);
  if (b.defined()) {
    const auto& bv = b.values();
    for (int c = 0; c < out_ch; ++c) out_m.row(c).array() += bv[c];
  }
  std::vector<Tensor> parents{x, w};
  if (b.defined()) parents.push_back(b);
  return make_result(
      {out_ch, out_h, out_w}, std::move(out), std::move(parents),
      [=, cols = std::move(cols)](Node& node) {
        auto dy = as_matrix(static_cast<const std::vector<float>&>(node.grad),
                            out_ch, out_size);
        Node& px = parent(node, 0);
        Node& pw = parent(node, 1);
        if (pw.requires_grad) {
          as_matrix(pw.ensure_grad(), out_ch, patch).noalias() +=
              dy * as_matrix(cols, patch, out_size).transpose();
        }
        if (node.parents.size() > 2 && parent(node, 2).requires_grad) {
          auto& gb = parent(node, 2).ensure_grad();
          // Plain loop: Eigen's vectorised sum() order depends on alignment.
          for (int c = 0; c < out_ch; ++c) {
            float acc = 0.0f;
            for (int i = 0; i < out_size; ++i) acc += dy(c, i);
            gb[c] += acc;
          }
        }
        if (px.requires_grad) {
          RowMatrix dcols =
              as_matrix(static_cast<const std::vector<float>&>(pw.value),
                        out_ch, patch)
                  .transpose() *
              dy;
          col2im(dcols.data(), in_ch, height, width, kernel, stride, pad,
                 out_h, out_w, px.ensure_grad().data());
        }
      });
}

Tensor upsample_nearest2x(const Tensor& x) {
  require(x.rank() == 3, "upsample_nearest2x", "expects [C, H, W]");
  const int channels = x.dim(0), height = x.dim(1), width = x.dim(2);
  const int oh = height * 2, ow = width * 2;
  std::vector<float> out(static_cast<std::size_t>(channels) * oh * ow);
  const auto& in = x.values();
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < oh; ++y) {
      for (int xx = 0; xx < ow; ++xx) {
        out[(static_cast<std::size_t>(c) * oh + y) * ow + xx] =
            in[(static_cast<std::size_t>(c) * height + y / 2) * width + xx / 2];
      }
    }
  }
  return make_result(
      {channels, oh, ow}, std::move(out), {x},
      [channels, height, width, oh, ow](Node& node) {
        Node& p = parent(node, 0);
        if (!p.requires_grad) return;
        auto& g = p.ensure_grad();
        for (int c = 0; c < channels; ++c) {
          for (int y = 0; y < oh; ++y) {
            for (int xx = 0; xx < ow; ++xx) {
              g[(static_cast<std::size_t>(c) * height + y / 2) * width + xx / 2] +=
                  node.grad[(static_cast<std::size_t>(c) * oh + y) * ow + xx];
            }
          }
        }
      });
}

Tensor avg_pool2d(const Tensor& x, int factor) {
  require(x.rank() == 3 && factor >= 1 && x.dim(1) % factor == 0 &&
              x.dim(2) % factor == 0,
          "avg_pool2d",
          "shape " + shape_string(x.shape()) + " not divisible by " +
              std::to_string(factor));
  const int channels = x.dim(0), height = x.dim(1), width = x.dim(2);
  const int oh = height / factor, ow = width / factor;
  const float inv = 1.0f / static_cast<float>(factor * factor);
  std::vector<float> out(static_cast<std::size_t>(channels) * oh * ow, 0.0f);
  const auto& in = x.values();
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < height; ++y) {
      for (int xx = 0; xx < width; ++xx) {
        out[(static_cast<std::size_t>(c) * oh + y / factor) * ow + xx / factor] +=
            in[(static_cast<std::size_t>(c) * height + y) * width + xx] * inv;
      }
    }
  }
  return make_result(
      {channels, oh, ow}, std::move(out), {x},
      [=](Node& node) {
        Node& p = parent(node, 0);
        if (!p.requires_grad) return;
        auto& g = p.ensure_grad();
        for (int c = 0; c < channels; ++c) {
          for (int y = 0; y < height; ++y) {
            for (int xx = 0; xx < width; ++xx) {
              g[(static_cast<std::size_t>(c) * height + y) * width + xx] +=
                  node.grad[(static_cast<std::size_t>(c) * oh + y / factor) * ow +
                            xx / factor] *
                  inv;
            }
          }
        }
      });
}

Tensor crop2d(const Tensor& x, int height, int width) {
  require(x.rank() == 3 && height <= x.dim(1) && width <= x.dim(2) &&
              height > 0 && width > 0,
          "crop2d", "cannot crop " + shape_string(x.shape()));
  const int channels = x.dim(0), ih = x.dim(1), iw = x.dim(2);
  if (ih == height && iw == width) return x;
  std::vector<float> out(static_cast<std::size_t>(channels) * height * width);
  const auto& in = x.values();
  for (int c = 0; c < channels; ++c) {
    for (int y = 0; y < height; ++y) {
      std::copy_n(in.data() + (static_cast<std::size_t>(c) * ih + y) * iw, width,
                  out.data() + (static_cast<std::size_t>(c) * height + y) * width);
    }
  }
  return make_result(
      {channels, height, width}, std::move(out), {x},
      [=](Node& node) {
        Node& p = parent(node, 0);
        if (!p.requires_grad) return;
        auto& g = p.ensure_grad();
        for (int c = 0; c < channels; ++c) {
          for (int y = 0; y < height; ++y) {
            float* dst = g.data() + (static_cast<std::size_t>(c) * ih + y) * iw;
            const float* src =
                node.grad.data() + (static_cast<std::size_t>(c) * height + y) * width;
            for (int xx = 0; xx < width; ++xx) dst[xx] += src[xx];
          }
        }
      });
}

Tensor concat0(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat0", "no inputs");
  Shape shape = parts[0].shape();
  int total = 0;
  std::size_t count = 0;
  for (const Tensor& p : parts) {
    Shape tail(p.shape().begin() + 1, p.shape().end());
    require(p.rank() == static_cast<int>(shape.size()) &&
                std::equal(tail.begin(), tail.end(), shape.begin() + 1),
            "concat0",
            "incompatible " + shape_string(p.shape()) + " vs " +
                shape_string(shape));
    total += p.dim(0);
    count += p.size();
  }
  shape[0] = total;
  std::vector<float> out;
  out.reserve(count);
  std::vector<std::size_t> offsets;
  for (const Tensor& p : parts) {
    offsets.push_back(out.size());
    out.insert(out.end(), p.values().begin(), p.values().end());
  }
  return make_result(shape, std::move(out), parts,
                     [offsets = std::move(offsets)](Node& node) {
                       for (std::size_t k = 0; k < node.parents.size(); ++k) {
                         Node& p = parent(node, k);
                         if (!p.requires_grad) continue;
                         auto& g = p.ensure_grad();
                         for (std::size_t i = 0; i < g.size(); ++i) {
                           g[i] += node.grad[offsets[k] + i];
                         }
                       }
                     });
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
  require(!parts.empty(), "concat_cols", "no inputs");
  const int rows = parts[0].dim(0);
  std::vector<int> widths;
  int total = 0;
  for (const Tensor& p : parts) {
    require(p.rank() == 2 && p.dim(0) == rows, "concat_cols", "row mismatch");
    widths.push_back(p.dim(1));
    total += p.dim(1);
  }
  std::vector<float> out(static_cast<std::size_t>(rows) * total);
  int col = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& v = parts[k].values();
    for (int r = 0; r < rows; ++r) {
      std::copy_n(v.data() + static_cast<std::size_t>(r) * widths[k], widths[k],
                  out.data() + static_cast<std::size_t>(r) * total + col);
    }
    col += widths[k];
  }
  return make_result({rows, total}, std::move(out), parts,
                     [rows, total, widths = std::move(widths)](Node& node) {
                       int c0 = 0;
                       for (std::size_t k = 0; k < node.parents.size(); ++k) {
                         Node& p = parent(node, k);
                         if (p.requires_grad) {
                           auto& g = p.ensure_grad();
                           for (int r = 0; r < rows; ++r) {
                             for (int j = 0; j < widths[k]; ++j) {
                               g[static_cast<std::size_t>(r) * widths[k] + j] +=
                                   node.grad[static_cast<std::size_t>(r) * total + c0 + j];
                             }
                           }
                         }
                         c0 += widths[k];
                       }
                     });
}

Tensor slice_cols(const Tensor& x, int begin, int end) {
  require(x.rank() == 2 && 0 <= begin && begin < end && end <= x.dim(1),
          "slice_cols", "bad range");
  const int rows = x.dim(0), cols = x.dim(1), w = end - begin;
  std::vector<float> out(static_cast<std::size_t>(rows) * w);
  const auto& in = x.values();
  for (int r = 0; r < rows; ++r) {
    std::copy_n(in.data() + static_cast<std::size_t>(r) * cols + begin, w,
                out.data() + static_cast<std::size_t>(r) * w);
  }
  return make_result({rows, w}, std::move(out), {x}, [=](Node& node) {
    Node& p = parent(node, 0);
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (int r = 0; r < rows; ++r) {
      for (int j = 0; j < w; ++j) {
        g[static_cast<std::size_t>(r) * cols + begin + j] +=
            node.grad[static_cast<std::size_t>(r) * w + j];
      }
    }
  });
}

Tensor slice_rows(const Tensor& x, int begin, int end) {
  require(x.rank() >= 1 && 0 <= begin && begin < end && end <= x.dim(0),
          "slice_rows", "bad range");
  const std::size_t inner = x.size() / static_cast<std::size_t>(x.dim(0));
  Shape shape = x.shape();
  shape[0] = end - begin;
  std::vector<float> out(x.values().begin() + begin * inner,
                         x.values().begin() + end * inner);
  return make_result(shape, std::move(out), {x}, [begin, inner](Node& node) {
    Node& p = parent(node, 0);
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < node.grad.size(); ++i) {
      g[begin * inner + i] += node.grad[i];
    }
  });
}

Tensor reshape(const Tensor& x, Shape shape) {
  require(shape_size(shape) == x.size(), "reshape",
          shape_string(x.shape()) + " -> " + shape_string(shape));
  return make_result(std::move(shape), x.values(), {x}, [](Node& node) {
    Node& p = parent(node, 0);
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += node.grad[i];
  });
}

Tensor embedding(const Tensor& table, std::span<const int> indices) {
  require(table.rank() == 2, "embedding", "table must be a matrix");
  const int vocab = table.dim(0), width = table.dim(1);
  const int n = static_cast<int>(indices.size());
  std::vector<int> idx(indices.begin(), indices.end());
  std::vector<float> out(static_cast<std::size_t>(n) * width);
  for (int i = 0; i < n; ++i) {
    require(idx[i] >= 0 && idx[i] < vocab, "embedding",
            "index " + std::to_string(idx[i]) + " out of range");
    std::copy_n(table.values().data() + static_cast<std::size_t>(idx[i]) * width,
                width, out.data() + static_cast<std::size_t>(i) * width);
  }
  return make_result({n, width}, std::move(out), {table},
                     [width, idx = std::move(idx)](Node& node) {
                       Node& p = parent(node, 0);
                       if (!p.requires_grad) return;
                       auto& g = p.ensure_grad();
                       for (std::size_t i = 0; i < idx.size(); ++i) {
                         for (int j = 0; j < width; ++j) {
                           g[static_cast<std::size_t>(idx[i]) * width + j] +=
                               node.grad[i * width + j];
                         }
                       }
                     });
}

Tensor repeat_rows(const Tensor& x, std::span<const int> counts) {
  require(x.rank() == 2 && counts.size() == static_cast<std::size_t>(x.dim(0)),
          "repeat_rows", "counts must match row count");
  const int width = x.dim(1);
  std::vector<int> source;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    require(counts[i] >= 0, "repeat_rows", "negative count");
    for (int r = 0; r < counts[i]; ++r) source.push_back(static_cast<int>(i));
  }
  require(!source.empty(), "repeat_rows", "empty expansion");
  const int total = static_cast<int>(source.size());
  std::vector<float> out(static_cast<std::size_t>(total) * width);
  for (int t = 0; t < total; ++t) {
    std::copy_n(x.values().data() + static_cast<std::size_t>(source[t]) * width,
                width, out.data() + static_cast<std::size_t>(t) * width);
  }
  return make_result({total, width}, std::move(out), {x},
                     [width, source = std::move(source)](Node& node) {
                       Node& p = parent(node, 0);
                       if (!p.requires_grad) return;
                       auto& g = p.ensure_grad();
                       for (std::size_t t = 0; t < source.size(); ++t) {
                         for (int j = 0; j < width; ++j) {
                           g[static_cast<std::size_t>(source[t]) * width + j] +=
                               node.grad[t * width + j];
                         }
                       }
                     });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (float v : x.values()) total += v;
  return make_result({1}, {static_cast<float>(total)}, {x}, [](Node& node) {
    Node& p = parent(node, 0);
    if (!p.requires_grad) return;
    auto& g = p.ensure_grad();
    for (float& v : g) v += node.grad[0];
  });
}

Tensor mean(const Tensor& x) {
  return scale(sum(x), 1.0f / static_cast<float>(x.size()));
}

Tensor mse_loss(const Tensor& prediction, const Tensor& target) {
  require_same_shape(prediction, target, "mse_loss");
  const auto& a = prediction.values();
  const auto& b = target.values();
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    total += static_cast<double>(a[i] - b[i]) * (a[i] - b[i]);
  }
  const float inv = 1.0f / static_cast<float>(a.size());
  return make_result({1}, {static_cast<float>(total) * inv},
                     {prediction, target}, [inv](Node& node) {
                       Node& pa = parent(node, 0);
                       Node& pb = parent(node, 1);
                       const float g0 = node.grad[0] * 2.0f * inv;
                       for (std::size_t i = 0; i < pa.value.size(); ++i) {
                         const float d = g0 * (pa.value[i] - pb.value[i]);
                         if (pa.requires_grad) pa.ensure_grad()[i] += d;
                         if (pb.requires_grad) pb.ensure_grad()[i] -= d;
                       }
                     });
}

Tensor l1_loss(const Tensor& prediction, const Tensor& target) {
  require_same_shape(prediction, target, "l1_loss");
  const auto& a = prediction.values();
  const auto& b = target.values();
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += std::fabs(a[i] - b[i]);
  const float inv = 1.0f / static_cast<float>(a.size());
  return make_result({1}, {static_cast<float>(total) * inv},
                     {prediction, target}, [inv](Node& node) {
                       Node& pa = parent(node, 0);
                       Node& pb = parent(node, 1);
                       const float g0 = node.grad[0] * inv;
                       for (std::size_t i = 0; i < pa.value.size(); ++i) {
                         const float diff = pa.value[i] - pb.value[i];
                         const float d = diff > 0.0f ? g0 : (diff < 0.0f ? -g0 : 0.0f);
                         if (pa.requires_grad) pa.ensure_grad()[i] += d;
                         if (pb.requires_grad) pb.ensure_grad()[i] -= d;
                       }
                     });
}

Tensor gaussian_kl(const Tensor& mean_t, const Tensor& logvar) {
  require_same_shape(mean_t, logvar, "gaussian_kl");
  const auto& mu = mean_t.values();
  const auto& lv = logvar.values();
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    total += 0.5 * (static_cast<double>(mu[i]) * mu[i] + std::exp(lv[i]) - 1.0 - lv[i]);
  }
  const float inv = 1.0f / static_cast<float>(mu.size());
  return make_result({1}, {static_cast<float>(total) * inv}, {mean_t, logvar},
                     [inv](Node& node) {
                       Node& pm = parent(node, 0);
                       Node& pl = parent(node, 1);
                       const float g0 = node.grad[0] * inv;
                       for (std::size_t i = 0; i < pm.value.size(); ++i) {
                         if (pm.requires_grad) pm.ensure_grad()[i] += g0 * pm.value[i];
                         if (pl.requires_grad) {
                           pl.ensure_grad()[i] += g0 * 0.5f * (std::exp(pl.value[i]) - 1.0f);
                         }
                       }
                     });
}

}  // namespace sketchvoice::nn
