#include "toffe/neuro/ops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace toffe::neuro {
namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_string(a.shape()) +
                                " vs " + shape_string(b.shape()));
  }
}

void require_scalar(const Var& s, const char* op) {
  if (s.size() != 1) throw std::invalid_argument(std::string(op) + ": expected a one-element operand");
}

bool mostly_zero(const Tensor& x) {
  const auto nonzero = std::count_if(x.data.begin(), x.data.end(), [](double v) { return v != 0.0; });
  return static_cast<double>(nonzero) < 0.3 * static_cast<double>(x.size());
}

struct ConvDims {
  int c, h, w, o, k, oh, ow, stride, pad;
};

ConvDims conv_dims(const Shape& x, const Shape& w, Conv2dSpec spec) {
  if (x.size() != 3 || w.size() != 4) throw std::invalid_argument("conv2d: expected x [C,H,W] and w [O,C,K,K]");
  if (w[1] != x[0]) {
    throw std::invalid_argument("conv2d: input has " + std::to_string(x[0]) + " channels, kernel expects " +
                                std::to_string(w[1]));
  }
  if (w[2] != w[3]) throw std::invalid_argument("conv2d: kernel must be square");
  if (spec.stride < 1 || spec.padding < 0) throw std::invalid_argument("conv2d: bad stride or padding");
  ConvDims d{x[0], x[1], x[2], w[0], w[2], 0, 0, spec.stride, spec.padding};
  d.oh = (d.h + 2 * d.pad - d.k) / d.stride + 1;
  d.ow = (d.w + 2 * d.pad - d.k) / d.stride + 1;
  if (d.oh < 1 || d.ow < 1) throw std::invalid_argument("conv2d: kernel larger than padded input");
  return d;
}

// Output coordinate that input coordinate i feeds through kernel tap k, if any.
inline bool output_for_tap(const ConvDims& d, int i, int k, int extent, int& out) {
  const int num = i + d.pad - k;
  if (num < 0 || num % d.stride != 0) return false;
  out = num / d.stride;
  return out < extent;
}

}  // namespace

double Surrogate::grad(double z) const {
  const double a = std::abs(z) / width;
  switch (shape) {
    case SurrogateShape::Triangle: return std::max(0.0, 1.0 - a);
    case SurrogateShape::FastSigmoid: return 1.0 / ((1.0 + a) * (1.0 + a));
  }
  return 0.0;
}

double Surrogate::smoothed(double z) const {
  const double a = width;
  switch (shape) {
    case SurrogateShape::Triangle:
      if (z <= -a) return 0.0;
      if (z <= 0.0) return (z + a) * (z + a) / (2.0 * a);
      if (z < a) return a - (a - z) * (a - z) / (2.0 * a);
      return a;
    case SurrogateShape::FastSigmoid:
      if (z < 0.0) return a / (1.0 - z / a);
      return 2.0 * a - a / (1.0 + z / a);
  }
  return 0.0;
}

double surrogate_spike_grad(double z, const Surrogate& surrogate) { return surrogate.grad(z); }

Shape conv2d_output_shape(const Shape& x, const Shape& w, Conv2dSpec spec) {
  const ConvDims d = conv_dims(x, w, spec);
  return {d.o, d.oh, d.ow};
}

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const Tensor* bias, Conv2dSpec spec) {
  const ConvDims d = conv_dims(x.shape, w.shape, spec);
  if (bias && bias->size() != static_cast<std::size_t>(d.o)) throw std::invalid_argument("conv2d: bias size mismatch");
  Tensor out({d.o, d.oh, d.ow});
  const std::size_t plane = static_cast<std::size_t>(d.oh) * d.ow;
  if (bias) {
    for (int o = 0; o < d.o; ++o) std::fill_n(out.data.begin() + static_cast<std::ptrdiff_t>(o * plane), plane, (*bias)[o]);
  }
  auto widx = [&](int o, int c, int ky, int kx) {
    return ((static_cast<std::size_t>(o) * d.c + c) * d.k + ky) * d.k + kx;
  };
  if (mostly_zero(x)) {
    for (int c = 0; c < d.c; ++c) {
      for (int iy = 0; iy < d.h; ++iy) {
        for (int ix = 0; ix < d.w; ++ix) {
          const double v = x.at(c, iy, ix);
          if (v == 0.0) continue;
          for (int o = 0; o < d.o; ++o) {
            for (int ky = 0; ky < d.k; ++ky) {
              int oy;
              if (!output_for_tap(d, iy, ky, d.oh, oy)) continue;
              for (int kx = 0; kx < d.k; ++kx) {
                int ox;
                if (!output_for_tap(d, ix, kx, d.ow, ox)) continue;
                out.data[o * plane + static_cast<std::size_t>(oy) * d.ow + ox] += w.data[widx(o, c, ky, kx)] * v;
              }
            }
          }
        }
      }
    }
    return out;
  }
  for (int o = 0; o < d.o; ++o) {
    double* dst = out.data.data() + o * plane;
    for (int oy = 0; oy < d.oh; ++oy) {
      for (int ox = 0; ox < d.ow; ++ox) {
        double acc = dst[static_cast<std::size_t>(oy) * d.ow + ox];
        for (int c = 0; c < d.c; ++c) {
          for (int ky = 0; ky < d.k; ++ky) {
            const int iy = oy * d.stride - d.pad + ky;
            if (iy < 0 || iy >= d.h) continue;
            const double* src = x.data.data() + (static_cast<std::size_t>(c) * d.h + iy) * d.w;
            const double* wrow = w.data.data() + widx(o, c, ky, 0);
            for (int kx = 0; kx < d.k; ++kx) {
              const int ix = ox * d.stride - d.pad + kx;
              if (ix < 0 || ix >= d.w) continue;
              acc += wrow[kx] * src[ix];
            }
          }
        }
        dst[static_cast<std::size_t>(oy) * d.ow + ox] = acc;
      }
    }
  }
  return out;
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const std::vector<double>& g) {
    if (t.requires_grad(a)) {
      auto& ga = t.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i];
    }
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const std::vector<double>& g) {
    if (t.requires_grad(a)) {
      auto& ga = t.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i];
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b.value()[i];
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const std::vector<double>& g) {
    const Tensor& va = a.value();
    const Tensor& vb = b.value();
    if (t.requires_grad(a)) {
      auto& ga = t.grad(a);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * vb[i];
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad(b);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * va[i];
    }
  });
}

Var scale(Var x, Var s) {
  require_scalar(s, "scale");
  const double k = s.value()[0];
  Tensor out = x.value();
  for (double& v : out.data) v *= k;
  return x.tape().record(std::move(out), {x, s}, [x, s](Tape& t, const std::vector<double>& g) {
    const Tensor& vx = x.value();
    if (t.requires_grad(x)) {
      const double k = s.value()[0];
      auto& gx = t.grad(x);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * k;
    }
    if (t.requires_grad(s)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * vx[i];
      t.grad(s)[0] += acc;
    }
  });
}

Var divide(Var x, Var s) {
  require_scalar(s, "divide");
  const double k = s.value()[0];
  Tensor out = x.value();
  for (double& v : out.data) v /= k;
  return x.tape().record(std::move(out), {x, s}, [x, s](Tape& t, const std::vector<double>& g) {
    const Tensor& vx = x.value();
    const double k = s.value()[0];
    if (t.requires_grad(x)) {
      auto& gx = t.grad(x);
      for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] / k;
    }
    if (t.requires_grad(s)) {
      double acc = 0.0;
      for (std::size_t i = 0; i < g.size(); ++i) acc += g[i] * vx[i];
      t.grad(s)[0] -= acc / (k * k);
    }
  });
}

Var add_constant(Var x, double c) {
  Tensor out = x.value();
  for (double& v : out.data) v += c;
  return x.tape().record(std::move(out), {x}, [x](Tape& t, const std::vector<double>& g) {
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

Var multiply_constant(Var x, double c) {
  Tensor out = x.value();
  for (double& v : out.data) v *= c;
  return x.tape().record(std::move(out), {x}, [x, c](Tape& t, const std::vector<double>& g) {
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * c;
  });
}

Var maximum(Var a, Var b) {
  require_same_shape(a, b, "maximum");
  Tensor out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], b.value()[i]);
  return a.tape().record(std::move(out), {a, b}, [a, b](Tape& t, const std::vector<double>& g) {
    const Tensor& va = a.value();
    const Tensor& vb = b.value();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const bool first = va[i] >= vb[i];
      const Var& target = first ? a : b;
      if (t.requires_grad(target)) t.grad(target)[i] += g[i];
    }
  });
}

Var relu(Var x) {
  Tensor out = x.value();
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  return x.tape().record(std::move(out), {x}, [x](Tape& t, const std::vector<double>& g) {
    const Tensor& vx = x.value();
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (vx[i] > 0.0) gx[i] += g[i];
    }
  });
}

Var reshape(Var x, Shape shape) {
  if (element_count(shape) != x.size()) {
    throw std::invalid_argument("reshape: " + shape_string(x.shape()) + " to " + shape_string(shape));
  }
  Tensor out(std::move(shape), x.value().data);
  return x.tape().record(std::move(out), {x}, [x](Tape& t, const std::vector<double>& g) {
    auto& gx = t.grad(x);
    for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i];
  });
}

Var sum(Var x) {
  double acc = 0.0;
  for (double v : x.value().data) acc += v;
  return x.tape().record(Tensor({1}, {acc}), {x}, [x](Tape& t, const std::vector<double>& g) {
    auto& gx = t.grad(x);
    for (double& v : gx) v += g[0];
  });
}

Var spike(Var z, const Surrogate& surrogate, SpikeMode mode) {
  Tensor out = z.value();
  for (double& v : out.data) {
    v = mode == SpikeMode::Hard ? (v > 0.0 ? 1.0 : 0.0) : surrogate.smoothed(v);
  }
  return z.tape().record(std::move(out), {z}, [z, surrogate](Tape& t, const std::vector<double>& g) {
    const Tensor& vz = z.value();
    auto& gz = t.grad(z);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] != 0.0) gz[i] += g[i] * surrogate.grad(vz[i]);
    }
  });
}

Var conv2d(Var x, Var w, Conv2dSpec spec) {
  Tensor out = conv2d_forward(x.value(), w.value(), nullptr, spec);
  return x.tape().record(std::move(out), {x, w}, [x, w, spec](Tape& t, const std::vector<double>& g) {
    const Tensor& vx = x.value();
    const Tensor& vw = w.value();
    const ConvDims d = conv_dims(vx.shape, vw.shape, spec);
    const std::size_t plane = static_cast<std::size_t>(d.oh) * d.ow;
    auto widx = [&](int o, int c, int ky, int kx) {
      return ((static_cast<std::size_t>(o) * d.c + c) * d.k + ky) * d.k + kx;
    };
    if (t.requires_grad(w)) {
      auto& gw = t.grad(w);
      if (mostly_zero(vx)) {
        for (int c = 0; c < d.c; ++c) {
          for (int iy = 0; iy < d.h; ++iy) {
            for (int ix = 0; ix < d.w; ++ix) {
              const double v = vx.at(c, iy, ix);
              if (v == 0.0) continue;
              for (int o = 0; o < d.o; ++o) {
                for (int ky = 0; ky < d.k; ++ky) {
                  int oy;
                  if (!output_for_tap(d, iy, ky, d.oh, oy)) continue;
                  for (int kx = 0; kx < d.k; ++kx) {
                    int ox;
                    if (!output_for_tap(d, ix, kx, d.ow, ox)) continue;
                    gw[widx(o, c, ky, kx)] += g[o * plane + static_cast<std::size_t>(oy) * d.ow + ox] * v;
                  }
                }
              }
            }
          }
        }
      } else {
        for (int o = 0; o < d.o; ++o) {
          for (int c = 0; c < d.c; ++c) {
            for (int ky = 0; ky < d.k; ++ky) {
              for (int kx = 0; kx < d.k; ++kx) {
                double acc = 0.0;
                for (int oy = 0; oy < d.oh; ++oy) {
                  const int iy = oy * d.stride - d.pad + ky;
                  if (iy < 0 || iy >= d.h) continue;
                  const double* grow = g.data() + o * plane + static_cast<std::size_t>(oy) * d.ow;
                  const double* src = vx.data.data() + (static_cast<std::size_t>(c) * d.h + iy) * d.w;
                  for (int ox = 0; ox < d.ow; ++ox) {
                    const int ix = ox * d.stride - d.pad + kx;
                    if (ix < 0 || ix >= d.w) continue;
                    acc += grow[ox] * src[ix];
                  }
                }
                gw[widx(o, c, ky, kx)] += acc;
              }
            }
          }
        }
      }
    }
    if (t.requires_grad(x)) {
      auto& gx = t.grad(x);
      for (int o = 0; o < d.o; ++o) {
        for (int oy = 0; oy < d.oh; ++oy) {
          for (int ox = 0; ox < d.ow; ++ox) {
            const double go = g[o * plane + static_cast<std::size_t>(oy) * d.ow + ox];
            if (go == 0.0) continue;
            for (int c = 0; c < d.c; ++c) {
              for (int ky = 0; ky < d.k; ++ky) {
                const int iy = oy * d.stride - d.pad + ky;
                if (iy < 0 || iy >= d.h) continue;
                for (int kx = 0; kx < d.k; ++kx) {
                  const int ix = ox * d.stride - d.pad + kx;
                  if (ix < 0 || ix >= d.w) continue;
                  gx[(static_cast<std::size_t>(c) * d.h + iy) * d.w + ix] += vw.data[widx(o, c, ky, kx)] * go;
                }
              }
            }
          }
        }
      }
    }
  });
}

Var conv2d(Var x, Var w, Var bias, Conv2dSpec spec) {
  Var y = conv2d(x, w, spec);
  const Shape out_shape = y.shape();
  if (bias.size() != static_cast<std::size_t>(out_shape[0])) throw std::invalid_argument("conv2d: bias size mismatch");
  Tensor out = y.value();
  const std::size_t plane = static_cast<std::size_t>(out_shape[1]) * out_shape[2];
  for (int o = 0; o < out_shape[0]; ++o) {
    for (std::size_t i = 0; i < plane; ++i) out.data[o * plane + i] += bias.value()[o];
  }
  return x.tape().record(std::move(out), {y, bias}, [y, bias, plane](Tape& t, const std::vector<double>& g) {
    if (t.requires_grad(y)) {
      auto& gy = t.grad(y);
      for (std::size_t i = 0; i < g.size(); ++i) gy[i] += g[i];
    }
    if (t.requires_grad(bias)) {
      auto& gb = t.grad(bias);
      for (std::size_t o = 0; o < gb.size(); ++o) {
        double acc = 0.0;
        for (std::size_t i = 0; i < plane; ++i) acc += g[o * plane + i];
        gb[o] += acc;
      }
    }
  });
}

Var linear(Var x, Var w, Var b) {
  const Shape& ws = w.shape();
  if (ws.size() != 2 || static_cast<std::size_t>(ws[1]) != x.size() || b.size() != static_cast<std::size_t>(ws[0])) {
    throw std::invalid_argument("linear: weight " + shape_string(ws) + " does not fit input of " +
                                std::to_string(x.size()) + " and bias of " + std::to_string(b.size()));
  }
  const int out_n = ws[0], in_n = ws[1];
  const Tensor& vx = x.value();
  const Tensor& vw = w.value();
  Tensor out({out_n});
  for (int o = 0; o < out_n; ++o) {
    double acc = b.value()[o];
    const double* row = vw.data.data() + static_cast<std::size_t>(o) * in_n;
    for (int i = 0; i < in_n; ++i) acc += row[i] * vx[i];
    out[o] = acc;
  }
  return x.tape().record(std::move(out), {x, w, b}, [x, w, b, out_n, in_n](Tape& t, const std::vector<double>& g) {
    const Tensor& vx = x.value();
    const Tensor& vw = w.value();
    if (t.requires_grad(w)) {
      auto& gw = t.grad(w);
      for (int o = 0; o < out_n; ++o) {
        if (g[o] == 0.0) continue;
        double* row = gw.data() + static_cast<std::size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) row[i] += g[o] * vx[i];
      }
    }
    if (t.requires_grad(b)) {
      auto& gb = t.grad(b);
      for (int o = 0; o < out_n; ++o) gb[o] += g[o];
    }
    if (t.requires_grad(x)) {
      auto& gx = t.grad(x);
      for (int o = 0; o < out_n; ++o) {
        if (g[o] == 0.0) continue;
        const double* row = vw.data.data() + static_cast<std::size_t>(o) * in_n;
        for (int i = 0; i < in_n; ++i) gx[i] += row[i] * g[o];
      }
    }
  });
}

Var bce_with_logits(Var logits, const Tensor& target, const Tensor& weight) {
  if (logits.size() != target.size() || logits.size() != weight.size()) {
    throw std::invalid_argument("bce_with_logits: logits, target and weight sizes differ");
  }
  const Tensor& z = logits.value();
  double total_w = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (weight[i] == 0.0) continue;
    const double l = std::max(z[i], 0.0) - z[i] * target[i] + std::log1p(std::exp(-std::abs(z[i])));
    acc += weight[i] * l;
    total_w += weight[i];
  }
  const double loss = total_w > 0.0 ? acc / total_w : 0.0;
  return logits.tape().record(Tensor({1}, {loss}), {logits},
                              [logits, target, weight, total_w](Tape& t, const std::vector<double>& g) {
                                if (total_w <= 0.0) return;
                                const Tensor& z = logits.value();
                                auto& gz = t.grad(logits);
                                for (std::size_t i = 0; i < z.size(); ++i) {
                                  if (weight[i] == 0.0) continue;
                                  const double p = 1.0 / (1.0 + std::exp(-z[i]));
                                  gz[i] += g[0] * weight[i] * (p - target[i]) / total_w;
                                }
                              });
}

Var mse(Var prediction, const Tensor& target) {
  if (prediction.size() != target.size()) throw std::invalid_argument("mse: size mismatch");
  const Tensor& p = prediction.value();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += (p[i] - target[i]) * (p[i] - target[i]);
  const double n = static_cast<double>(p.size());
  return prediction.tape().record(Tensor({1}, {acc / n}), {prediction},
                                  [prediction, target, n](Tape& t, const std::vector<double>& g) {
                                    const Tensor& p = prediction.value();
                                    auto& gp = t.grad(prediction);
                                    for (std::size_t i = 0; i < p.size(); ++i) {
                                      gp[i] += g[0] * 2.0 * (p[i] - target[i]) / n;
                                    }
                                  });
}

}  // namespace toffe::neuro
