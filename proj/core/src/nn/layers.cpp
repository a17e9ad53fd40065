#include "ads/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ads/error.hpp"

namespace ads::nn {

namespace {

void expect_rank(const Shape& in, std::size_t rank, std::string_view layer) {
  if (in.size() != rank) {
    throw Error(ErrorCode::ShapeMismatch,
                std::string(layer) + " expects rank-" + std::to_string(rank) + " samples, got " + shape_string(in));
  }
}

// Checks a batched tensor against the layer's per-sample input shape.
void expect_batch(const Tensor& t, const Layer& layer) {
  if (t.rank() == 0) throw Error(ErrorCode::ShapeMismatch, "empty tensor");
  Shape per_sample(t.shape().begin() + 1, t.shape().end());
  (void)layer.output_shape(per_sample);
}

void init_uniform(Tensor& t, double bound, Rng& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto& v : t.values()) v = dist(rng);
}

// [B, C, L] --------------------------------------------------------------------

class Conv1d final : public Layer {
 public:
  explicit Conv1d(LayerSpec spec)
      : Layer(spec),
        weight_("weight", {spec.out, spec.in, spec.kernel}),
        bias_("bias", {spec.out}) {
    if (spec.in == 0 || spec.out == 0 || spec.kernel == 0 || spec.stride == 0) {
      throw Error(ErrorCode::InvalidArgument, "conv1d needs positive in/out/kernel/stride");
    }
  }

  Shape output_shape(const Shape& in) const override {
    expect_rank(in, 2, "conv1d");
    if (in[0] != spec_.in || in[1] < spec_.kernel) {
      throw Error(ErrorCode::ShapeMismatch, "conv1d input " + shape_string(in));
    }
    return {spec_.out, (in[1] - spec_.kernel) / spec_.stride + 1};
  }

  Tensor infer(const Tensor& in) const override {
    expect_batch(in, *this);
    const std::size_t B = in.dim(0), C = in.dim(1), L = in.dim(2);
    const std::size_t O = spec_.out, K = spec_.kernel, S = spec_.stride;
    const std::size_t Lo = (L - K) / S + 1;
    Tensor out({B, O, Lo});
    const double* w = weight_.value.data();
    const double* bias = bias_.value.data();
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t o = 0; o < O; ++o) {
        double* y = out.data() + (b * O + o) * Lo;
        std::fill(y, y + Lo, bias[o]);
        for (std::size_t c = 0; c < C; ++c) {
          const double* x = in.data() + (b * C + c) * L;
          for (std::size_t k = 0; k < K; ++k) {
            const double wv = w[(o * C + c) * K + k];
            const double* xk = x + k;
            if (S == 1) {
              for (std::size_t t = 0; t < Lo; ++t) y[t] += wv * xk[t];
            } else {
              for (std::size_t t = 0; t < Lo; ++t) y[t] += wv * xk[t * S];
            }
          }
        }
      }
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    const Tensor& in = cached_input_;
    const std::size_t B = in.dim(0), C = in.dim(1), L = in.dim(2);
    const std::size_t O = spec_.out, K = spec_.kernel, S = spec_.stride;
    const std::size_t Lo = g.dim(2);
    Tensor grad_in(in.shape());
    const double* w = weight_.value.data();
    double* gw = weight_.grad.data();
    double* gb = bias_.grad.data();
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t o = 0; o < O; ++o) {
        const double* gy = g.data() + (b * O + o) * Lo;
        double gsum = 0.0;
        for (std::size_t t = 0; t < Lo; ++t) gsum += gy[t];
        gb[o] += gsum;
        for (std::size_t c = 0; c < C; ++c) {
          const double* x = in.data() + (b * C + c) * L;
          double* gx = grad_in.data() + (b * C + c) * L;
          for (std::size_t k = 0; k < K; ++k) {
            const double wv = w[(o * C + c) * K + k];
            double acc = 0.0;
            if (S == 1) {
              const double* xk = x + k;
              double* gxk = gx + k;
              for (std::size_t t = 0; t < Lo; ++t) {
                acc += gy[t] * xk[t];
                gxk[t] += wv * gy[t];
              }
            } else {
              for (std::size_t t = 0; t < Lo; ++t) {
                acc += gy[t] * x[t * S + k];
                gx[t * S + k] += wv * gy[t];
              }
            }
            gw[(o * C + c) * K + k] += acc;
          }
        }
      }
    }
    return grad_in;
  }

  std::vector<ParamTensor*> params() override { return {&weight_, &bias_}; }

  void initialize(Rng& rng) override {
    const double fan_in = static_cast<double>(spec_.in * spec_.kernel);
    init_uniform(weight_.value, std::sqrt(6.0 / fan_in), rng);
    bias_.value.fill(0.0);
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Conv1d>(*this); }

 private:
  ParamTensor weight_;
  ParamTensor bias_;
};

class ConvTranspose1d final : public Layer {
 public:
  explicit ConvTranspose1d(LayerSpec spec)
      : Layer(spec),
        weight_("weight", {spec.in, spec.out, spec.kernel}),
        bias_("bias", {spec.out}) {
    if (spec.in == 0 || spec.out == 0 || spec.kernel == 0 || spec.stride == 0) {
      throw Error(ErrorCode::InvalidArgument, "conv_transpose1d needs positive in/out/kernel/stride");
    }
  }

  Shape output_shape(const Shape& in) const override {
    expect_rank(in, 2, "conv_transpose1d");
    if (in[0] != spec_.in || in[1] == 0) {
      throw Error(ErrorCode::ShapeMismatch, "conv_transpose1d input " + shape_string(in));
    }
    return {spec_.out, (in[1] - 1) * spec_.stride + spec_.kernel};
  }

  Tensor infer(const Tensor& in) const override {
    expect_batch(in, *this);
    const std::size_t B = in.dim(0), C = in.dim(1), L = in.dim(2);
    const std::size_t O = spec_.out, K = spec_.kernel, S = spec_.stride;
    const std::size_t Lo = (L - 1) * S + K;
    Tensor out({B, O, Lo});
    const double* w = weight_.value.data();
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t o = 0; o < O; ++o) {
        double* y = out.data() + (b * O + o) * Lo;
        std::fill(y, y + Lo, bias_.value[o]);
        for (std::size_t c = 0; c < C; ++c) {
          const double* x = in.data() + (b * C + c) * L;
          for (std::size_t k = 0; k < K; ++k) {
            const double wv = w[(c * O + o) * K + k];
            double* yk = y + k;
            if (S == 1) {
              for (std::size_t t = 0; t < L; ++t) yk[t] += wv * x[t];
            } else {
              for (std::size_t t = 0; t < L; ++t) yk[t * S] += wv * x[t];
            }
          }
        }
      }
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    const Tensor& in = cached_input_;
    const std::size_t B = in.dim(0), C = in.dim(1), L = in.dim(2);
    const std::size_t O = spec_.out, K = spec_.kernel, S = spec_.stride;
    const std::size_t Lo = g.dim(2);
    Tensor grad_in(in.shape());
    const double* w = weight_.value.data();
    double* gw = weight_.grad.data();
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t o = 0; o < O; ++o) {
        const double* gy = g.data() + (b * O + o) * Lo;
        double gsum = 0.0;
        for (std::size_t t = 0; t < Lo; ++t) gsum += gy[t];
        bias_.grad[o] += gsum;
        for (std::size_t c = 0; c < C; ++c) {
          const double* x = in.data() + (b * C + c) * L;
          double* gx = grad_in.data() + (b * C + c) * L;
          for (std::size_t k = 0; k < K; ++k) {
            const double wv = w[(c * O + o) * K + k];
            const double* gyk = gy + k;
            double acc = 0.0;
            for (std::size_t t = 0; t < L; ++t) {
              acc += x[t] * gyk[t * S];
              gx[t] += wv * gyk[t * S];
            }
            gw[(c * O + o) * K + k] += acc;
          }
        }
      }
    }
    return grad_in;
  }

  std::vector<ParamTensor*> params() override { return {&weight_, &bias_}; }

  void initialize(Rng& rng) override {
    const double fan_in = static_cast<double>(spec_.in * spec_.kernel);
    init_uniform(weight_.value, std::sqrt(6.0 / fan_in), rng);
    bias_.value.fill(0.0);
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<ConvTranspose1d>(*this); }

 private:
  ParamTensor weight_;
  ParamTensor bias_;
};

class MaxPool1d final : public Layer {
 public:
  explicit MaxPool1d(LayerSpec spec) : Layer(spec) {
    if (spec.factor == 0) throw Error(ErrorCode::InvalidArgument, "maxpool factor must be positive");
  }

  Shape output_shape(const Shape& in) const override {
    expect_rank(in, 2, "maxpool1d");
    if (in[1] < spec_.factor) throw Error(ErrorCode::ShapeMismatch, "maxpool1d input too short");
    return {in[0], in[1] / spec_.factor};
  }

  Tensor infer(const Tensor& in) const override {
    expect_batch(in, *this);
    const std::size_t rows = in.dim(0) * in.dim(1), L = in.dim(2), F = spec_.factor, Lo = L / F;
    Tensor out({in.dim(0), in.dim(1), Lo});
    for (std::size_t r = 0; r < rows; ++r) {
      const double* x = in.data() + r * L;
      double* y = out.data() + r * Lo;
      for (std::size_t t = 0; t < Lo; ++t) y[t] = *std::max_element(x + t * F, x + (t + 1) * F);
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    const Tensor& in = cached_input_;
    const std::size_t rows = in.dim(0) * in.dim(1), L = in.dim(2), F = spec_.factor, Lo = L / F;
    Tensor grad_in(in.shape());
    for (std::size_t r = 0; r < rows; ++r) {
      const double* x = in.data() + r * L;
      for (std::size_t t = 0; t < Lo; ++t) {
        const auto arg = static_cast<std::size_t>(std::max_element(x + t * F, x + (t + 1) * F) - x);
        grad_in[r * L + arg] += g[r * Lo + t];
      }
    }
    return grad_in;
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<MaxPool1d>(*this); }
};

class Upsample1d final : public Layer {
 public:
  explicit Upsample1d(LayerSpec spec) : Layer(spec) {
    if (spec.factor == 0) throw Error(ErrorCode::InvalidArgument, "upsample factor must be positive");
  }

  Shape output_shape(const Shape& in) const override {
    expect_rank(in, 2, "upsample1d");
    return {in[0], in[1] * spec_.factor};
  }

  Tensor infer(const Tensor& in) const override {
    expect_batch(in, *this);
    const std::size_t rows = in.dim(0) * in.dim(1), L = in.dim(2), F = spec_.factor;
    Tensor out({in.dim(0), in.dim(1), L * F});
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t t = 0; t < L * F; ++t) out[r * L * F + t] = in[r * L + t / F];
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    const Tensor& in = cached_input_;
    const std::size_t rows = in.dim(0) * in.dim(1), L = in.dim(2), F = spec_.factor;
    Tensor grad_in(in.shape());
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t t = 0; t < L * F; ++t) grad_in[r * L + t / F] += g[r * L * F + t];
    }
    return grad_in;
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Upsample1d>(*this); }
};

class GlobalAvgPool final : public Layer {
 public:
  explicit GlobalAvgPool(LayerSpec spec) : Layer(spec) {}

  Shape output_shape(const Shape& in) const override {
    expect_rank(in, 2, "global_avg_pool");
    if (in[1] == 0) throw Error(ErrorCode::ShapeMismatch, "global_avg_pool over empty length");
    return {in[0]};
  }

  Tensor infer(const Tensor& in) const override {
    expect_batch(in, *this);
    const std::size_t rows = in.dim(0) * in.dim(1), L = in.dim(2);
    Tensor out({in.dim(0), in.dim(1)});
    for (std::size_t r = 0; r < rows; ++r) {
      const double* x = in.data() + r * L;
      out[r] = std::accumulate(x, x + L, 0.0) / static_cast<double>(L);
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    const Tensor& in = cached_input_;
    const std::size_t rows = in.dim(0) * in.dim(1), L = in.dim(2);
    Tensor grad_in(in.shape());
    for (std::size_t r = 0; r < rows; ++r) {
      const double v = g[r] / static_cast<double>(L);
      std::fill(grad_in.data() + r * L, grad_in.data() + (r + 1) * L, v);
    }
    return grad_in;
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<GlobalAvgPool>(*this); }
};

// [B, F] with F the flattened per-sample size --------------------------------

class Dense final : public Layer {
 public:
  explicit Dense(LayerSpec spec)
      : Layer(spec), weight_("weight", {spec.out, spec.in}), bias_("bias", {spec.out}) {
    if (spec.in == 0 || spec.out == 0) throw Error(ErrorCode::InvalidArgument, "dense needs positive in/out");
  }

  Shape output_shape(const Shape& in) const override {
    if (shape_size(in) != spec_.in) {
      throw Error(ErrorCode::ShapeMismatch,
                  "dense expects " + std::to_string(spec_.in) + " features, got " + shape_string(in));
    }
    return {spec_.out};
  }

  Tensor infer(const Tensor& in) const override {
    expect_batch(in, *this);
    const std::size_t B = in.batch(), F = spec_.in, O = spec_.out;
    Tensor out({B, O});
    const double* w = weight_.value.data();
    for (std::size_t b = 0; b < B; ++b) {
      const double* x = in.data() + b * F;
      for (std::size_t o = 0; o < O; ++o) {
        const double* wr = w + o * F;
        double acc = bias_.value[o];
        for (std::size_t f = 0; f < F; ++f) acc += wr[f] * x[f];
        out[b * O + o] = acc;
      }
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    const Tensor& in = cached_input_;
    const std::size_t B = in.batch(), F = spec_.in, O = spec_.out;
    Tensor grad_in(in.shape());
    const double* w = weight_.value.data();
    double* gw = weight_.grad.data();
    for (std::size_t b = 0; b < B; ++b) {
      const double* x = in.data() + b * F;
      double* gx = grad_in.data() + b * F;
      for (std::size_t o = 0; o < O; ++o) {
        const double go = g[b * O + o];
        bias_.grad[o] += go;
        const double* wr = w + o * F;
        double* gwr = gw + o * F;
        for (std::size_t f = 0; f < F; ++f) {
          gwr[f] += go * x[f];
          gx[f] += go * wr[f];
        }
      }
    }
    return grad_in;
  }

  std::vector<ParamTensor*> params() override { return {&weight_, &bias_}; }

  void initialize(Rng& rng) override {
    init_uniform(weight_.value, std::sqrt(6.0 / static_cast<double>(spec_.in)), rng);
    bias_.value.fill(0.0);
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Dense>(*this); }

 private:
  ParamTensor weight_;
  ParamTensor bias_;
};

class ReLU final : public Layer {
 public:
  explicit ReLU(LayerSpec spec) : Layer(spec) {}

  Shape output_shape(const Shape& in) const override { return in; }

  Tensor infer(const Tensor& in) const override {
    Tensor out = in;
    for (auto& v : out.values()) v = v > 0.0 ? v : 0.0;
    return out;
  }

  Tensor backward(const Tensor& g) override {
    Tensor grad_in = g;
    for (std::size_t i = 0; i < grad_in.size(); ++i) {
      if (!(cached_input_[i] > 0.0)) grad_in[i] = 0.0;
    }
    return grad_in;
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<ReLU>(*this); }
};

class Reshape final : public Layer {
 public:
  explicit Reshape(LayerSpec spec) : Layer(spec) {}

  Shape output_shape(const Shape& in) const override {
    if (shape_size(in) != spec_.channels * spec_.length) {
      throw Error(ErrorCode::ShapeMismatch, "reshape of " + shape_string(in));
    }
    return {spec_.channels, spec_.length};
  }

  Tensor infer(const Tensor& in) const override {
    expect_batch(in, *this);
    return in.reshaped({in.batch(), spec_.channels, spec_.length});
  }

  Tensor backward(const Tensor& g) override { return g.reshaped(cached_input_.shape()); }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<Reshape>(*this); }
};

// Row-wise x / |x|. A zero row stays zero.
class L2Normalize final : public Layer {
 public:
  explicit L2Normalize(LayerSpec spec) : Layer(spec) {}

  Shape output_shape(const Shape& in) const override { return in; }

  Tensor infer(const Tensor& in) const override {
    Tensor out = in;
    for (std::size_t b = 0; b < out.batch(); ++b) {
      auto r = out.row(b);
      const double norm = row_norm(r);
      if (norm > 0.0) {
        for (auto& v : r) v /= norm;
      }
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    Tensor grad_in(cached_input_.shape());
    for (std::size_t b = 0; b < g.batch(); ++b) {
      auto x = cached_input_.row(b);
      auto gy = g.row(b);
      auto gx = grad_in.row(b);
      const double norm = row_norm(x);
      if (!(norm > 0.0)) continue;
      double dot = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) dot += x[i] * gy[i];
      for (std::size_t i = 0; i < x.size(); ++i) {
        gx[i] = (gy[i] - x[i] * dot / (norm * norm)) / norm;
      }
    }
    return grad_in;
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<L2Normalize>(*this); }

 private:
  static double row_norm(std::span<const double> r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return std::sqrt(s);
  }
};

// Keeps the top ceil(sparsity * n) activations of each sample (ties resolved
// toward the lower index) and zeroes the rest.
class WinnerTakeAll final : public Layer {
 public:
  explicit WinnerTakeAll(LayerSpec spec) : Layer(spec) {
    if (!(spec.sparsity > 0.0 && spec.sparsity <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "WTA sparsity must lie in (0, 1]");
    }
  }

  Shape output_shape(const Shape& in) const override { return in; }

  Tensor infer(const Tensor& in) const override {
    Tensor out(in.shape());
    for (std::size_t b = 0; b < in.batch(); ++b) {
      auto x = in.row(b);
      auto y = out.row(b);
      for (auto i : winners(x)) y[i] = x[i];
    }
    return out;
  }

  Tensor backward(const Tensor& g) override {
    Tensor grad_in(g.shape());
    for (std::size_t b = 0; b < g.batch(); ++b) {
      auto gy = g.row(b);
      auto gx = grad_in.row(b);
      for (auto i : winners(cached_input_.row(b))) gx[i] = gy[i];
    }
    return grad_in;
  }

  std::unique_ptr<Layer> clone() const override { return std::make_unique<WinnerTakeAll>(*this); }

 private:
  std::vector<std::size_t> winners(std::span<const double> x) const {
    const std::size_t keep = wta_winners(x.size(), spec_.sparsity);
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (keep >= x.size()) return idx;
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                      [&](std::size_t a, std::size_t b) { return x[a] > x[b] || (x[a] == x[b] && a < b); });
    idx.resize(keep);
    return idx;
  }
};

}  // namespace

std::size_t wta_winners(std::size_t n, double sparsity) {
  const auto k = static_cast<std::size_t>(std::ceil(sparsity * static_cast<double>(n) - 1e-9));
  return std::clamp<std::size_t>(k, 1, n);
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Conv1d: return "conv1d";
    case LayerKind::ConvTranspose1d: return "conv_transpose1d";
    case LayerKind::Dense: return "dense";
    case LayerKind::ReLU: return "relu";
    case LayerKind::MaxPool1d: return "maxpool1d";
    case LayerKind::Upsample1d: return "upsample1d";
    case LayerKind::GlobalAvgPool: return "global_avg_pool";
    case LayerKind::Reshape: return "reshape";
    case LayerKind::L2Normalize: return "l2_normalize";
    case LayerKind::WinnerTakeAll: return "winner_take_all";
  }
  return "?";
}

LayerKind parse_layer_kind(std::string_view name) {
  for (auto kind : {LayerKind::Conv1d, LayerKind::ConvTranspose1d, LayerKind::Dense, LayerKind::ReLU,
                    LayerKind::MaxPool1d, LayerKind::Upsample1d, LayerKind::GlobalAvgPool, LayerKind::Reshape,
                    LayerKind::L2Normalize, LayerKind::WinnerTakeAll}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown layer kind '" + std::string(name) + "'");
}

LayerSpec conv1d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride) {
  LayerSpec s;
  s.kind = LayerKind::Conv1d;
  s.in = in;
  s.out = out;
  s.kernel = kernel;
  s.stride = stride;
  return s;
}

LayerSpec conv_transpose1d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride) {
  auto s = conv1d(in, out, kernel, stride);
  s.kind = LayerKind::ConvTranspose1d;
  return s;
}

LayerSpec dense(std::size_t in, std::size_t out) {
  LayerSpec s;
  s.kind = LayerKind::Dense;
  s.in = in;
  s.out = out;
  return s;
}

LayerSpec relu() { return LayerSpec{.kind = LayerKind::ReLU}; }

LayerSpec maxpool1d(std::size_t factor) { return LayerSpec{.kind = LayerKind::MaxPool1d, .factor = factor}; }

LayerSpec upsample1d(std::size_t factor) { return LayerSpec{.kind = LayerKind::Upsample1d, .factor = factor}; }

LayerSpec global_avg_pool() { return LayerSpec{.kind = LayerKind::GlobalAvgPool}; }

LayerSpec reshape(std::size_t channels, std::size_t length) {
  return LayerSpec{.kind = LayerKind::Reshape, .channels = channels, .length = length};
}

LayerSpec l2_normalize() { return LayerSpec{.kind = LayerKind::L2Normalize}; }

LayerSpec winner_take_all(double sparsity) {
  return LayerSpec{.kind = LayerKind::WinnerTakeAll, .sparsity = sparsity};
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::Conv1d: return std::make_unique<Conv1d>(spec);
    case LayerKind::ConvTranspose1d: return std::make_unique<ConvTranspose1d>(spec);
    case LayerKind::Dense: return std::make_unique<Dense>(spec);
    case LayerKind::ReLU: return std::make_unique<ReLU>(spec);
    case LayerKind::MaxPool1d: return std::make_unique<MaxPool1d>(spec);
    case LayerKind::Upsample1d: return std::make_unique<Upsample1d>(spec);
    case LayerKind::GlobalAvgPool: return std::make_unique<GlobalAvgPool>(spec);
    case LayerKind::Reshape: return std::make_unique<Reshape>(spec);
    case LayerKind::L2Normalize: return std::make_unique<L2Normalize>(spec);
    case LayerKind::WinnerTakeAll: return std::make_unique<WinnerTakeAll>(spec);
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled layer kind");
}

}  // namespace ads::nn
