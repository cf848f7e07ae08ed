#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "raysel/errors.hpp"
#include "raysel/geometry.hpp"
#include "raysel/random.hpp"

namespace raysel {

template <class T>
using MatX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using VecX = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Radiance field architecture. Defaults: 4 x 128 trunk, encoding orders
// 10 (position) and 4 (direction).
struct FieldConfig {
  int l_pos = 10;
  int l_dir = 4;
  int trunk_layers = 4;
  int trunk_width = 128;
  int head_width = 64;
};

inline int encoding_dim(int order) { return 3 + 6 * order; }

// v followed by (sin(2^k pi v), cos(2^k pi v)) for k = 0..order-1,
// componentwise.
template <class T>
void positional_encoding(const Vec3& v, int order, T* out) {
  out[0] = static_cast<T>(v.x());
  out[1] = static_cast<T>(v.y());
  out[2] = static_cast<T>(v.z());
  double freq = M_PI;
  int at = 3;
  for (int k = 0; k < order; ++k, freq *= 2.0) {
    for (int c = 0; c < 3; ++c) out[at + c] = static_cast<T>(std::sin(freq * v[c]));
    for (int c = 0; c < 3; ++c) out[at + 3 + c] = static_cast<T>(std::cos(freq * v[c]));
    at += 6;
  }
}

template <class T>
VecX<T> positional_encoding(const Vec3& v, int order) {
  VecX<T> enc(encoding_dim(order));
  positional_encoding(v, order, enc.data());
  return enc;
}

template <class T>
MatX<T> encode_batch(const std::vector<Vec3>& vs, int order) {
  MatX<T> enc(static_cast<Eigen::Index>(vs.size()), encoding_dim(order));
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (!vs[i].allFinite()) throw InputError("non-finite field input");
    positional_encoding(vs[i], order, enc.row(static_cast<Eigen::Index>(i)).data());
  }
  return enc;
}

template <class T>
struct FieldOutput {
  T sigma;                     // density, >= 0 (softplus)
  Eigen::Matrix<T, 3, 1> rgb;  // color in [0,1]^3 (sigmoid)
};

// Weights and biases in declared layer order; also the shape used for
// gradients and optimizer moments.
template <class T>
struct ParamSet {
  std::vector<MatX<T>> w;  // each out x in
  std::vector<VecX<T>> b;  // each out

  void set_zero() {
    for (auto& m : w) m.setZero();
    for (auto& v : b) v.setZero();
  }
};

namespace detail {

template <class T>
inline T softplus(T x) {
  return x > T(20) ? x : std::log1p(std::exp(x));
}

template <class T>
inline T logistic(T x) {
  if (x >= T(0)) return T(1) / (T(1) + std::exp(-x));
  const T e = std::exp(x);
  return e / (T(1) + e);
}

}  // namespace detail

// The radiance field MLP. Trunk layers (ReLU) read the encoded position and
// emit a pre-activation density plus a feature vector; the head (one ReLU
// layer, sigmoid output) reads (feature, encoded direction) and emits rgb.
//
// Layer order, fixed for serialization and optimizer state:
//   trunk[0..trunk_layers-1], bottleneck, head_hidden, head_out.
template <class T>
class Mlp {
 public:
  using Scalar = T;

  Mlp() = default;

  explicit Mlp(const FieldConfig& cfg) : cfg_(cfg) {
    if (cfg.l_pos < 0 || cfg.l_dir < 0)
      throw InputError("encoding orders must be >= 0");
    if (cfg.trunk_layers < 1 || cfg.trunk_width < 1 || cfg.head_width < 1)
      throw InputError("field architecture sizes must be >= 1");
    const int in_pos = encoding_dim(cfg.l_pos);
    const int in_dir = encoding_dim(cfg.l_dir);
    auto add = [&](int out, int in) {
      params_.w.emplace_back(MatX<T>::Zero(out, in));
      params_.b.emplace_back(VecX<T>::Zero(out));
    };
    add(cfg.trunk_width, in_pos);
    for (int l = 1; l < cfg.trunk_layers; ++l)
      add(cfg.trunk_width, cfg.trunk_width);
    add(1 + cfg.trunk_width, cfg.trunk_width);        // bottleneck
    add(cfg.head_width, cfg.trunk_width + in_dir);    // head hidden
    add(3, cfg.head_width);                           // head out
  }

  // He-style uniform fan-in initialization from a dedicated generator.
  // Weights are drawn in declared order (row-major within each matrix) in
  // double and narrowed, so float and double fields share initial values.
  static Mlp seeded(const FieldConfig& cfg, std::uint64_t seed) {
    Mlp mlp(cfg);
    std::mt19937_64 rng(seed);
    for (auto& w : mlp.params_.w) {
      const double limit = std::sqrt(6.0 / static_cast<double>(w.cols()));
      for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j)
          w(i, j) = static_cast<T>((2.0 * uniform_double(rng) - 1.0) * limit);
    }
    return mlp;
  }

  const FieldConfig& config() const { return cfg_; }
  ParamSet<T>& params() { return params_; }
  const ParamSet<T>& params() const { return params_; }

  ParamSet<T> zero_grads() const {
    ParamSet<T> g;
    for (const auto& w : params_.w) g.w.emplace_back(MatX<T>::Zero(w.rows(), w.cols()));
    for (const auto& b : params_.b) g.b.emplace_back(VecX<T>::Zero(b.size()));
    return g;
  }

  std::size_t param_count() const {
    std::size_t n = 0;
    for (const auto& w : params_.w) n += static_cast<std::size_t>(w.size());
    for (const auto& b : params_.b) n += static_cast<std::size_t>(b.size());
    return n;
  }

  struct Cache {
    MatX<T> enc_x, enc_d;
    std::vector<MatX<T>> trunk_act;  // post-ReLU
    MatX<T> bottleneck;              // [sigma_raw | feature], linear
    MatX<T> head_in;                 // [feature | enc_d]
    MatX<T> head_act;                // post-ReLU
    MatX<T> rgb;                     // post-sigmoid
  };

  // Batched forward on encoded inputs. sigma is softplus-activated, rgb
  // sigmoid-activated. Pass a cache to enable backward().
  void forward(const MatX<T>& enc_x, const MatX<T>& enc_d, VecX<T>& sigma,
               MatX<T>& rgb, Cache* cache = nullptr) const {
    const Eigen::Index batch = enc_x.rows();
    if (enc_d.rows() != batch) throw InputError("field batch shape mismatch");
    if (enc_x.cols() != encoding_dim(cfg_.l_pos) ||
        enc_d.cols() != encoding_dim(cfg_.l_dir))
      throw InputError("field encoding width mismatch");

    Cache local;
    Cache& c = cache ? *cache : local;
    c.trunk_act.resize(cfg_.trunk_layers);

    const MatX<T>* in = &enc_x;
    for (int l = 0; l < cfg_.trunk_layers; ++l) {
      c.trunk_act[l].noalias() = *in * params_.w[l].transpose();
      c.trunk_act[l].rowwise() += params_.b[l].transpose();
      c.trunk_act[l] = c.trunk_act[l].cwiseMax(T(0));
      in = &c.trunk_act[l];
    }

    const int bn = cfg_.trunk_layers;
    c.bottleneck.noalias() = *in * params_.w[bn].transpose();
    c.bottleneck.rowwise() += params_.b[bn].transpose();

    c.head_in.resize(batch, cfg_.trunk_width + encoding_dim(cfg_.l_dir));
    c.head_in.leftCols(cfg_.trunk_width) = c.bottleneck.rightCols(cfg_.trunk_width);
    c.head_in.rightCols(encoding_dim(cfg_.l_dir)) = enc_d;

    c.head_act.noalias() = c.head_in * params_.w[bn + 1].transpose();
    c.head_act.rowwise() += params_.b[bn + 1].transpose();
    c.head_act = c.head_act.cwiseMax(T(0));

    c.rgb.noalias() = c.head_act * params_.w[bn + 2].transpose();
    c.rgb.rowwise() += params_.b[bn + 2].transpose();
    c.rgb = c.rgb.unaryExpr([](T x) { return detail::logistic(x); });

    sigma = c.bottleneck.col(0).unaryExpr([](T x) { return detail::softplus(x); });
    rgb = c.rgb;
    if (cache) {
      cache->enc_x = enc_x;
      cache->enc_d = enc_d;
    }
  }

  // Reverse-mode gradients of the forward pass. d_sigma and d_rgb are the
  // upstream gradients w.r.t. the activated outputs; parameter gradients are
  // accumulated into g. Batch reduction happens inside fixed-order matrix
  // products, so results do not depend on how callers partition work.
  void backward(const Cache& c, const VecX<T>& d_sigma, const MatX<T>& d_rgb,
                ParamSet<T>& g) const {
    const Eigen::Index batch = c.enc_x.rows();
    if (d_sigma.size() != batch || d_rgb.rows() != batch)
      throw InputError("field backward shape mismatch");
    const int bn = cfg_.trunk_layers;

    // sigmoid' = y (1 - y); softplus' = logistic(raw).
    MatX<T> d_rgb_raw =
        d_rgb.cwiseProduct(c.rgb.cwiseProduct((MatX<T>::Ones(batch, 3) - c.rgb)));
    VecX<T> d_sigma_raw =
        d_sigma.cwiseProduct(c.bottleneck.col(0).unaryExpr(
            [](T x) { return detail::logistic(x); }));

    g.w[bn + 2].noalias() += d_rgb_raw.transpose() * c.head_act;
    g.b[bn + 2].noalias() += d_rgb_raw.colwise().sum().transpose();
    MatX<T> d_head_act = d_rgb_raw * params_.w[bn + 2];

    MatX<T> d_head_pre =
        d_head_act.cwiseProduct((c.head_act.array() > T(0)).template cast<T>().matrix());
    g.w[bn + 1].noalias() += d_head_pre.transpose() * c.head_in;
    g.b[bn + 1].noalias() += d_head_pre.colwise().sum().transpose();
    MatX<T> d_head_in = d_head_pre * params_.w[bn + 1];

    MatX<T> d_bottleneck(batch, 1 + cfg_.trunk_width);
    d_bottleneck.col(0) = d_sigma_raw;
    d_bottleneck.rightCols(cfg_.trunk_width) = d_head_in.leftCols(cfg_.trunk_width);

    const MatX<T>& trunk_top = c.trunk_act[cfg_.trunk_layers - 1];
    g.w[bn].noalias() += d_bottleneck.transpose() * trunk_top;
    g.b[bn].noalias() += d_bottleneck.colwise().sum().transpose();
    MatX<T> d_act = d_bottleneck * params_.w[bn];

    for (int l = cfg_.trunk_layers - 1; l >= 0; --l) {
      MatX<T> d_pre =
          d_act.cwiseProduct((c.trunk_act[l].array() > T(0)).template cast<T>().matrix());
      const MatX<T>& input = l == 0 ? c.enc_x : c.trunk_act[l - 1];
      g.w[l].noalias() += d_pre.transpose() * input;
      g.b[l].noalias() += d_pre.colwise().sum().transpose();
      if (l > 0) d_act = d_pre * params_.w[l];
    }
  }

  // Renderer-facing evaluation: encode raw points/directions and run the
  // forward pass.
  void sample(const std::vector<Vec3>& xs, const std::vector<Vec3>& ds,
              VecX<T>& sigma, MatX<T>& rgb) const {
    const MatX<T> enc_x = encode_batch<T>(xs, cfg_.l_pos);
    const MatX<T> enc_d = encode_batch<T>(ds, cfg_.l_dir);
    forward(enc_x, enc_d, sigma, rgb);
  }

 private:
  FieldConfig cfg_;
  ParamSet<T> params_;
};

// Single-point evaluation.
template <class T>
FieldOutput<T> field_eval(const Mlp<T>& mlp, const Vec3& x, const Vec3& d) {
  if (!x.allFinite() || !d.allFinite())
    throw InputError("non-finite field input");
  VecX<T> sigma;
  MatX<T> rgb;
  mlp.sample({x}, {d}, sigma, rgb);
  FieldOutput<T> out;
  out.sigma = sigma[0];
  out.rgb = rgb.row(0).transpose();
  return out;
}

}  // namespace raysel
