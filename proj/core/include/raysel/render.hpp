#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "raysel/errors.hpp"
#include "raysel/field.hpp"
#include "raysel/geometry.hpp"
#include "raysel/image.hpp"
#include "raysel/parallel.hpp"
#include "raysel/random.hpp"

namespace raysel {

struct RenderConfig {
  int n_samples = 64;
  bool stratified = false;
  Eigen::Vector3d background{1.0, 1.0, 1.0};
  double t_near = 2.0;
  double t_far = 6.0;
};

template <class T>
struct RenderResult {
  Eigen::Matrix<T, 3, 1> rgb;  // background-composited
  T alpha;                     // accumulated opacity
  T depth;                     // transmittance-weighted expected depth
};

// n strictly increasing depths in [t_near, t_far]: deterministic bin
// midpoints, or one uniform draw per bin when stratified.
inline std::vector<double> sample_along_ray(const Ray& ray, int n,
                                            bool stratified,
                                            std::mt19937_64& rng) {
  if (n < 2) throw InputError("need >= 2 samples per ray");
  std::vector<double> ts(n);
  const double span = ray.t_far - ray.t_near;
  for (int k = 0; k < n; ++k) {
    const double jitter = stratified ? uniform_double(rng) : 0.5;
    ts[k] = ray.t_near + span * (k + jitter) / n;
  }
  return ts;
}

// Discrete quadrature of the transmittance-weighted color integral:
// alpha_k = 1 - exp(-sigma_k * delta_k), T_k = prod_{j<k} (1 - alpha_j),
// with the last delta closing the interval at t_far so alpha stays <= 1.
template <class T>
RenderResult<T> composite(const VecX<T>& sigma, const MatX<T>& rgb,
                          const std::vector<double>& ts, double t_far,
                          const Eigen::Matrix<T, 3, 1>& background) {
  const int n = static_cast<int>(ts.size());
  RenderResult<T> out;
  Eigen::Matrix<T, 3, 1> acc = Eigen::Matrix<T, 3, 1>::Zero();
  T alpha_sum = T(0);
  T depth_sum = T(0);
  T transmittance = T(1);
  for (int k = 0; k < n; ++k) {
    if (!std::isfinite(static_cast<double>(sigma[k])) ||
        !rgb.row(k).allFinite())
      throw NumericError("non-finite field output at sample " +
                         std::to_string(k));
    const double delta = (k + 1 < n ? ts[k + 1] : t_far) - ts[k];
    const T a = T(1) - std::exp(static_cast<T>(-sigma[k] * static_cast<T>(delta)));
    const T weight = transmittance * a;
    acc += weight * rgb.row(k).transpose();
    alpha_sum += weight;
    depth_sum += weight * static_cast<T>(ts[k]);
    transmittance *= T(1) - a;
  }
  out.rgb = acc + (T(1) - alpha_sum) * background;
  out.alpha = alpha_sum;
  out.depth = depth_sum / std::max(alpha_sum, T(1e-8));
  return out;
}

// Gradients of the composited rgb w.r.t. per-sample density and color.
// With s_k = sigma_k * delta_k and g_k = (c_k - bg) . d_rgb:
//   dL/ds_k = g_k * T_k * exp(-s_k) - sum_{j>k} g_j w_j
// accumulated as a right-to-left suffix sum.
template <class T>
void composite_backward(const VecX<T>& sigma, const MatX<T>& rgb,
                        const std::vector<double>& ts, double t_far,
                        const Eigen::Matrix<T, 3, 1>& background,
                        const Eigen::Matrix<T, 3, 1>& d_rgb_pixel,
                        VecX<T>& d_sigma, MatX<T>& d_rgb_samples) {
  const int n = static_cast<int>(ts.size());
  d_sigma.resize(n);
  d_rgb_samples.resize(n, 3);

  std::vector<T> delta(n), weight(n), trans_next(n), gdot(n);
  T transmittance = T(1);
  for (int k = 0; k < n; ++k) {
    delta[k] = static_cast<T>((k + 1 < n ? ts[k + 1] : t_far) - ts[k]);
    const T e = std::exp(-sigma[k] * delta[k]);
    weight[k] = transmittance * (T(1) - e);
    transmittance *= e;
    trans_next[k] = transmittance;  // T_k * exp(-s_k)
    gdot[k] = (rgb.row(k).transpose() - background).dot(d_rgb_pixel);
  }
  T suffix = T(0);
  for (int k = n - 1; k >= 0; --k) {
    d_sigma[k] = delta[k] * (gdot[k] * trans_next[k] - suffix);
    d_rgb_samples.row(k) = weight[k] * d_rgb_pixel.transpose();
    suffix += gdot[k] * weight[k];
  }
}

// Field is any type providing
//   void sample(const std::vector<Vec3>& xs, const std::vector<Vec3>& ds,
//               VecX<T>& sigma, MatX<T>& rgb) const;
template <class T, class Field>
RenderResult<T> render_ray(const Field& field, const Ray& ray,
                           const RenderConfig& cfg, std::mt19937_64& rng) {
  const std::vector<double> ts =
      sample_along_ray(ray, cfg.n_samples, cfg.stratified, rng);
  std::vector<Vec3> xs(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) xs[k] = ray.point_at(ts[k]);
  const std::vector<Vec3> ds(ts.size(), ray.dir);
  VecX<T> sigma;
  MatX<T> rgb;
  field.sample(xs, ds, sigma, rgb);
  return composite<T>(sigma, rgb, ts, ray.t_far,
                      cfg.background.cast<T>().eval());
}

// Full-frame render with deterministic (midpoint) sampling, pixel-parallel.
template <class T, class Field>
Image render_image(const Field& field, const Camera& cam,
                   const RenderConfig& cfg, int threads = 1) {
  Image img(cam.width, cam.height, 3);
  RenderConfig pixel_cfg = cfg;
  pixel_cfg.stratified = false;
  parallel_for(0, cam.width * cam.height, threads, [&](int p) {
    const int x = p % cam.width;
    const int y = p / cam.width;
    std::mt19937_64 rng(0);  // unused: sampling is deterministic
    try {
      const Ray ray = camera_ray(cam, x, y, cfg.t_near, cfg.t_far);
      const RenderResult<T> res = render_ray<T>(field, ray, pixel_cfg, rng);
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(res.rgb[c]);
    } catch (const NumericError& e) {
      throw NumericError("pixel (" + std::to_string(x) + ", " +
                         std::to_string(y) + "): " + e.what());
    }
  });
  return img;
}

}  // namespace raysel
