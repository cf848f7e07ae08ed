#include "raysel/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "raysel/errors.hpp"

namespace raysel {

double psnr(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw InputError("psnr: image shape mismatch");
  if (a.data.empty()) throw InputError("psnr: empty images");
  double se = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double d = static_cast<double>(a.data[i]) - b.data[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.data.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kSsimWindow);
  const int r = kSsimWindow / 2;
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double d = i - r;
    k[i] = std::exp(-d * d / (2.0 * kSsimSigma * kSsimSigma));
    sum += k[i];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable Gaussian filter, valid region only (output is
// (w - 10) x (h - 10)).
std::vector<double> gaussian_valid(const std::vector<double>& img, int w,
                                   int h, const std::vector<double>& kernel) {
  const int r = kSsimWindow / 2;
  const int out_w = w - 2 * r;
  std::vector<double> rows(static_cast<std::size_t>(out_w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kSsimWindow; ++i)
        acc += kernel[i] * img[static_cast<std::size_t>(y) * w + x + i];
      rows[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  const int out_h = h - 2 * r;
  std::vector<double> out(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int i = 0; i < kSsimWindow; ++i)
        acc += kernel[i] * rows[static_cast<std::size_t>(y + i) * out_w + x];
      out[static_cast<std::size_t>(y) * out_w + x] = acc;
    }
  return out;
}

double ssim_channel(const std::vector<double>& a, const std::vector<double>& b,
                    int w, int h) {
  const auto kernel = gaussian_kernel();
  std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    aa[i] = a[i] * a[i];
    bb[i] = b[i] * b[i];
    ab[i] = a[i] * b[i];
  }
  const auto mu_a = gaussian_valid(a, w, h, kernel);
  const auto mu_b = gaussian_valid(b, w, h, kernel);
  const auto m_aa = gaussian_valid(aa, w, h, kernel);
  const auto m_bb = gaussian_valid(bb, w, h, kernel);
  const auto m_ab = gaussian_valid(ab, w, h, kernel);

  double total = 0.0;
  for (std::size_t i = 0; i < mu_a.size(); ++i) {
    const double var_a = m_aa[i] - mu_a[i] * mu_a[i];
    const double var_b = m_bb[i] - mu_b[i] * mu_b[i];
    const double cov = m_ab[i] - mu_a[i] * mu_b[i];
    const double num = (2.0 * mu_a[i] * mu_b[i] + kC1) * (2.0 * cov + kC2);
    const double den =
        (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + kC1) * (var_a + var_b + kC2);
    total += num / den;
  }
  return total / static_cast<double>(mu_a.size());
}

}  // namespace

double ssim(const Image& a, const Image& b) {
  if (!a.same_shape(b)) throw InputError("ssim: image shape mismatch");
  if (a.width < kSsimWindow || a.height < kSsimWindow)
    throw InputError("ssim: image smaller than the 11x11 window");
  const std::size_t n = static_cast<std::size_t>(a.width) * a.height;
  std::vector<double> ca(n), cb(n);
  double total = 0.0;
  for (int c = 0; c < a.channels; ++c) {
    for (std::size_t p = 0; p < n; ++p) {
      ca[p] = a.data[p * a.channels + c];
      cb[p] = b.data[p * b.channels + c];
    }
    total += ssim_channel(ca, cb, a.width, a.height);
  }
  return total / a.channels;
}

double avg_metric(double psnr_db, double ssim_score, double lpips) {
  if (ssim_score > 1.0) throw InputError("avg_metric: ssim must be <= 1");
  if (lpips < 0.0) throw InputError("avg_metric: lpips must be >= 0");
  const double product = lpips * std::sqrt(1.0 - ssim_score) *
                         std::pow(10.0, -psnr_db / 10.0);
  return std::cbrt(product);
}

EvalReport make_report(double psnr_db, double ssim_score,
                       std::optional<double> lpips) {
  EvalReport report;
  report.psnr = psnr_db;
  report.ssim = ssim_score;
  if (lpips) {
    report.lpips = *lpips;
    report.avg = avg_metric(psnr_db, ssim_score, *lpips);
  }
  return report;
}

namespace {

std::string num_or_null(std::optional<double> v) {
  if (!v) return "null";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", *v);
  return buf;
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_json() const {
  std::string s = "{\"psnr\": " + num(psnr) + ", \"ssim\": " + num(ssim);
  s += ", \"lpips\": " + num_or_null(lpips);
  s += ", \"avg\": " + num_or_null(avg) + "}";
  return s;
}

std::string EvalReport::csv_header() { return "psnr,ssim,lpips,avg"; }

std::string EvalReport::to_csv_row() const {
  std::string s = num(psnr) + "," + num(ssim) + ",";
  if (lpips) s += num(*lpips);
  s += ",";
  if (avg) s += num(*avg);
  return s;
}

}  // namespace raysel
