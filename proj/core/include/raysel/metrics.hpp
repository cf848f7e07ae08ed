#pragma once

#include <optional>
#include <string>

#include "raysel/image.hpp"

namespace raysel {

// 10 * log10(1 / MSE) for images in [0, 1]; +infinity when identical.
double psnr(const Image& a, const Image& b);

// Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), C1 = 0.01^2,
// C2 = 0.03^2, dynamic range 1, averaged over positions where the full
// window fits. RGB images score the mean of the per-channel SSIM.
double ssim(const Image& a, const Image& b);

// Geometric mean of lpips, sqrt(1 - ssim) and 10^(-psnr/10).
double avg_metric(double psnr_db, double ssim_score, double lpips);

struct EvalReport {
  double psnr = 0.0;
  double ssim = 0.0;
  std::optional<double> lpips;  // externally supplied
  std::optional<double> avg;    // present iff lpips is

  std::string to_json() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

EvalReport make_report(double psnr_db, double ssim_score,
                       std::optional<double> lpips = std::nullopt);

}  // namespace raysel
