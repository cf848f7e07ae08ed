#pragma once

#include <random>
#include <vector>

#include "raysel/image.hpp"

namespace raysel {

// Per-pixel local Shannon entropy in bits, row-major.
struct EntropyMap {
  int width = 0;
  int height = 0;
  std::vector<double> values;
};

// Normalized sampling distribution over pixels, row-major.
struct PixelDistribution {
  std::vector<double> p;
};

// Entropy of the quantized-intensity histogram over a window x window
// neighborhood of each pixel (clamp-to-edge at the borders). Intensities in
// [0, 1] are binned as floor(v * bins) clamped to bins - 1; log base 2.
EntropyMap local_entropy_map(const Image& gray, int window, int bins);

// p_i = (e_i + floor * sum(e) / n) / normalizer; uniform when sum(e) == 0.
// The default floor of 0 is plain normalization.
PixelDistribution to_distribution(const EntropyMap& em, double floor = 0.0);

// Luma conversion (0.299 R + 0.587 G + 0.114 B) feeding the entropy filter.
Image rgb_to_gray(const Image& rgb);

// Walker/Vose alias table for O(1) draws from a discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(const std::vector<double>& weights);
  int draw(std::mt19937_64& rng) const;
  int size() const { return static_cast<int>(prob_.size()); }

 private:
  std::vector<double> prob_;
  std::vector<int> alias_;
};

// Mixed batch: batch/2 indices from the entropy distribution followed by
// batch/2 uniform indices, all with replacement. batch must be even.
std::vector<int> sample_rays(const PixelDistribution& dist, int batch,
                             std::mt19937_64& rng);
std::vector<int> sample_rays(const AliasTable& dist, int num_pixels, int batch,
                             std::mt19937_64& rng);

}  // namespace raysel
