#include "raysel/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "raysel/errors.hpp"
#include "raysel/random.hpp"

namespace raysel {

namespace {

inline int quantize(float v, int bins) {
  const int q = static_cast<int>(v * bins);
  return std::clamp(q, 0, bins - 1);
}

// Entropy of an integer histogram with `total` samples, bins scanned in
// index order so the summation matches a direct per-pixel histogram.
double histogram_entropy(const std::vector<int>& hist, int total) {
  double e = 0.0;
  const double inv_total = 1.0 / total;
  for (int count : hist) {
    if (count == 0) continue;
    const double h = count * inv_total;
    e -= h * std::log2(h);
  }
  return e;
}

}  // namespace

EntropyMap local_entropy_map(const Image& gray, int window, int bins) {
  if (gray.channels != 1) throw InputError("entropy input must be grayscale");
  if (gray.width < 1 || gray.height < 1) throw InputError("empty image");
  if (window < 3 || window % 2 == 0)
    throw InputError("entropy window must be odd and >= 3");
  if (bins < 2) throw InputError("entropy needs >= 2 histogram bins");

  const int w = gray.width;
  const int h = gray.height;
  const int r = window / 2;
  const int area = window * window;
  const auto clamp_x = [&](int x) { return std::clamp(x, 0, w - 1); };
  const auto clamp_y = [&](int y) { return std::clamp(y, 0, h - 1); };

  std::vector<int> quantized(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      quantized[static_cast<std::size_t>(y) * w + x] =
          quantize(gray.at(x, y, 0), bins);
  const auto q = [&](int x, int y) {
    return quantized[static_cast<std::size_t>(clamp_y(y)) * w + clamp_x(x)];
  };

  EntropyMap em;
  em.width = w;
  em.height = h;
  em.values.resize(static_cast<std::size_t>(w) * h);

  // Per row, build the histogram of the leftmost window once and slide it
  // across the row: clamp-to-edge means moving right drops the multiset
  // slot clamp(x - r) and gains clamp(x + 1 + r).
  std::vector<int> hist(bins);
  for (int y = 0; y < h; ++y) {
    std::fill(hist.begin(), hist.end(), 0);
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) ++hist[q(dx, y + dy)];
    em.values[static_cast<std::size_t>(y) * w] = histogram_entropy(hist, area);
    for (int x = 1; x < w; ++x) {
      for (int dy = -r; dy <= r; ++dy) {
        --hist[q(x - 1 - r, y + dy)];
        ++hist[q(x + r, y + dy)];
      }
      em.values[static_cast<std::size_t>(y) * w + x] =
          histogram_entropy(hist, area);
    }
  }
  return em;
}

PixelDistribution to_distribution(const EntropyMap& em, double floor) {
  const std::size_t n = em.values.size();
  if (n == 0) throw InputError("empty entropy map");
  double total = 0.0;
  for (double e : em.values) total += e;

  PixelDistribution dist;
  dist.p.resize(n);
  if (total <= 0.0) {
    std::fill(dist.p.begin(), dist.p.end(), 1.0 / static_cast<double>(n));
    return dist;
  }
  const double eps = floor * total / static_cast<double>(n);
  const double norm = 1.0 / (total + eps * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) dist.p[i] = (em.values[i] + eps) * norm;
  return dist;
}

Image rgb_to_gray(const Image& rgb) {
  if (rgb.channels == 1) return rgb;
  if (rgb.channels != 3) throw InputError("rgb_to_gray expects 3 channels");
  Image gray(rgb.width, rgb.height, 1);
  for (int y = 0; y < rgb.height; ++y)
    for (int x = 0; x < rgb.width; ++x)
      gray.at(x, y, 0) = 0.299f * rgb.at(x, y, 0) + 0.587f * rgb.at(x, y, 1) +
                         0.114f * rgb.at(x, y, 2);
  return gray;
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const int n = static_cast<int>(weights.size());
  if (n == 0) throw InputError("alias table needs >= 1 weight");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw InputError("alias table weights must be non-negative");
    total += w;
  }
  if (total <= 0.0) throw InputError("alias table weights sum to zero");

  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  for (int i = 0; i < n; ++i) scaled[i] = weights[i] * n / total;

  std::deque<int> small, large;
  for (int i = 0; i < n; ++i)
    (scaled[i] < 1.0 ? small : large).push_back(i);
  while (!small.empty() && !large.empty()) {
    const int s = small.front();
    const int l = large.front();
    small.pop_front();
    large.pop_front();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    (scaled[l] < 1.0 ? small : large).push_back(l);
  }
  for (int i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (int i : small) {  // residue from rounding
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

int AliasTable::draw(std::mt19937_64& rng) const {
  const int n = static_cast<int>(prob_.size());
  const int slot = static_cast<int>(uniform_index(rng, n));
  return uniform_double(rng) < prob_[slot] ? slot : alias_[slot];
}

std::vector<int> sample_rays(const AliasTable& dist, int num_pixels, int batch,
                             std::mt19937_64& rng) {
  if (batch < 2 || batch % 2 != 0)
    throw InputError("batch size must be even and >= 2");
  std::vector<int> indices;
  indices.reserve(batch);
  for (int i = 0; i < batch / 2; ++i) indices.push_back(dist.draw(rng));
  for (int i = 0; i < batch / 2; ++i)
    indices.push_back(static_cast<int>(uniform_index(rng, num_pixels)));
  return indices;
}

std::vector<int> sample_rays(const PixelDistribution& dist, int batch,
                             std::mt19937_64& rng) {
  const AliasTable table(dist.p);
  return sample_rays(table, static_cast<int>(dist.p.size()), batch, rng);
}

}  // namespace raysel
