#include "boltzlab/common.hpp"

#include <algorithm>

namespace boltzlab {

double pairwise_sum(std::span<const double> xs) {
  const std::size_t n = xs.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(xs.first(h)) + pairwise_sum(xs.subspan(h));
}

ChunkedSum::ChunkedSum(std::size_t n_items, std::size_t n_chunks) {
  n_chunks = std::max<std::size_t>(1, std::min(n_chunks, std::max<std::size_t>(1, n_items)));
  bounds_.resize(n_chunks + 1);
  for (std::size_t c = 0; c <= n_chunks; ++c) bounds_[c] = (n_items * c) / n_chunks;
}

double sum_indexed(std::size_t n, const std::function<double(std::size_t)>& f) {
  ChunkedSum cs(n);
  std::vector<double> partials(cs.chunks());
  for (std::size_t c = 0; c < cs.chunks(); ++c) {
    double s = 0;
    for (std::size_t i = cs.begin(c); i < cs.end(c); ++i) s += f(i);
    partials[c] = s;
  }
  return cs.combine(partials);
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

FitResult linear_fit(std::span<const double> x, std::span<const double> y) {
  FitResult r;
  r.n = x.size();
  if (x.size() != y.size() || x.size() < 2) return r;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = double(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
    syy += y[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (std::abs(den) < 1e-300) return r;
  r.slope = (n * sxy - sx * sy) / den;
  r.intercept = (sy - r.slope * sx) / n;
  double ss_tot = syy - sy * sy / n;
  double ss_res = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (r.intercept + r.slope * x[i]);
    ss_res += e * e;
  }
  r.r2 = (ss_tot > 1e-300) ? 1.0 - ss_res / ss_tot : 1.0;
  return r;
}

}  // namespace boltzlab
