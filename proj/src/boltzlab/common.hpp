#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boltzlab {

using cplx = std::complex<double>;

struct Vec3 {
  double x = 0, y = 0, z = 0;

  double& operator[](int i) { return (&x)[i]; }
  double operator[](int i) const { return (&x)[i]; }

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double a) const { return {a * x, a * y, a * z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
};

inline Vec3 operator*(double a, const Vec3& v) { return v * a; }
inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm2(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm2(v)); }

// <v> = (1+|v|^2)^{1/2}
inline double bracket(const Vec3& v) { return std::sqrt(1.0 + norm2(v)); }
inline double bracket1(double v) { return std::sqrt(1.0 + v * v); }

struct Idx3 {
  int i = 0, j = 0, k = 0;
  bool operator==(const Idx3&) const = default;
};

// Fixed-chunk pairwise summation. The chunk decomposition is independent of
// thread count, so reductions replay bit-for-bit.
double pairwise_sum(std::span<const double> xs);

class ChunkedSum {
 public:
  explicit ChunkedSum(std::size_t n_items, std::size_t n_chunks = 256);
  std::size_t chunks() const { return bounds_.size() - 1; }
  std::size_t begin(std::size_t c) const { return bounds_[c]; }
  std::size_t end(std::size_t c) const { return bounds_[c + 1]; }
  // Combine per-chunk partials in fixed order.
  double combine(std::span<const double> partials) const { return pairwise_sum(partials); }

 private:
  std::vector<std::size_t> bounds_;
};

// Sum f(i) for i in [0,n) with deterministic chunked accumulation.
double sum_indexed(std::size_t n, const std::function<double(std::size_t)>& f);

// Counter-based RNG stream: reproducible regardless of evaluation schedule.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(stream),
                      std::uint32_t(stream >> 32), 0x9e3779b9u};
    gen_.seed(seq);
  }
  double uniform(double a = 0.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(gen_);
  }
  double gaussian(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(gen_);
  }
  std::uint64_t integer(std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(gen_);
  }
  Vec3 gaussian_vec(double sd = 1.0) { return {gaussian(0, sd), gaussian(0, sd), gaussian(0, sd)}; }
  Vec3 uniform_sphere() {
    while (true) {
      Vec3 v = gaussian_vec();
      double r = norm(v);
      if (r > 1e-12) return v * (1.0 / r);
    }
  }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// FNV-1a over the bytes of a string; used for manifest/config hashes.
std::uint64_t fnv1a(const std::string& bytes);

struct FitResult {
  double slope = 0;      // exponent in log-log fits, rate in log-linear fits
  double intercept = 0;
  double r2 = 0;
  std::size_t n = 0;
};

// Least squares y = intercept + slope * x.
FitResult linear_fit(std::span<const double> x, std::span<const double> y);

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace boltzlab
