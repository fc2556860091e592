#include <numbers>

#include "boltzlab/field.hpp"
#include "boltzlab/kernel.hpp"
#include "doctest.h"

using namespace boltzlab;
namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("angular function and sandwich") {
  KernelSpec k = make_kernel_spec(0.5, 0.25, 0.3);
  CHECK(b_sin(pi / 2, 0.25) == doctest::Approx(std::pow(pi / 2, -1.5)));
  // sandwich (with c_b = 1) is an identity for the implemented b
  for (int i = 1; i <= 500; ++i) {
    double theta = pi / 2 * i / 500.0;
    double v = std::sin(theta) * b_angular(theta, k.s);
    double ref = std::pow(theta, -1.0 - 2 * k.s);
    CHECK(v == doctest::Approx(ref).epsilon(1e-13));
  }
  CHECK_THROWS(b_angular(0.0, 0.25));
  CHECK_THROWS(make_kernel_spec(0.0, 0.25, 0.3));
  CHECK_THROWS(make_kernel_spec(0.5, 0.6, 0.3));
}

TEST_CASE("chi bump properties") {
  CHECK(chi_bump(0.3) == 1.0);
  CHECK(chi_bump(-1.0) == 1.0);
  CHECK(chi_bump(2.0) == 0.0);
  CHECK(chi_bump(-2.5) == 0.0);
  for (double x = -3; x <= 3; x += 0.01) {
    double c = chi_bump(x);
    CHECK(c >= -1e-15);
    CHECK(c <= 1 + 1e-15);
    double ind_in = (std::abs(x) <= 1.0) ? 1.0 : 0.0;
    double ind_out = (std::abs(x) <= 2.0) ? 1.0 : 0.0;
    CHECK(c >= ind_in - 1e-15);
    CHECK(c <= ind_out + 1e-15);
  }
  // C^2: second difference is continuous-ish across the knots
  auto d2 = [](double x) {
    double h = 1e-5;
    return (chi_bump(x + h) - 2 * chi_bump(x) + chi_bump(x - h)) / (h * h);
  };
  CHECK(std::abs(d2(1.0 + 1e-7) - d2(1.0 - 1e-7)) < 1e-2);
  CHECK(std::abs(d2(2.0 + 1e-7) - d2(2.0 - 1e-7)) < 1e-2);
}

TEST_CASE("split partitions are exact") {
  KernelSpec k = make_kernel_spec(0.5, 0.25, 0.3);
  RngStream rng(3, 3);
  double worst = 0;
  for (int t = 0; t < 20000; ++t) {
    double theta = rng.uniform(1e-6, pi / 2);
    double b = b_sin(theta, k.s);
    worst = std::max(worst, std::abs(b_delta_sin(theta, k) + b_delta_c_sin(theta, k) - b) /
                                std::max(1.0, std::abs(b)));
    double r = rng.uniform(0, 10);
    double cut = vprime_cut(r, theta);
    worst = std::max(worst, std::abs(cut + (1.0 - cut) - 1.0));
  }
  CHECK(worst < 1e-14);
}

TEST_CASE("k_delta behavior") {
  KernelSpec k = make_kernel_spec(0.5, 0.25, 0.3);
  CHECK(k_delta(k) == doctest::Approx(k_delta_oracle(k)).epsilon(1e-8));
  CHECK(k_delta(k) >= 0.0);

  KernelSpec wide = k;
  wide.delta = pi / 2 * 0.9999;
  CHECK(k_delta(wide) < 0.05);

  // halving delta grows K_delta by about 2^{2s}
  KernelSpec k1 = make_kernel_spec(0.5, 0.25, 0.1);
  KernelSpec k2 = make_kernel_spec(0.5, 0.25, 0.05);
  double ratio = k_delta_oracle(k2) / k_delta_oracle(k1);
  CHECK(ratio == doctest::Approx(std::pow(2.0, 2 * k.s)).epsilon(0.10));
}

TEST_CASE("cancellation kernel bound") {
  KernelSpec k = make_kernel_spec(0.5, 0.25, 0.3);
  CHECK(cancellation_kernel_bound(Vec3{0, 0, 0}, k) == 0.0);

  // C = S_delta(z)/(delta^{2-2s}|z|^gamma) finite and stable under refinement
  double c_coarse = cancellation_constant(k, 1) / std::pow(k.delta, 2 - 2 * k.s);
  double c_fine = cancellation_constant(k, 3) / std::pow(k.delta, 2 - 2 * k.s);
  CHECK(std::isfinite(c_coarse));
  CHECK(c_coarse == doctest::Approx(c_fine).epsilon(1e-6));
  for (double r : {0.1, 1.0, 10.0}) {
    Vec3 z{r, 0, 0};
    double sd = cancellation_kernel_bound(z, k, 3);
    CHECK(sd <= (c_fine * 1.0001) * std::pow(k.delta, 2 - 2 * k.s) * std::pow(r, k.gamma));
  }

  // delta-scaling S_delta / S_{delta/2} ~ 2^{2-2s} within 15%
  KernelSpec kh = k;
  kh.delta = k.delta / 2;
  double s1 = cancellation_constant(k);
  double s2 = cancellation_constant(kh);
  CHECK(s1 / s2 == doctest::Approx(std::pow(2.0, 2 - 2 * k.s)).epsilon(0.15));
}

TEST_CASE("weight difference bounds on random collision pairs") {
  // (2.3): |m'-m| <= C sin(t/2)(m' + <v'_*><v'>^{k-1} + sin^{k-1}(t/2) m'_*)
  RngStream rng(17, 1);
  for (double kexp : {6.0, 10.0, 14.0}) {
    double worst = 0;
    for (int t = 0; t < 100000; ++t) {
      Vec3 v = rng.gaussian_vec(2.0), vs = rng.gaussian_vec(2.0);
      if (norm(v - vs) < 1e-8) continue;
      Vec3 sigma = rng.uniform_sphere();
      auto p = post_collision(v, vs, sigma);
      if (p.cos_theta < 0) continue;
      double m = std::pow(bracket(p.v), kexp), mp = std::pow(bracket(p.v_prime), kexp);
      double mps = std::pow(bracket(p.v_star_prime), kexp);
      double sh = std::sin(0.5 * p.theta);
      double rhs = sh * (mp + bracket(p.v_star_prime) * std::pow(bracket(p.v_prime), kexp - 1) +
                         std::pow(sh, kexp - 1) * mps);
      if (rhs > 0) worst = std::max(worst, std::abs(mp - m) / rhs);
    }
    // the hidden constant grows with the weight power; only finiteness and a
    // generous cap are asserted, the fitted value is what experiments record
    CHECK(std::isfinite(worst));
    CHECK(worst < 1e6);
  }
}

TEST_CASE("relative velocity bounds (2.4), (2.5), (2.7)") {
  KernelSpec k = make_kernel_spec(0.5, 0.25, 0.3);
  RngStream rng(23, 5);
  double w24 = 0, w25 = 0, w27 = 0;
  for (int t = 0; t < 100000; ++t) {
    Vec3 v = rng.gaussian_vec(2.0), vs = rng.gaussian_vec(2.0);
    double r = norm(v - vs);
    if (r < 1e-8) continue;
    auto p = post_collision(v, vs, rng.uniform_sphere());
    if (p.cos_theta <= 0 || p.theta < 1e-8) continue;
    double rg = std::pow(r, k.gamma);
    double sh = std::sin(0.5 * p.theta);
    w24 = std::max(w24, rg / (std::pow(bracket(p.v), k.gamma / 2) *
                              std::pow(bracket(p.v_prime), k.gamma / 2) *
                              std::pow(bracket(p.v_star_prime), k.gamma)));
    w25 = std::max(w25, rg / (std::pow(sh, -k.gamma / 2) * std::pow(bracket(p.v_prime), k.gamma) *
                              std::pow(bracket(p.v), k.gamma / 2) *
                              std::pow(bracket(p.v_star_prime), k.gamma / 2)));
    double dbr = std::pow(bracket(p.v), k.gamma / 2) - std::pow(bracket(p.v_prime), k.gamma / 2);
    w27 = std::max(w27, dbr * dbr / (sh * sh * std::pow(bracket(p.v), k.gamma) *
                                     std::pow(bracket(p.v_star), 4 - k.gamma)));
  }
  CHECK(w24 < 10.0);
  CHECK(w25 < 10.0);
  CHECK(w27 < 10.0);
}

TEST_CASE("carleman angular weight bounded and symmetric") {
  double s = 0.25;
  RngStream rng(29, 2);
  for (int t = 0; t < 20000; ++t) {
    double at = rng.uniform(1e-6, 5.0);
    double av = rng.uniform(at, 8.0);  // support |alpha| >= |theta-vec|
    double b = b_carleman(av, at, s);
    CHECK(b > 0.0);
    CHECK(b < 8.0);
    CHECK(b == b_carleman(av, at, s));  // depends only on the moduli
  }
  // theta -> 0 limit: 4 * 2^{-2-2s} * ... stays bounded away from 0
  CHECK(b_carleman(1.0, 1e-8, s) > 0.1);
}
