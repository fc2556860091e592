#include "boltzlab/kernel.hpp"

#include <numbers>
#include <sstream>

namespace boltzlab {

namespace {
constexpr double pi = std::numbers::pi;

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) < 15 * tol)
    return left + right + (left + right - whole) / 15;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  double m = 0.5 * (a + b);
  double fa = f(a), fm = f(m), fb = f(b);
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}
}  // namespace

std::string KernelSpec::id() const {
  std::ostringstream os;
  os << "g" << gamma << "_s" << s << "_d" << delta;
  return os.str();
}

KernelSpec make_kernel_spec(double gamma, double s, double delta) {
  require(gamma > 0 && gamma < 1, "kernel: gamma in (0,1)");
  require(s > 0 && s < 0.5, "kernel: s in (0,1/2)");
  require(delta > 0 && delta < pi / 2, "kernel: delta in (0, pi/2)");
  KernelSpec k;
  k.gamma = gamma;
  k.s = s;
  k.delta = delta;
  return k;
}

double chi_bump(double x) {
  double a = std::abs(x);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  double u = a - 1.0;  // quintic smoothstep, C^2 at both ends
  double fall = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  return 1.0 - fall;
}

double b_sin(double theta, double s) {
  require(theta > 0, "b: theta = 0 is the nonintegrable singularity");
  return std::pow(theta, -1.0 - 2.0 * s);
}

double b_angular(double theta, double s) { return b_sin(theta, s) / std::sin(theta); }

double k_delta(const KernelSpec& k) {
  // 2 pi * int (1 - chi_delta(theta)) theta^{-1-2s} dtheta over (0, pi/2].
  // The integrand vanishes below delta and is piecewise smooth with a C^2
  // joint at 2 delta, so panel the integral there.
  if (k.delta >= pi / 2) return 0.0;
  double sum = 0;
  auto add_gl = [&](int n, double a, double b) {
    if (b <= a) return;
    for (auto& q : gauss_legendre(n, a, b))
      sum += q.w * (1.0 - chi_scaled(q.x, k.delta)) * b_sin(q.x, k.s);
  };
  double knee = std::min(2.0 * k.delta, pi / 2);
  add_gl(32, k.delta, knee);
  if (knee < pi / 2) {
    // geometric panels toward pi/2 for the plain power tail
    int panels = 6;
    double ratio = std::pow(knee / (pi / 2), 1.0 / panels);
    double hi = pi / 2;
    for (int p = 0; p < panels; ++p) {
      double lo = (p == panels - 1) ? knee : hi * ratio;
      add_gl(12, lo, hi);
      hi = lo;
    }
  }
  return 2.0 * pi * sum;
}

double k_delta_oracle(const KernelSpec& k) {
  if (k.delta >= pi / 2) return 0.0;
  auto f = [&](double t) { return (1.0 - chi_scaled(t, k.delta)) * b_sin(t, k.s); };
  return 2.0 * pi * integrate_adaptive(f, k.delta, pi / 2, 1e-13);
}

double cancellation_constant(const KernelSpec& k, int refine) {
  // From the cancellation lemma applied to B_delta with Phi = |.|^gamma:
  // S_delta(z) = |z|^gamma * 2 pi int b_delta(cos) sin(theta)
  //              [cos^{-3-gamma}(theta/2) - 1] dtheta,
  // supported on theta <= 2 delta.
  double sum = 0;
  auto add_gl = [&](int n, double a, double b) {
    if (b <= a) return;
    for (auto& q : gauss_legendre(n, a, b)) {
      double c = std::cos(0.5 * q.x);
      double geom = std::pow(c, -3.0 - k.gamma) - 1.0;
      sum += q.w * b_delta_sin(q.x, k) * geom;
    }
  };
  double lo_cut = std::min(k.delta, pi / 2);
  // graded panels from a tiny cut up to delta (integrand ~ theta^{1-2s})
  int panels = 16 * refine;
  double theta_min = 1e-7;
  double ratio = std::pow(theta_min / lo_cut, 1.0 / panels);
  double hi = lo_cut;
  for (int p = 0; p < panels; ++p) {
    double lo = (p == panels - 1) ? theta_min : hi * ratio;
    add_gl(4 * refine, lo, hi);
    hi = lo;
  }
  add_gl(32 * refine, lo_cut, std::min(2.0 * k.delta, pi / 2));
  return 2.0 * pi * sum;
}

double cancellation_kernel_bound(const Vec3& z, const KernelSpec& k, int refine) {
  return cancellation_constant(k, refine) * std::pow(norm(z), k.gamma);
}

double b_carleman(double abs_alpha, double abs_theta_vec, double s) {
  double r2 = abs_alpha * abs_alpha + abs_theta_vec * abs_theta_vec;
  if (r2 <= 0) return 0;
  double r = std::sqrt(r2);
  double sin_half = abs_theta_vec / r;
  double theta = 2.0 * std::asin(std::min(1.0, sin_half));
  if (theta <= 0) return 0;
  return 4.0 * std::pow(sin_half, 2.0 + 2.0 * s) * b_angular(theta, s);
}

}  // namespace boltzlab
