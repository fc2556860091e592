#include "boltzlab/grid.hpp"

#include <algorithm>
#include <numbers>

namespace boltzlab {

namespace {
constexpr double pi = std::numbers::pi;

double maxwellian(const Vec3& v) {
  return std::pow(2.0 * pi, -1.5) * std::exp(-0.5 * norm2(v));
}
}  // namespace

VelocityGrid build_velocity_grid(double L, int N) {
  require(L > 0, "velocity grid: L must be positive");
  require(N >= 4 && N % 2 == 0, "velocity grid: N must be even and >= 4");
  VelocityGrid g;
  g.L = L;
  g.N = N;
  g.h = 2.0 * L / N;
  g.w_node = g.h * g.h * g.h;
  double mass = sum_indexed(std::size_t(g.size()),
                            [&](std::size_t i) { return g.w_node * maxwellian(g.node(int(i))); });
  g.maxwellian_defect = std::abs(mass - 1.0);
  return g;
}

int TorusModes::find(int i, int j, int k) const {
  if (std::abs(i) > M[0] || std::abs(j) > M[1] || std::abs(k) > M[2]) return -1;
  for (int m = 0; m < count(); ++m)
    if (modes[m].i == i && modes[m].j == j && modes[m].k == k) return m;
  return -1;
}

TorusModes build_torus_modes(int M1, int M2, int M3) {
  require(M1 >= 0 && M2 >= 0 && M3 >= 0, "torus modes: M >= 0");
  TorusModes t;
  t.M = {M1, M2, M3};
  t.modes.push_back({0, 0, 0});
  for (int i = -M1; i <= M1; ++i)
    for (int j = -M2; j <= M2; ++j)
      for (int k = -M3; k <= M3; ++k)
        if (!(i == 0 && j == 0 && k == 0)) t.modes.push_back({i, j, k});
  return t;
}

std::vector<QuadNode1D> gauss_legendre(int n, double a, double b) {
  // Newton iteration on Legendre polynomials, standard Golub-Welsch-free
  // construction good to machine precision for small n.
  std::vector<QuadNode1D> out(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    double dp = n * (x * p1 - p0) / (x * x - 1);
    double w = 2.0 / ((1 - x * x) * dp * dp);
    out[n - 1 - i] = {0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w};
  }
  std::sort(out.begin(), out.end(), [](auto& l, auto& r) { return l.x < r.x; });
  return out;
}

std::vector<QuadNode1D> AngularRule::phi() const {
  std::vector<QuadNode1D> out(n_phi);
  for (int k = 0; k < n_phi; ++k) out[k] = {2.0 * pi * k / n_phi, 2.0 * pi / n_phi};
  return out;
}

AngularRule build_angular_rule(int panels, int gl_points, int n_phi, double theta_min) {
  require(n_phi % 2 == 0, "angular rule: n_phi must be even");
  require(theta_min > 0 && theta_min < pi / 2, "angular rule: theta_min in (0, pi/2)");
  AngularRule rule;
  rule.n_phi = n_phi;
  rule.theta_min = theta_min;
  const double ratio = std::pow(theta_min / (pi / 2), 1.0 / panels);
  double hi = pi / 2;
  for (int p = 0; p < panels; ++p) {
    double lo = (p == panels - 1) ? theta_min : hi * ratio;
    auto gl = gauss_legendre(gl_points, lo, hi);
    rule.theta.insert(rule.theta.end(), gl.begin(), gl.end());
    hi = lo;
  }
  std::sort(rule.theta.begin(), rule.theta.end(), [](auto& l, auto& r) { return l.x < r.x; });
  rule.descriptor = "geometric panels=" + std::to_string(panels) +
                    " gl=" + std::to_string(gl_points) + " nphi=" + std::to_string(n_phi) +
                    " theta_min=" + std::to_string(theta_min);
  return rule;
}

AngularRule default_angular_rule() { return build_angular_rule(21, 3, 8, 1e-6); }

AngularRule fine_angular_rule() { return build_angular_rule(26, 5, 16, 1e-7); }

AngularRule table_angular_rule() { return build_angular_rule(11, 2, 4, 1e-3); }

SphereRule build_sphere_rule(int n_polar, int n_azimuth) {
  SphereRule s;
  auto mu = gauss_legendre(n_polar, -1.0, 1.0);
  for (auto& m : mu) {
    double st = std::sqrt(std::max(0.0, 1.0 - m.x * m.x));
    for (int k = 0; k < n_azimuth; ++k) {
      double phi = 2.0 * pi * k / n_azimuth;
      s.nodes.push_back({st * std::cos(phi), st * std::sin(phi), m.x});
      s.weights.push_back(m.w * 2.0 * pi / n_azimuth);
    }
  }
  return s;
}

Frame line_frame(const Vec3& u) {
  Vec3 k = u * (1.0 / norm(u));
  // canonical representative of the line: flip to lexicographically positive
  Vec3 kr = k;
  double sgn = 1.0;
  if (kr.x < 0 || (kr.x == 0 && (kr.y < 0 || (kr.y == 0 && kr.z < 0)))) {
    kr = -kr;
    sgn = -1.0;
  }
  Vec3 a = (std::abs(kr.x) <= 0.9) ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  Vec3 e1 = a - kr * dot(a, kr);
  e1 = e1 * (1.0 / norm(e1));
  Vec3 e2 = cross(k, e1);  // flips with k, so frame(-u) = (e1, -e2)
  (void)sgn;
  return {k, e1, e2};
}

CollisionPair post_collision(const Vec3& v, const Vec3& v_star, const Vec3& sigma) {
  require(std::abs(norm(sigma) - 1.0) < 1e-9, "post_collision: sigma must be unit");
  CollisionPair p;
  p.v = v;
  p.v_star = v_star;
  p.sigma = sigma;
  p.u = v - v_star;
  p.w = v + v_star;
  p.r = norm(p.u);
  Vec3 half_w = 0.5 * p.w;
  Vec3 half_r_sigma = 0.5 * p.r * sigma;
  p.v_prime = half_w + half_r_sigma;
  p.v_star_prime = half_w - half_r_sigma;
  if (p.r > 0) {
    p.kappa = p.u * (1.0 / p.r);
    p.cos_theta = std::clamp(dot(p.kappa, sigma), -1.0, 1.0);
    p.theta = std::acos(p.cos_theta);
    Vec3 up = p.v_prime - v_star;
    double rp = norm(up);
    p.kappa_prime = rp > 0 ? up * (1.0 / rp) : Vec3{};
  } else {
    p.kappa = {};
    p.kappa_prime = {};
    p.cos_theta = 1.0;
    p.theta = 0.0;
  }
  double wn = norm(p.w);
  p.w_hat = wn > 0 ? p.w * (1.0 / wn) : Vec3{};
  return p;
}

double jacobian_regular_change(const CollisionPair& pair) {
  require(pair.cos_theta > 0, "regular change of variables needs cos(theta) > 0");
  return (1.0 + pair.cos_theta) / 8.0;
}

double jacobian_singular_change(double theta) {
  require(theta > 0 && theta <= pi / 2, "singular change of variables needs theta in (0, pi/2]");
  double s = std::sin(0.5 * theta);
  return 4.0 / (s * s);
}

Vec3 invert_regular_change(const Vec3& v_prime, const Vec3& v_star, const Vec3& sigma) {
  Vec3 up = v_prime - v_star;
  double rp = norm(up);
  require(rp > 0, "invert_regular_change: degenerate pair");
  double c_half = dot(up, sigma) / rp;  // cos(theta/2)
  require(c_half > 0, "invert_regular_change: outside the cos(theta) > 0 branch");
  double r = rp / c_half;
  Vec3 u = 2.0 * up - r * sigma;
  return v_star + u;
}

}  // namespace boltzlab
