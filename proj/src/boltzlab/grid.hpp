#pragma once

#include <vector>

#include "boltzlab/common.hpp"

namespace boltzlab {

// Uniform collocation lattice on [-L, L)^3 with node v_i = -L + h*(i + 1/2)?  No:
// nodes sit at -L + h*i so that the lattice is closed under integer-offset
// differences (collision pre/post points then share one offset table).
struct VelocityGrid {
  double L = 8.0;
  int N = 16;
  double h = 1.0;            // spacing 2L/N
  double w_node = 1.0;       // quadrature weight h^3
  double maxwellian_defect = 0.0;  // |sum w*mu - 1|, recorded at construction

  int size() const { return N * N * N; }
  int index(int i, int j, int k) const { return (i * N + j) * N + k; }
  Idx3 unindex(int idx) const { return {idx / (N * N), (idx / N) % N, idx % N}; }
  double axis(int i) const { return -L + h * i; }
  Vec3 node(int idx) const {
    Idx3 t = unindex(idx);
    return {axis(t.i), axis(t.j), axis(t.k)};
  }
  bool in_box(int i, int j, int k) const {
    return i >= 0 && i < N && j >= 0 && j < N && k >= 0 && k < N;
  }
};

VelocityGrid build_velocity_grid(double L, int N);

// Active torus Fourier modes xi in Z^3 with |xi_a| <= M_a.  The x-average is
// normalized (measure dx/(2 pi)^3) so mode-0 moments coincide with the
// physical moments.
struct TorusModes {
  std::array<int, 3> M = {0, 0, 0};
  std::vector<Idx3> modes;  // enumerated with mode 0 first

  int count() const { return int(modes.size()); }
  Vec3 xi(int m) const { return {double(modes[m].i), double(modes[m].j), double(modes[m].k)}; }
  int find(int i, int j, int k) const;  // -1 if absent
  int conjugate_index(int m) const { return find(-modes[m].i, -modes[m].j, -modes[m].k); }
};

TorusModes build_torus_modes(int M1, int M2, int M3);

struct QuadNode1D {
  double x = 0, w = 0;
};

// Angular quadrature for the collision sphere integral written as
//   int_{S^2} g(sigma) dsigma = int_0^{pi/2} sin(theta) dtheta int_0^{2pi} dphi g.
// theta uses a geometrically graded panel rule accumulating at 0 (the
// singular measure theta^{-1-2s} is applied pointwise by callers); phi is the
// uniform rule with an even node count so the (v,v_*) swap maps the node set
// to itself.
struct AngularRule {
  std::vector<QuadNode1D> theta;  // on (theta_min, pi/2]
  int n_phi = 8;
  double theta_min = 1e-4;
  std::string descriptor;

  std::vector<QuadNode1D> phi() const;
};

AngularRule build_angular_rule(int panels, int gl_points, int n_phi, double theta_min);
AngularRule default_angular_rule();   // spec-grade rule for norms and 1D integrals
AngularRule fine_angular_rule();      // oracle rule, independent grading
AngularRule table_angular_rule();     // coarser rule for the gridded collision table

// Gauss-Legendre nodes/weights on [a,b].
std::vector<QuadNode1D> gauss_legendre(int n, double a, double b);

// Product rule on the full sphere (exactness by construction for the measure).
struct SphereRule {
  std::vector<Vec3> nodes;
  std::vector<double> weights;
};
SphereRule build_sphere_rule(int n_polar, int n_azimuth);

// Orthonormal frame attached to the line through u: frame(-u) has the same
// e1 and negated e2, which makes the angular node set exactly symmetric under
// swapping (v, v_*).
struct Frame {
  Vec3 kappa, e1, e2;
};
Frame line_frame(const Vec3& u);

struct CollisionPair {
  Vec3 v, v_star, sigma;
  Vec3 v_prime, v_star_prime;
  Vec3 kappa, kappa_prime, w, w_hat, u;
  double theta = 0, cos_theta = 1, r = 0;
};

// sigma must be unit; supported branch cos(theta) >= 0 is the caller's business.
CollisionPair post_collision(const Vec3& v, const Vec3& v_star, const Vec3& sigma);

// Jacobian density of the regular change v -> v' at fixed (v_*, sigma):
// (1 + kappa.sigma)/8 = (kappa'.sigma)^2/4, defined for cos(theta) > 0.
double jacobian_regular_change(const CollisionPair& pair);

// Jacobian of the singular change v_* -> v': 4/sin^2(theta/2).  On (0, pi/2]
// the sharp power bound is 4/sin^2(theta/2) <= 2 pi^2 / theta^2 (attained at
// theta = pi/2; 16/theta^2 is the small-angle asymptote, not an upper bound).
double jacobian_singular_change(double theta);

// Inverse of v -> v' at fixed (v_*, sigma): reconstructs v from v'.
Vec3 invert_regular_change(const Vec3& v_prime, const Vec3& v_star, const Vec3& sigma);

}  // namespace boltzlab
