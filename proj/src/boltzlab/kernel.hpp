#pragma once

#include "boltzlab/common.hpp"
#include "boltzlab/grid.hpp"

namespace boltzlab {

// Collision kernel B(v - v_*, sigma) = |v - v_*|^gamma * b(cos theta) with
// sin(theta) * b(cos theta) = theta^{-1-2s} exactly (hard potentials, moderate
// angular singularity).  All truncations of b and of |v'-v| derive from one
// C^2 bump chi with 1_{[-1,1]} <= chi <= 1_{[-2,2]}.
struct KernelSpec {
  double gamma = 0.5;  // kinetic exponent, in (0,1)
  double s = 0.25;     // angular singularity exponent, in (0,1/2)
  double c_b = 1.0;    // normalization of the sandwich bound; identity here
  double delta = 0.3;  // grazing cut for the b_delta / b_delta^c split

  std::string id() const;
};

KernelSpec make_kernel_spec(double gamma, double s, double delta);

// C^2 quintic bump: 1 on [-1,1], 0 outside [-2,2].
double chi_bump(double x);
inline double chi_scaled(double x, double a) { return chi_bump(x / a); }

// sin(theta) * b(cos theta) = theta^{-1-2s}; b itself diverges like theta^{-2-2s}.
double b_sin(double theta, double s);      // sin(theta)*b, the measure-weighted form
double b_angular(double theta, double s);  // b(cos theta)

// Grazing/non-grazing split of the angular function.
inline double b_delta_sin(double theta, const KernelSpec& k) {
  return chi_scaled(theta, k.delta) * b_sin(theta, k.s);
}
inline double b_delta_c_sin(double theta, const KernelSpec& k) {
  return (1.0 - chi_scaled(theta, k.delta)) * b_sin(theta, k.s);
}

// |v'-v| based split used by the regularization analysis:
// B~1 = chi(|v'-v|) b |v-v_*|^gamma, B~1^c the complement.
inline double vprime_cut(double r, double theta) {
  return chi_bump(r * std::sin(0.5 * theta));  // |v'-v| = r sin(theta/2)
}

// K_delta = int_{S^2} b_delta^c(cos theta) dsigma  (Eq. driving the delta^{-2s}
// growth of the loss term).
double k_delta(const KernelSpec& k);
double k_delta_oracle(const KernelSpec& k);  // adaptive 1D quadrature

// Cancellation-lemma kernel: int b_delta (cos^{-3-gamma}(theta/2) - 1) dsigma
// scaled by |z|^gamma; bounded by C * delta^{2-2s} |z|^gamma.  The quadrature
// is delta-adapted (graded below delta, dense across the mollifier fall-off).
double cancellation_kernel_bound(const Vec3& z, const KernelSpec& k, int refine = 1);
double cancellation_constant(const KernelSpec& k, int refine = 1);  // the |z|^gamma prefactor

// Carleman-side angular weight: the sigma-integral of b against F equals the
// (theta, alpha)-plane integral against b~ 1_{|alpha|>=|theta-vec|}
// |alpha+theta-vec|^{gamma+1+2s}/|theta-vec|^{3+2s} with
// b~ = 4 sin^{2+2s}(theta/2) b(cos theta); bounded above and below.
double b_carleman(double abs_alpha, double abs_theta_vec, double s);

}  // namespace boltzlab
