#pragma once

#include "boltzlab/common.hpp"
#include "boltzlab/field.hpp"
#include "boltzlab/grid.hpp"

namespace boltzlab {

// Velocity-side discrete Fourier transform on the periodized box [-L, L)^3,
// optionally zero-padded for a finer frequency lattice.  Conventions:
//   fhat(eta) = h^3 sum_j f(v_j) exp(-i v_j . eta),   eta on the padded lattice,
// so fhat approximates the continuum transform and Parseval reads
//   h^3 sum |f|^2 = (2 pi)^{-3} d_eta^3 sum |fhat|^2.
// Frequencies are stored in monotone (fftshifted) order, eta_k = d_eta*(k - P/2).
class VelocityFourier {
 public:
  VelocityFourier(const VelocityGrid& grid, int pad = 1);
  ~VelocityFourier();
  VelocityFourier(const VelocityFourier&) = delete;
  VelocityFourier& operator=(const VelocityFourier&) = delete;

  int P() const { return P_; }
  double d_eta() const { return d_eta_; }
  double eta_axis(int k) const { return d_eta_ * (k - P_ / 2); }
  double eta_max() const { return d_eta_ * (P_ / 2); }
  int size() const { return P_ * P_ * P_; }
  int index(int i, int j, int k) const { return (i * P_ + j) * P_ + k; }
  Vec3 eta(int idx) const {
    return {eta_axis(idx / (P_ * P_)), eta_axis((idx / P_) % P_), eta_axis(idx % P_)};
  }

  // values: one velocity slice (grid.size() entries), any complex data.
  std::vector<cplx> forward(std::span<const cplx> values) const;
  // inverse of forward back onto the original (unpadded) lattice
  std::vector<cplx> inverse(std::span<const cplx> modes) const;

  const VelocityGrid& grid() const { return grid_; }

 private:
  const VelocityGrid& grid_;
  int P_;
  double d_eta_;
  void* plan_fwd_ = nullptr;
  void* plan_bwd_ = nullptr;
  void* buf_ = nullptr;
};

// Cubic interpolation of a mode array produced by VelocityFourier::forward at
// an arbitrary frequency point (zero outside the padded band).
cplx sample_modes(const VelocityFourier& vf, std::span<const cplx> modes, const Vec3& eta);

// Pooled transforms keyed by (grid identity, pad); single-threaded process,
// plain static cache.
const VelocityFourier& shared_fourier(const VelocityGrid& grid, int pad);

// x-side transform between uniform collocation points on the active torus axes
// and the mode representation.  n_a = 2 M_a + 1 points per active axis.
struct TorusTransform {
  TorusModes modes;
  std::array<int, 3> n = {1, 1, 1};
  int points() const { return n[0] * n[1] * n[2]; }
  Vec3 point(int p) const;  // x in [0, 2pi)^3
  // values indexed [point][vnode] -> modes [mode][vnode] and back
  void forward(const VelocityGrid& g, std::span<const cplx> values, std::span<cplx> out) const;
  void inverse(const VelocityGrid& g, std::span<const cplx> mode_data, std::span<cplx> out) const;
};
TorusTransform make_torus_transform(const TorusModes& modes);

}  // namespace boltzlab
