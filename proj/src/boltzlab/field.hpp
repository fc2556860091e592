#pragma once

#include <functional>
#include <optional>

#include "boltzlab/common.hpp"
#include "boltzlab/grid.hpp"

namespace boltzlab {

// Polynomial weight m(v) = <v>^k, optionally multiplied by one tagged extra
// power of <v> used throughout the estimates.
struct WeightSpec {
  double k = 0.0;
  enum class Extra { none, gamma_half, gamma_half_plus_2s, gamma_plus_2s_half };
  Extra extra = Extra::none;

  double exponent(double gamma, double s) const {
    switch (extra) {
      case Extra::gamma_half: return k + 0.5 * gamma;
      case Extra::gamma_half_plus_2s: return k + 0.5 * gamma + 2.0 * s;
      case Extra::gamma_plus_2s_half: return k + 0.5 * (gamma + 2.0 * s);
      default: return k;
    }
  }
};

using AnalyticMode = std::function<cplx(const Vec3&)>;

// f(x, v) = sum_xi fhat_xi(v) e^{i xi . x}; each mode slice lives on the
// velocity lattice, optionally with an analytic off-grid evaluator.
class DistributionField {
 public:
  DistributionField() = default;
  DistributionField(const VelocityGrid* grid, TorusModes modes, bool real_field = true);

  const VelocityGrid& grid() const { return *grid_; }
  const TorusModes& modes() const { return modes_; }
  int n_modes() const { return modes_.count(); }
  bool is_real() const { return real_; }

  std::span<cplx> mode(int m) { return {data_.data() + std::size_t(m) * grid_->size(), std::size_t(grid_->size())}; }
  std::span<const cplx> mode(int m) const {
    return {data_.data() + std::size_t(m) * grid_->size(), std::size_t(grid_->size())};
  }
  std::vector<cplx>& raw() { return data_; }
  const std::vector<cplx>& raw() const { return data_; }

  void set_analytic(int m, AnalyticMode f) { analytic_[m] = std::move(f); }
  const AnalyticMode* analytic(int m) const {
    return analytic_[m] ? &analytic_[m] : nullptr;
  }
  void clear_analytic();

  WeightSpec weight_tag;

  bool has_nan() const;
  // Max Hermitian-symmetry defect over conjugate mode pairs (0 if no pairs).
  double hermitian_defect() const;
  // Fraction of |f| mass in the outermost node shell (saturation warning).
  double boundary_mass_fraction() const;

  DistributionField& operator+=(const DistributionField& o);
  DistributionField& operator*=(double a);

 private:
  const VelocityGrid* grid_ = nullptr;
  TorusModes modes_;
  bool real_ = true;
  std::vector<cplx> data_;
  std::vector<AnalyticMode> analytic_;
};

double maxwellian(const Vec3& v);
Vec3 grad_maxwellian(const Vec3& v);

// Canonical equilibrium and its null-space companions, sampled on the grid
// with analytic evaluators attached.
DistributionField make_maxwellian_field(const VelocityGrid& grid, const TorusModes& modes);
DistributionField make_analytic_field(const VelocityGrid& grid, const TorusModes& modes,
                                      const std::vector<AnalyticMode>& per_mode);
DistributionField make_homogeneous_analytic(const VelocityGrid& grid,
                                            const std::function<double(const Vec3&)>& f);

struct Moments {
  double mass = 0;
  Vec3 momentum;
  double energy = 0;
};
// Moments of the x-averaged slice (mode 0), with the lattice quadrature.
Moments field_moments(const DistributionField& f);

// Separable interpolation on the velocity lattice with zero extension.
// Cubic is the 4-point Catmull-Rom rule; linear the 2-point rule.
struct AxisStencil {
  int base = 0;
  int taps = 0;
  std::array<double, 6> w{};
};
AxisStencil axis_stencil_cubic(const VelocityGrid& g, double x);
AxisStencil axis_stencil_linear(const VelocityGrid& g, double x);

template <typename T>
T gather_separable(const VelocityGrid& g, std::span<const T> values, const AxisStencil& sx,
                   const AxisStencil& sy, const AxisStencil& sz) {
  T acc{};
  for (int a = 0; a < sx.taps; ++a) {
    int i = sx.base + a;
    if (i < 0 || i >= g.N) continue;
    T accy{};
    for (int b = 0; b < sy.taps; ++b) {
      int j = sy.base + b;
      if (j < 0 || j >= g.N) continue;
      T accz{};
      for (int c = 0; c < sz.taps; ++c) {
        int k = sz.base + c;
        if (k < 0 || k >= g.N) continue;
        accz += sz.w[c] * values[std::size_t(g.index(i, j, k))];
      }
      accy += sy.w[b] * accz;
    }
    acc += sx.w[a] * accy;
  }
  return acc;
}

template <typename T>
T sample_tricubic(const VelocityGrid& g, std::span<const T> values, const Vec3& p) {
  return gather_separable<T>(g, values, axis_stencil_cubic(g, p.x), axis_stencil_cubic(g, p.y),
                             axis_stencil_cubic(g, p.z));
}

template <typename T>
T sample_trilinear(const VelocityGrid& g, std::span<const T> values, const Vec3& p) {
  return gather_separable<T>(g, values, axis_stencil_linear(g, p.x), axis_stencil_linear(g, p.y),
                             axis_stencil_linear(g, p.z));
}

// Random band-limited field: mode amplitudes ~ (1+|eta|^2+|xi|^2)^{-beta/2}
// times a Gaussian velocity envelope exp(-|v|^2/(2 env_sd^2)); Hermitian in xi.
DistributionField random_band_limited(const VelocityGrid& grid, const TorusModes& modes,
                                      double beta, double env_sd, int eta_cut, RngStream& rng);

}  // namespace boltzlab
