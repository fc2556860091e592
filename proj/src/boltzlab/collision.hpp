#pragma once

#include "boltzlab/common.hpp"
#include "boltzlab/field.hpp"
#include "boltzlab/grid.hpp"
#include "boltzlab/kernel.hpp"

namespace boltzlab {

// One velocity slice as seen by the collision quadratures: lattice values
// plus an optional analytic off-grid evaluator.  When the evaluator is
// present it wins (fields built from closed forms evaluate exactly); gridded
// fields fall back to separable interpolation with zero extension.
struct SliceView {
  std::span<const cplx> values{};
  const AnalyticMode* analytic = nullptr;
  bool cubic = true;
};

SliceView slice_of(const DistributionField& f, int mode);

cplx eval_slice(const VelocityGrid& g, const SliceView& s, const Vec3& p);

enum class SplitMode {
  bracket,      // single difference form for the whole kernel
  delta_split,  // grazing difference form + separate non-grazing gain/loss
};

// Pointwise sigma-representation evaluation of Q(g, f) on every output node.
// The v_* integral runs over the box lattice; pairs with negligible reach can
// be skipped via pair_energy_cut (threshold on |v|^2 + |v_*|^2, <= 0 disables).
std::vector<cplx> q_sigma(const VelocityGrid& grid, const SliceView& g, const SliceView& f,
                          const KernelSpec& spec, const AngularRule& rule,
                          SplitMode mode = SplitMode::delta_split, double pair_energy_cut = 0);

// Brute-force direct quadrature oracle at selected points: no kernel split,
// analytic integrand only, independent angular grading.
std::vector<double> q_direct_oracle(const VelocityGrid& grid,
                                    const std::function<double(const Vec3&)>& g,
                                    const std::function<double(const Vec3&)>& f,
                                    const KernelSpec& spec, const AngularRule& rule,
                                    const std::vector<Vec3>& points);

// Carleman-representation evaluation of Q(g, f) at selected points.
struct CarlemanBudget {
  int radial_panels = 26;
  int radial_gl = 3;
  int omega_polar = 8;
  int omega_azimuth = 8;
  int alpha_gl = 16;
  int n_psi = 8;
  double rho_min_rel = 1e-5;  // innermost radial panel relative to rho_max
};
std::vector<cplx> q_carleman(const VelocityGrid& grid, const SliceView& g, const SliceView& f,
                             const KernelSpec& spec, const std::vector<Vec3>& points,
                             const CarlemanBudget& budget = {});

// Shared Carleman-plane quadrature: integrates
//   F(alpha_vec, theta_vec) * b~ 1_{|a|>=|t|} |a+t|^{gamma+1+2s} / |t|^{3+2s}
// over theta_vec in R^3 and alpha_vec in the plane orthogonal to it.
double carleman_integrate(const KernelSpec& spec,
                          const std::function<double(const Vec3&, const Vec3&)>& F,
                          double rho_max, const CarlemanBudget& budget);

// Weak form <Q(f,g), h> with any weight folded into the test slot.
// For f == g (same data) uses the exact quarter-symmetrized bracket of the
// weak formulation, which vanishes on collision invariants to round-off; for
// f != g the half-symmetrized gain-cancelling form.
cplx weak_trilinear(const VelocityGrid& grid, const SliceView& f, const SliceView& g,
                    const SliceView& test, const KernelSpec& spec, const AngularRule& rule,
                    bool same_fg, double pair_energy_cut = 0);

// Precomputed offset x angle table for repeated gridded evaluations.  The
// geometry of a quadrature node depends only on the lattice offset u = v - v_*
// and the angle, so stencils are shared by every base point.
class CollisionTable {
 public:
  CollisionTable(const VelocityGrid& grid, KernelSpec spec, AngularRule rule, bool cubic);

  const VelocityGrid& grid() const { return *grid_; }
  const KernelSpec& spec() const { return spec_; }
  const AngularRule& rule() const { return rule_; }
  bool cubic() const { return cubic_; }

  // Q(g, f) for gridded complex slices (zero extension off the box).
  void apply(std::span<const cplx> g, std::span<const cplx> f, std::span<cplx> out) const;
  void apply_real(std::span<const double> g, std::span<const double> f,
                  std::span<double> out) const;

  // Fused evaluation of several bilinear pairs sharing the traversal.
  struct Pair {
    std::span<const cplx> g, f;
    std::span<cplx> out;
  };
  void apply_pairs(std::span<Pair> pairs) const;

  // Entropy production D(f) = 1/4 sum w B (f'f'_* - f f_*) log(f'f'_*/(f f_*))
  // for positive gridded f; values below the floor are clipped (recorded), and
  // the strong-form pairing sum w log(f) Q(f,f) comes from the same traversal.
  struct EntropyResult {
    double production = 0;  // D(f) >= 0 by construction
    double pairing = 0;     // = dH/dt when moments are conserved
    double clip_mass = 0;
  };
  EntropyResult entropy_production(std::span<const double> f, double floor_rel = 1e-12) const;

  // Streaming assembly interface: cb(i, j, w_kernel, theta, sp, ss) per
  // quadrature node, where sp/ss describe the interpolation stencils of
  // v' and v'_* (axis bases absolute) and carry the off-grid positions.
  struct Stencil {
    std::array<int, 3> base;
    const double (*w)[4];  // per-axis weights, taps entries each
    int taps;
    Vec3 point;
  };
  template <typename CB>
  void stream(CB&& cb) const;

 private:
  struct Entry {
    double w_ang;  // theta-phi weight including theta^{-1-2s}
    double theta;
    double sp[3];  // (v' - v)/h; (v'_* - v)/h = -du - sp
  };
  struct Block {
    std::array<int, 3> du;
    double r_gamma;
    std::size_t first, count;
  };

  template <typename T>
  void apply_impl(const T* const* gs, const T* const* fs, T* const* outs, int n_pairs) const;

  const VelocityGrid* grid_;
  KernelSpec spec_;
  AngularRule rule_;
  bool cubic_;
  std::vector<Block> blocks_;
  std::vector<Entry> entries_;

  friend struct TableDetail;
};

const CollisionTable& shared_table(const VelocityGrid& grid, const KernelSpec& spec, bool cubic);

// Minimal-change conservative correction: removes the mass/momentum/energy
// defect of a collision output by subtracting a combination of Maxwellian
// moment carriers; returns the l1 size of the correction coefficients.
double conservative_fix(const VelocityGrid& grid, std::span<cplx> q);
double conservative_fix_real(const VelocityGrid& grid, std::span<double> q);

// Mode-resolved bilinear collision operator for fields with x-structure:
// Q(g,f)_xi = sum_{xi1+xi2=xi} Q(g_{xi1}, f_{xi2}).
DistributionField collision_bilinear(const CollisionTable& table, const DistributionField& g,
                                     const DistributionField& f, bool conserve = false);

// --- implementation of the streaming interface -----------------------------

namespace detail {
struct AxisW {
  int base;
  double w[4];
  int taps;
};
AxisW cubic_axis(double t);
AxisW linear_axis(double t);
}  // namespace detail

template <typename CB>
void CollisionTable::stream(CB&& cb) const {
  const auto& g = *grid_;
  for (const auto& blk : blocks_) {
    const int dux = blk.du[0], duy = blk.du[1], duz = blk.du[2];
    const int ix0 = std::max(0, dux), ix1 = std::min(g.N - 1, g.N - 1 + dux);
    const int iy0 = std::max(0, duy), iy1 = std::min(g.N - 1, g.N - 1 + duy);
    const int iz0 = std::max(0, duz), iz1 = std::min(g.N - 1, g.N - 1 + duz);
    if (ix0 > ix1 || iy0 > iy1 || iz0 > iz1) continue;
    for (std::size_t e = blk.first; e < blk.first + blk.count; ++e) {
      const Entry& en = entries_[e];
      detail::AxisW axp[3], axs[3];
      Vec3 dp, ds;
      for (int a = 0; a < 3; ++a) {
        double spv = en.sp[a];
        double ssv = -double(blk.du[a]) - spv;
        axp[a] = cubic_ ? detail::cubic_axis(spv) : detail::linear_axis(spv);
        axs[a] = cubic_ ? detail::cubic_axis(ssv) : detail::linear_axis(ssv);
        (&dp.x)[a] = g.h * spv;
        (&ds.x)[a] = g.h * ssv;
      }
      double wp_rows[3][4], ws_rows[3][4];
      for (int a = 0; a < 3; ++a)
        for (int t = 0; t < 4; ++t) {
          wp_rows[a][t] = axp[a].w[t];
          ws_rows[a][t] = axs[a].w[t];
        }
      const double W = g.w_node * blk.r_gamma * en.w_ang;
      const int taps = cubic_ ? 4 : 2;
      for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy)
          for (int iz = iz0; iz <= iz1; ++iz) {
            int i = g.index(ix, iy, iz);
            int j = g.index(ix - dux, iy - duy, iz - duz);
            Vec3 v = g.node(i);
            Stencil sp{{ix + axp[0].base, iy + axp[1].base, iz + axp[2].base}, wp_rows, taps,
                       v + dp};
            Stencil ss{{ix + axs[0].base, iy + axs[1].base, iz + axs[2].base}, ws_rows, taps,
                       v + ds};
            cb(i, j, W, en.theta, sp, ss);
          }
    }
  }
}

}  // namespace boltzlab
