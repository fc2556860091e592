#include "boltzlab/field.hpp"

#include <numbers>

namespace boltzlab {

namespace {
constexpr double pi = std::numbers::pi;
}

DistributionField::DistributionField(const VelocityGrid* grid, TorusModes modes, bool real_field)
    : grid_(grid), modes_(std::move(modes)), real_(real_field) {
  data_.assign(std::size_t(modes_.count()) * grid_->size(), cplx{0.0, 0.0});
  analytic_.resize(modes_.count());
}

void DistributionField::clear_analytic() {
  for (auto& a : analytic_) a = nullptr;
}

bool DistributionField::has_nan() const {
  for (auto& z : data_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return true;
  return false;
}

double DistributionField::hermitian_defect() const {
  double worst = 0;
  for (int m = 0; m < n_modes(); ++m) {
    int mc = modes_.conjugate_index(m);
    if (mc < 0 || mc < m) continue;
    auto a = mode(m);
    auto b = mode(mc);
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - std::conj(b[i])));
  }
  return worst;
}

double DistributionField::boundary_mass_fraction() const {
  double total = 0, shell = 0;
  const auto& g = *grid_;
  for (int m = 0; m < n_modes(); ++m) {
    auto d = mode(m);
    for (int idx = 0; idx < g.size(); ++idx) {
      Idx3 t = g.unindex(idx);
      double a = std::abs(d[idx]);
      total += a;
      if (t.i == 0 || t.i == g.N - 1 || t.j == 0 || t.j == g.N - 1 || t.k == 0 || t.k == g.N - 1)
        shell += a;
    }
  }
  return total > 0 ? shell / total : 0.0;
}

DistributionField& DistributionField::operator+=(const DistributionField& o) {
  require(data_.size() == o.data_.size(), "field +=: incompatible shapes");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  clear_analytic();
  return *this;
}

DistributionField& DistributionField::operator*=(double a) {
  for (auto& z : data_) z *= a;
  clear_analytic();
  return *this;
}

double maxwellian(const Vec3& v) { return std::pow(2.0 * pi, -1.5) * std::exp(-0.5 * norm2(v)); }

Vec3 grad_maxwellian(const Vec3& v) { return -maxwellian(v) * v; }

DistributionField make_maxwellian_field(const VelocityGrid& grid, const TorusModes& modes) {
  DistributionField f(&grid, modes);
  auto m0 = f.mode(0);
  for (int i = 0; i < grid.size(); ++i) m0[i] = maxwellian(grid.node(i));
  f.set_analytic(0, [](const Vec3& v) -> cplx { return maxwellian(v); });
  return f;
}

DistributionField make_analytic_field(const VelocityGrid& grid, const TorusModes& modes,
                                      const std::vector<AnalyticMode>& per_mode) {
  DistributionField f(&grid, modes, false);
  for (int m = 0; m < f.n_modes() && m < int(per_mode.size()); ++m) {
    if (!per_mode[m]) continue;
    auto d = f.mode(m);
    for (int i = 0; i < grid.size(); ++i) d[i] = per_mode[m](grid.node(i));
    f.set_analytic(m, per_mode[m]);
  }
  return f;
}

DistributionField make_homogeneous_analytic(const VelocityGrid& grid,
                                            const std::function<double(const Vec3&)>& fn) {
  DistributionField f(&grid, build_torus_modes(0, 0, 0));
  auto d = f.mode(0);
  for (int i = 0; i < grid.size(); ++i) d[i] = fn(grid.node(i));
  f.set_analytic(0, [fn](const Vec3& v) -> cplx { return fn(v); });
  return f;
}

Moments field_moments(const DistributionField& f) {
  const auto& g = f.grid();
  auto d = f.mode(0);
  Moments m;
  m.mass = sum_indexed(g.size(), [&](std::size_t i) { return g.w_node * d[i].real(); });
  for (int a = 0; a < 3; ++a)
    m.momentum[a] =
        sum_indexed(g.size(), [&](std::size_t i) { return g.w_node * d[i].real() * g.node(int(i))[a]; });
  m.energy = sum_indexed(g.size(),
                         [&](std::size_t i) { return g.w_node * d[i].real() * norm2(g.node(int(i))); });
  return m;
}

AxisStencil axis_stencil_cubic(const VelocityGrid& g, double x) {
  AxisStencil s;
  double t = (x + g.L) / g.h;
  int i1 = int(std::floor(t));
  double u = t - i1;
  s.base = i1 - 1;
  s.taps = 4;
  // Catmull-Rom weights
  double u2 = u * u, u3 = u2 * u;
  s.w[0] = 0.5 * (-u3 + 2 * u2 - u);
  s.w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
  s.w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
  s.w[3] = 0.5 * (u3 - u2);
  return s;
}

AxisStencil axis_stencil_linear(const VelocityGrid& g, double x) {
  AxisStencil s;
  double t = (x + g.L) / g.h;
  int i0 = int(std::floor(t));
  double u = t - i0;
  s.base = i0;
  s.taps = 2;
  s.w[0] = 1.0 - u;
  s.w[1] = u;
  return s;
}

DistributionField random_band_limited(const VelocityGrid& grid, const TorusModes& modes,
                                      double beta, double env_sd, int eta_cut, RngStream& rng) {
  DistributionField f(&grid, modes);
  const double d_eta = pi / grid.L;
  std::vector<cplx> vmodes(std::size_t(2 * eta_cut + 1) * (2 * eta_cut + 1) * (2 * eta_cut + 1));
  for (int m = 0; m < f.n_modes(); ++m) {
    int mc = f.modes().conjugate_index(m);
    if (mc >= 0 && mc < m) continue;  // fill conjugates afterwards
    Vec3 xi = f.modes().xi(m);
    std::size_t c = 0;
    for (int a = -eta_cut; a <= eta_cut; ++a)
      for (int b = -eta_cut; b <= eta_cut; ++b)
        for (int cc = -eta_cut; cc <= eta_cut; ++cc) {
          Vec3 eta{a * d_eta, b * d_eta, cc * d_eta};
          double amp = std::pow(1.0 + norm2(eta) + norm2(xi), -0.5 * beta);
          vmodes[c++] = amp * cplx{rng.gaussian(), rng.gaussian()};
        }
    auto dm = f.mode(m);
    for (int i = 0; i < grid.size(); ++i) {
      Vec3 v = grid.node(i);
      cplx acc{0, 0};
      c = 0;
      for (int a = -eta_cut; a <= eta_cut; ++a)
        for (int b = -eta_cut; b <= eta_cut; ++b)
          for (int cc = -eta_cut; cc <= eta_cut; ++cc) {
            double phase = (a * v.x + b * v.y + cc * v.z) * d_eta;
            acc += vmodes[c++] * cplx{std::cos(phase), std::sin(phase)};
          }
      double env = std::exp(-0.5 * norm2(v) / (env_sd * env_sd));
      dm[i] = acc * env;
    }
  }
  // reality in x: conjugate modes; mode 0 real part only if field flagged real
  for (int m = 0; m < f.n_modes(); ++m) {
    int mc = f.modes().conjugate_index(m);
    if (mc >= 0 && mc < m) {
      auto src = f.mode(mc);
      auto dst = f.mode(m);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::conj(src[i]);
    } else if (mc == m) {
      auto dm = f.mode(m);
      for (auto& z : dm) z = z.real();
    }
  }
  return f;
}

}  // namespace boltzlab
