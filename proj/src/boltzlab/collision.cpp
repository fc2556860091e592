#include "boltzlab/collision.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numbers>

namespace boltzlab {

namespace {
constexpr double pi = std::numbers::pi;
}

namespace detail {
AxisW cubic_axis(double t) {
  AxisW a;
  double fl = std::floor(t);
  double u = t - fl;
  a.base = int(fl) - 1;
  a.taps = 4;
  double u2 = u * u, u3 = u2 * u;
  a.w[0] = 0.5 * (-u3 + 2 * u2 - u);
  a.w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
  a.w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
  a.w[3] = 0.5 * (u3 - u2);
  return a;
}

AxisW linear_axis(double t) {
  AxisW a;
  double fl = std::floor(t);
  double u = t - fl;
  a.base = int(fl);
  a.taps = 2;
  a.w[0] = 1.0 - u;
  a.w[1] = u;
  a.w[2] = a.w[3] = 0;
  return a;
}
}  // namespace detail

SliceView slice_of(const DistributionField& f, int mode) {
  SliceView s;
  s.values = f.mode(mode);
  s.analytic = f.analytic(mode);
  return s;
}

cplx eval_slice(const VelocityGrid& g, const SliceView& s, const Vec3& p) {
  if (s.analytic) return (*s.analytic)(p);
  return s.cubic ? sample_tricubic<cplx>(g, s.values, p) : sample_trilinear<cplx>(g, s.values, p);
}

namespace {
inline cplx node_value(const SliceView& s, const VelocityGrid& g, int idx) {
  if (!s.values.empty()) return s.values[idx];
  return (*s.analytic)(g.node(idx));
}
}  // namespace

// ---------------------------------------------------------------------------
// pointwise sigma path

std::vector<cplx> q_sigma(const VelocityGrid& grid, const SliceView& g, const SliceView& f,
                          const KernelSpec& spec, const AngularRule& rule, SplitMode mode,
                          double pair_energy_cut) {
  const int n = grid.size();
  std::vector<cplx> out(n, cplx{0, 0});
  auto phis = rule.phi();

  for (int i = 0; i < n; ++i) {
    Vec3 v = grid.node(i);
    double vv = norm2(v);
    cplx f_i = node_value(f, grid, i);
    cplx acc{0, 0};
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      Vec3 vs = grid.node(j);
      if (pair_energy_cut > 0 && vv + norm2(vs) > pair_energy_cut) continue;
      Vec3 u = v - vs;
      double r = norm(u);
      double rg = std::pow(r, spec.gamma);
      Frame fr = line_frame(u);
      cplx loss = node_value(g, grid, j) * f_i;
      for (auto& tn : rule.theta) {
        double ct = std::cos(tn.x), st = std::sin(tn.x);
        double bs = b_sin(tn.x, spec.s);
        double chi = (mode == SplitMode::delta_split) ? chi_scaled(tn.x, spec.delta) : 1.0;
        for (auto& pn : phis) {
          Vec3 sigma = ct * fr.kappa + st * (std::cos(pn.x) * fr.e1 + std::sin(pn.x) * fr.e2);
          Vec3 zeta = 0.5 * (u - r * sigma);
          cplx gain = eval_slice(grid, g, vs + zeta) * eval_slice(grid, f, v - zeta);
          double w = grid.w_node * rg * bs * tn.w * pn.w;
          if (mode == SplitMode::bracket) {
            acc += w * (gain - loss);
          } else {
            acc += (w * chi) * (gain - loss);   // grazing difference form
            acc += (w * (1.0 - chi)) * gain;    // non-grazing gain
            acc -= (w * (1.0 - chi)) * loss;    // non-grazing loss
          }
        }
      }
    }
    out[i] = acc;
  }
  return out;
}

std::vector<double> q_direct_oracle(const VelocityGrid& grid,
                                    const std::function<double(const Vec3&)>& g,
                                    const std::function<double(const Vec3&)>& f,
                                    const KernelSpec& spec, const AngularRule& rule,
                                    const std::vector<Vec3>& points) {
  std::vector<double> out(points.size(), 0.0);
  auto phis = rule.phi();
  for (std::size_t p = 0; p < points.size(); ++p) {
    Vec3 v = points[p];
    double f_v = f(v);
    double acc = 0;
    for (int j = 0; j < grid.size(); ++j) {
      Vec3 vs = grid.node(j);
      Vec3 u = v - vs;
      double r = norm(u);
      if (r < 1e-12) continue;
      double rg = std::pow(r, spec.gamma);
      Frame fr = line_frame(u);
      double g_j = g(vs);
      for (auto& tn : rule.theta) {
        double ct = std::cos(tn.x), st = std::sin(tn.x);
        double bs = b_sin(tn.x, spec.s);
        for (auto& pn : phis) {
          Vec3 sigma = ct * fr.kappa + st * (std::cos(pn.x) * fr.e1 + std::sin(pn.x) * fr.e2);
          Vec3 zeta = 0.5 * (u - r * sigma);
          acc += grid.w_node * rg * bs * tn.w * pn.w * (g(vs + zeta) * f(v - zeta) - g_j * f_v);
        }
      }
    }
    out[p] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Carleman path

double carleman_integrate(const KernelSpec& spec,
                          const std::function<double(const Vec3&, const Vec3&)>& F,
                          double rho_max, const CarlemanBudget& budget) {
  double total = 0;
  auto omega_rule = build_sphere_rule(budget.omega_polar, budget.omega_azimuth);
  const double rho_min = budget.rho_min_rel * rho_max;
  const double ratio = std::pow(rho_min / rho_max, 1.0 / budget.radial_panels);
  double hi = rho_max;
  for (int p = 0; p < budget.radial_panels; ++p) {
    double lo = (p == budget.radial_panels - 1) ? rho_min : hi * ratio;
    for (auto& rn : gauss_legendre(budget.radial_gl, lo, hi)) {
      double rho = rn.x;
      if (rho >= rho_max) continue;
      auto a_rule = gauss_legendre(budget.alpha_gl, rho, rho_max);
      for (std::size_t iw = 0; iw < omega_rule.nodes.size(); ++iw) {
        Vec3 omega = omega_rule.nodes[iw];
        Frame fr = line_frame(omega);
        Vec3 tvec = rho * omega;
        for (auto& an : a_rule) {
          double a = an.x;
          double r = std::sqrt(a * a + rho * rho);
          double kern = b_carleman(a, rho, spec.s) *
                        std::pow(r, spec.gamma + 1 + 2 * spec.s) /
                        std::pow(rho, 3.0 + 2 * spec.s);
          double wbase =
              rn.w * omega_rule.weights[iw] * an.w * rho * rho * a * kern * (2.0 * pi / budget.n_psi);
          for (int q = 0; q < budget.n_psi; ++q) {
            double psi = 2.0 * pi * q / budget.n_psi;
            Vec3 alpha = a * (std::cos(psi) * fr.e1 + std::sin(psi) * fr.e2);
            total += wbase * F(alpha, tvec);
          }
        }
      }
    }
    hi = lo;
  }
  return total;
}

std::vector<cplx> q_carleman(const VelocityGrid& grid, const SliceView& g, const SliceView& f,
                             const KernelSpec& spec, const std::vector<Vec3>& points,
                             const CarlemanBudget& budget) {
  std::vector<cplx> out(points.size());
  const double rho_max = 2.0 * grid.L;
  const double margin = 2.0 * grid.h;
  for (std::size_t p = 0; p < points.size(); ++p) {
    Vec3 v = points[p];
    require(std::abs(v.x) < grid.L - margin && std::abs(v.y) < grid.L - margin &&
                std::abs(v.z) < grid.L - margin,
            "q_carleman: sample point too close to the box boundary");
    cplx f_v = eval_slice(grid, f, v);
    auto Fre = [&](const Vec3& alpha, const Vec3& tvec) -> double {
      cplx val = eval_slice(grid, g, v + alpha) * eval_slice(grid, f, v - tvec) -
                 eval_slice(grid, g, v + alpha - tvec) * f_v;
      return val.real();
    };
    double re = carleman_integrate(spec, Fre, rho_max, budget);
    out[p] = cplx{re, 0.0};
  }
  return out;
}

// ---------------------------------------------------------------------------
// weak form

cplx weak_trilinear(const VelocityGrid& grid, const SliceView& f, const SliceView& g,
                    const SliceView& test, const KernelSpec& spec, const AngularRule& rule,
                    bool same_fg, double pair_energy_cut) {
  auto phis = rule.phi();
  const int n = grid.size();
  ChunkedSum cs{std::size_t(n)};
  std::vector<double> part_re(cs.chunks()), part_im(cs.chunks());
  for (std::size_t c = 0; c < cs.chunks(); ++c) {
    cplx acc{0, 0};
    for (std::size_t ii = cs.begin(c); ii < cs.end(c); ++ii) {
      int i = int(ii);
      Vec3 v = grid.node(i);
      double vv = norm2(v);
      cplx g_i = node_value(g, grid, i);
      cplx phi_i = eval_slice(grid, test, v);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Vec3 vs = grid.node(j);
        if (pair_energy_cut > 0 && vv + norm2(vs) > pair_energy_cut) continue;
        Vec3 u = v - vs;
        double r = norm(u);
        double rg = std::pow(r, spec.gamma);
        Frame fr = line_frame(u);
        cplx f_j = node_value(f, grid, j);
        cplx phi_j = eval_slice(grid, test, vs);
        // loss product f(v_*) g(v)
        cplx loss = f_j * g_i;
        for (auto& tn : rule.theta) {
          double ct = std::cos(tn.x), st = std::sin(tn.x);
          double bs = b_sin(tn.x, spec.s);
          for (auto& pn : phis) {
            Vec3 sigma = ct * fr.kappa + st * (std::cos(pn.x) * fr.e1 + std::sin(pn.x) * fr.e2);
            Vec3 zeta = 0.5 * (u - r * sigma);
            Vec3 vp = v - zeta, vsp = vs + zeta;
            double w = grid.w_node * rg * bs * tn.w * pn.w;
            cplx gain = eval_slice(grid, f, vsp) * eval_slice(grid, g, vp);
            cplx phi_p = eval_slice(grid, test, vp);
            if (same_fg) {
              cplx phi_ps = eval_slice(grid, test, vsp);
              acc += 0.25 * w * (gain - loss) * (phi_i + phi_j - phi_p - phi_ps);
            } else {
              acc += 0.5 * w * (gain - loss) * (phi_i - phi_p);
            }
          }
        }
      }
    }
    part_re[c] = acc.real();
    part_im[c] = acc.imag();
  }
  return {pairwise_sum(part_re), pairwise_sum(part_im)};
}

// ---------------------------------------------------------------------------
// collision table

CollisionTable::CollisionTable(const VelocityGrid& grid, KernelSpec spec, AngularRule rule,
                               bool cubic)
    : grid_(&grid), spec_(std::move(spec)), rule_(std::move(rule)), cubic_(cubic) {
  auto phis = rule_.phi();
  const int N = grid.N;
  blocks_.reserve(std::size_t(2 * N - 1) * (2 * N - 1) * (2 * N - 1));
  entries_.reserve(blocks_.capacity() * rule_.theta.size() * phis.size() / 4);
  for (int a = -(N - 1); a <= N - 1; ++a)
    for (int b = -(N - 1); b <= N - 1; ++b)
      for (int c = -(N - 1); c <= N - 1; ++c) {
        if (a == 0 && b == 0 && c == 0) continue;
        Vec3 u{grid.h * a, grid.h * b, grid.h * c};
        double r = norm(u);
        Frame fr = line_frame(u);
        Block blk;
        blk.du = {a, b, c};
        blk.r_gamma = std::pow(r, spec_.gamma);
        blk.first = entries_.size();
        for (auto& tn : rule_.theta) {
          double ct = std::cos(tn.x), st = std::sin(tn.x);
          double bs = b_sin(tn.x, spec_.s);
          for (auto& pn : phis) {
            Vec3 sigma = ct * fr.kappa + st * (std::cos(pn.x) * fr.e1 + std::sin(pn.x) * fr.e2);
            Vec3 zeta = 0.5 * (u - r * sigma);
            Entry e;
            e.w_ang = bs * tn.w * pn.w;
            e.theta = tn.x;
            e.sp[0] = -zeta.x / grid.h;
            e.sp[1] = -zeta.y / grid.h;
            e.sp[2] = -zeta.z / grid.h;
            entries_.push_back(e);
          }
        }
        blk.count = entries_.size() - blk.first;
        blocks_.push_back(blk);
      }
}

namespace {
struct Padding {
  int N, P, pad;
  std::size_t volume() const { return std::size_t(P) * P * P; }
  std::size_t pidx(int i, int j, int k) const {
    return (std::size_t(i + pad) * P + (j + pad)) * P + (k + pad);
  }
};

Padding make_padding(const VelocityGrid& g) {
  Padding p;
  p.N = g.N;
  p.pad = int(std::ceil(std::sqrt(3.0) * g.N)) + 8;
  p.P = g.N + 2 * p.pad;
  return p;
}

template <typename T>
void fill_padded(const Padding& pd, std::span<const T> src, std::vector<T>& dst) {
  dst.assign(pd.volume(), T{});
  for (int i = 0; i < pd.N; ++i)
    for (int j = 0; j < pd.N; ++j)
      for (int k = 0; k < pd.N; ++k)
        dst[pd.pidx(i, j, k)] = src[std::size_t((i * pd.N + j) * pd.N + k)];
}
}  // namespace

template <typename T>
void CollisionTable::apply_impl(const T* const* gs, const T* const* fs, T* const* outs,
                                int n_pairs) const {
  const auto& g = *grid_;
  Padding pd = make_padding(g);
  std::vector<std::vector<T>> gbuf(n_pairs), fbuf(n_pairs);
  for (int q = 0; q < n_pairs; ++q) {
    fill_padded<T>(pd, {gs[q], std::size_t(g.size())}, gbuf[q]);
    fill_padded<T>(pd, {fs[q], std::size_t(g.size())}, fbuf[q]);
    std::fill_n(outs[q], g.size(), T{});
  }
  const int taps = cubic_ ? 4 : 2;
  const int n_taps = taps * taps * taps;
  std::vector<long> pat(n_taps);
  {
    int t = 0;
    for (int a = 0; a < taps; ++a)
      for (int b = 0; b < taps; ++b)
        for (int c = 0; c < taps; ++c) pat[t++] = (long(a) * pd.P + b) * pd.P + c;
  }
  std::vector<double> wflat_p(n_taps), wflat_s(n_taps);

  for (const auto& blk : blocks_) {
    const int dux = blk.du[0], duy = blk.du[1], duz = blk.du[2];
    const int ix0 = std::max(0, dux), ix1 = std::min(g.N - 1, g.N - 1 + dux);
    const int iy0 = std::max(0, duy), iy1 = std::min(g.N - 1, g.N - 1 + duy);
    const int iz0 = std::max(0, duz), iz1 = std::min(g.N - 1, g.N - 1 + duz);
    if (ix0 > ix1 || iy0 > iy1 || iz0 > iz1) continue;
    const long du_off = (long(dux) * pd.P + duy) * pd.P + duz;
    const double wk = g.w_node * blk.r_gamma;

    for (std::size_t e = blk.first; e < blk.first + blk.count; ++e) {
      const Entry& en = entries_[e];
      detail::AxisW axp[3], axs[3];
      for (int a = 0; a < 3; ++a) {
        double spv = en.sp[a];
        double ssv = -double(blk.du[a]) - spv;
        axp[a] = cubic_ ? detail::cubic_axis(spv) : detail::linear_axis(spv);
        axs[a] = cubic_ ? detail::cubic_axis(ssv) : detail::linear_axis(ssv);
      }
      const long off_p = (long(axp[0].base) * pd.P + axp[1].base) * pd.P + axp[2].base;
      const long off_s = (long(axs[0].base) * pd.P + axs[1].base) * pd.P + axs[2].base;
      {
        int t = 0;
        for (int a = 0; a < taps; ++a)
          for (int b = 0; b < taps; ++b)
            for (int c = 0; c < taps; ++c) {
              wflat_p[t] = axp[0].w[a] * axp[1].w[b] * axp[2].w[c];
              wflat_s[t] = axs[0].w[a] * axs[1].w[b] * axs[2].w[c];
              ++t;
            }
      }
      const double W = wk * en.w_ang;

      for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy) {
          std::size_t prow = pd.pidx(ix, iy, iz0);
          std::size_t orow = std::size_t((ix * g.N + iy) * g.N + iz0);
          for (int iz = iz0; iz <= iz1; ++iz, ++prow, ++orow) {
            const long bp = long(prow) + off_p;
            const long bs = long(prow) + off_s;
            for (int q = 0; q < n_pairs; ++q) {
              const T* gb = gbuf[q].data();
              const T* fb = fbuf[q].data();
              T gain_g{}, gain_f{};
              for (int t = 0; t < n_taps; ++t) {
                gain_f += wflat_p[t] * fb[bp + pat[t]];
                gain_g += wflat_s[t] * gb[bs + pat[t]];
              }
              T loss = gb[long(prow) - du_off] * fb[prow];
              outs[q][orow] += W * (gain_g * gain_f - loss);
            }
          }
        }
    }
  }
}

void CollisionTable::apply(std::span<const cplx> g, std::span<const cplx> f,
                           std::span<cplx> out) const {
  const cplx* gp = g.data();
  const cplx* fp = f.data();
  cplx* op = out.data();
  apply_impl<cplx>(&gp, &fp, &op, 1);
}

void CollisionTable::apply_real(std::span<const double> g, std::span<const double> f,
                                std::span<double> out) const {
  const double* gp = g.data();
  const double* fp = f.data();
  double* op = out.data();
  apply_impl<double>(&gp, &fp, &op, 1);
}

void CollisionTable::apply_pairs(std::span<Pair> pairs) const {
  std::vector<const cplx*> gs, fs;
  std::vector<cplx*> outs;
  for (auto& p : pairs) {
    gs.push_back(p.g.data());
    fs.push_back(p.f.data());
    outs.push_back(p.out.data());
  }
  apply_impl<cplx>(gs.data(), fs.data(), outs.data(), int(pairs.size()));
}

CollisionTable::EntropyResult CollisionTable::entropy_production(std::span<const double> f,
                                                                 double floor_rel) const {
  const auto& g = *grid_;
  Padding pd = make_padding(g);
  std::vector<double> fbuf;
  fill_padded<double>(pd, f, fbuf);
  double fmax = 0;
  for (double x : f) fmax = std::max(fmax, std::abs(x));
  const double floor = floor_rel * fmax;

  std::vector<double> logf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) logf[i] = std::log(std::max(f[i], floor));

  const int taps = cubic_ ? 4 : 2;
  const int n_taps = taps * taps * taps;
  std::vector<long> pat(n_taps);
  {
    int t = 0;
    for (int a = 0; a < taps; ++a)
      for (int b = 0; b < taps; ++b)
        for (int c = 0; c < taps; ++c) pat[t++] = (long(a) * pd.P + b) * pd.P + c;
  }
  std::vector<double> wflat_p(n_taps), wflat_s(n_taps);

  double production = 0, pairing = 0, clip = 0;
  for (const auto& blk : blocks_) {
    const int dux = blk.du[0], duy = blk.du[1], duz = blk.du[2];
    const int ix0 = std::max(0, dux), ix1 = std::min(g.N - 1, g.N - 1 + dux);
    const int iy0 = std::max(0, duy), iy1 = std::min(g.N - 1, g.N - 1 + duy);
    const int iz0 = std::max(0, duz), iz1 = std::min(g.N - 1, g.N - 1 + duz);
    if (ix0 > ix1 || iy0 > iy1 || iz0 > iz1) continue;
    const long du_off = (long(dux) * pd.P + duy) * pd.P + duz;
    const double wk = g.w_node * blk.r_gamma;
    for (std::size_t e = blk.first; e < blk.first + blk.count; ++e) {
      const Entry& en = entries_[e];
      detail::AxisW axp[3], axs[3];
      for (int a = 0; a < 3; ++a) {
        double spv = en.sp[a];
        double ssv = -double(blk.du[a]) - spv;
        axp[a] = cubic_ ? detail::cubic_axis(spv) : detail::linear_axis(spv);
        axs[a] = cubic_ ? detail::cubic_axis(ssv) : detail::linear_axis(ssv);
      }
      const long off_p = (long(axp[0].base) * pd.P + axp[1].base) * pd.P + axp[2].base;
      const long off_s = (long(axs[0].base) * pd.P + axs[1].base) * pd.P + axs[2].base;
      {
        int t = 0;
        for (int a = 0; a < taps; ++a)
          for (int b = 0; b < taps; ++b)
            for (int c = 0; c < taps; ++c) {
              wflat_p[t] = axp[0].w[a] * axp[1].w[b] * axp[2].w[c];
              wflat_s[t] = axs[0].w[a] * axs[1].w[b] * axs[2].w[c];
              ++t;
            }
      }
      const double W = wk * en.w_ang;
      for (int ix = ix0; ix <= ix1; ++ix)
        for (int iy = iy0; iy <= iy1; ++iy) {
          std::size_t prow = pd.pidx(ix, iy, iz0);
          std::size_t orow = std::size_t((ix * g.N + iy) * g.N + iz0);
          for (int iz = iz0; iz <= iz1; ++iz, ++prow, ++orow) {
            double fp = 0, fps = 0;
            const long bp = long(prow) + off_p;
            const long bs = long(prow) + off_s;
            for (int t = 0; t < n_taps; ++t) {
              fp += wflat_p[t] * fbuf[bp + pat[t]];
              fps += wflat_s[t] * fbuf[bs + pat[t]];
            }
            double f_i = fbuf[prow];
            double f_j = fbuf[long(prow) - du_off];
            double diff = fp * fps - f_i * f_j;
            pairing += W * diff * logf[orow];
            if (fp < floor) {
              clip += floor - fp;
              fp = floor;
            }
            if (fps < floor) {
              clip += floor - fps;
              fps = floor;
            }
            double x = fp * fps;
            double y = std::max(f_i, floor) * std::max(f_j, floor);
            production += 0.25 * W * (x - y) * std::log(x / y);
          }
        }
    }
  }
  EntropyResult res;
  res.production = production;
  res.pairing = pairing;
  res.clip_mass = clip * g.w_node;
  return res;
}

const CollisionTable& shared_table(const VelocityGrid& grid, const KernelSpec& spec, bool cubic) {
  static std::map<std::tuple<const VelocityGrid*, std::string, bool>,
                  std::unique_ptr<CollisionTable>>
      cache;
  auto key = std::make_tuple(&grid, spec.id(), cubic);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache
             .emplace(key,
                      std::make_unique<CollisionTable>(grid, spec, table_angular_rule(), cubic))
             .first;
  return *it->second;
}

// ---------------------------------------------------------------------------
// conservative correction

namespace {
struct MomentBasis {
  std::array<std::vector<double>, 5> carrier;
  std::array<std::array<double, 6>, 5> lu;  // factored Gram with pivoting baked in

  std::array<double, 5> solve(std::array<double, 5> rhs) const {
    std::array<std::array<double, 6>, 5> m = lu;
    for (int a = 0; a < 5; ++a) m[a][5] = rhs[a];
    // Gauss-Jordan on the augmented copy (5x5, tiny)
    for (int c = 0; c < 5; ++c) {
      int piv = c;
      for (int rr = c + 1; rr < 5; ++rr)
        if (std::abs(m[rr][c]) > std::abs(m[piv][c])) piv = rr;
      std::swap(m[c], m[piv]);
      for (int rr = 0; rr < 5; ++rr) {
        if (rr == c) continue;
        double fac = m[rr][c] / m[c][c];
        for (int cc = c; cc < 6; ++cc) m[rr][cc] -= fac * m[c][cc];
      }
    }
    std::array<double, 5> x{};
    for (int c = 0; c < 5; ++c) x[c] = m[c][5] / m[c][c];
    return x;
  }
};

const MomentBasis& moment_basis(const VelocityGrid& g) {
  static std::map<const VelocityGrid*, std::unique_ptr<MomentBasis>> cache;
  auto it = cache.find(&g);
  if (it != cache.end()) return *it->second;
  auto mb = std::make_unique<MomentBasis>();
  for (auto& b : mb->carrier) b.resize(g.size());
  for (int i = 0; i < g.size(); ++i) {
    Vec3 v = g.node(i);
    double mu = maxwellian(v);
    mb->carrier[0][i] = mu;
    mb->carrier[1][i] = v.x * mu;
    mb->carrier[2][i] = v.y * mu;
    mb->carrier[3][i] = v.z * mu;
    mb->carrier[4][i] = norm2(v) * mu;
  }
  auto moment = [&](const std::vector<double>& d, int a) {
    return sum_indexed(g.size(), [&](std::size_t i) {
      Vec3 v = g.node(int(i));
      double phi = (a == 0) ? 1.0 : (a < 4 ? v[a - 1] : norm2(v));
      return g.w_node * d[i] * phi;
    });
  };
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) mb->lu[a][b] = moment(mb->carrier[b], a);
  it = cache.emplace(&g, std::move(mb)).first;
  return *it->second;
}

template <typename T>
double fix_impl(const VelocityGrid& g, std::span<T> q) {
  const auto& mb = moment_basis(g);
  double total = 0;
  const int comps = std::is_same_v<T, double> ? 1 : 2;
  for (int comp = 0; comp < comps; ++comp) {
    std::array<double, 5> defect{};
    for (int a = 0; a < 5; ++a)
      defect[a] = sum_indexed(g.size(), [&](std::size_t i) {
        Vec3 v = g.node(int(i));
        double phi = (a == 0) ? 1.0 : (a < 4 ? v[a - 1] : norm2(v));
        double val;
        if constexpr (std::is_same_v<T, double>)
          val = q[i];
        else
          val = (comp == 0) ? q[i].real() : q[i].imag();
        return g.w_node * val * phi;
      });
    auto coef = mb.solve(defect);
    for (int b = 0; b < 5; ++b) {
      total += std::abs(coef[b]);
      if (coef[b] == 0) continue;
      for (int i = 0; i < g.size(); ++i) {
        if constexpr (std::is_same_v<T, double>)
          q[i] -= coef[b] * mb.carrier[b][i];
        else if (comp == 0)
          q[i] -= cplx{coef[b] * mb.carrier[b][i], 0};
        else
          q[i] -= cplx{0, coef[b] * mb.carrier[b][i]};
      }
    }
  }
  return total;
}
}  // namespace

double conservative_fix(const VelocityGrid& grid, std::span<cplx> q) {
  return fix_impl<cplx>(grid, q);
}
double conservative_fix_real(const VelocityGrid& grid, std::span<double> q) {
  return fix_impl<double>(grid, q);
}

DistributionField collision_bilinear(const CollisionTable& table, const DistributionField& g,
                                     const DistributionField& f, bool conserve) {
  const auto& modes = g.modes();
  DistributionField out(&table.grid(), modes, g.is_real() && f.is_real());
  for (int mo = 0; mo < modes.count(); ++mo) {
    Idx3 xo = modes.modes[mo];
    std::vector<std::pair<int, int>> combos;
    for (int m1 = 0; m1 < modes.count(); ++m1) {
      Idx3 x1 = modes.modes[m1];
      int m2 = modes.find(xo.i - x1.i, xo.j - x1.j, xo.k - x1.k);
      if (m2 >= 0) combos.emplace_back(m1, m2);
    }
    std::vector<std::vector<cplx>> bufs(combos.size());
    std::vector<CollisionTable::Pair> pairs;
    for (std::size_t q = 0; q < combos.size(); ++q) {
      bufs[q].resize(table.grid().size());
      pairs.push_back({g.mode(combos[q].first), f.mode(combos[q].second), bufs[q]});
    }
    table.apply_pairs(pairs);
    auto acc = out.mode(mo);
    for (auto& b : bufs)
      for (int i = 0; i < table.grid().size(); ++i) acc[i] += b[i];
    if (conserve) conservative_fix(table.grid(), acc);
  }
  return out;
}

}  // namespace boltzlab
