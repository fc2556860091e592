#include "boltzlab/fourier.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <numbers>

namespace boltzlab {

namespace {
constexpr double pi = std::numbers::pi;
}

VelocityFourier::VelocityFourier(const VelocityGrid& grid, int pad) : grid_(grid) {
  require(pad >= 1, "fourier: pad >= 1");
  P_ = grid.N * pad;
  d_eta_ = 2.0 * pi / (P_ * grid.h);
  buf_ = fftw_alloc_complex(std::size_t(P_) * P_ * P_);
  auto* b = static_cast<fftw_complex*>(buf_);
  plan_fwd_ = fftw_plan_dft_3d(P_, P_, P_, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
  plan_bwd_ = fftw_plan_dft_3d(P_, P_, P_, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

VelocityFourier::~VelocityFourier() {
  fftw_destroy_plan(static_cast<fftw_plan>(plan_fwd_));
  fftw_destroy_plan(static_cast<fftw_plan>(plan_bwd_));
  fftw_free(buf_);
}

std::vector<cplx> VelocityFourier::forward(std::span<const cplx> values) const {
  require(int(values.size()) == grid_.size(), "fourier: slice size mismatch");
  const int N = grid_.N, P = P_;
  auto* b = static_cast<fftw_complex*>(buf_);
  std::fill_n(reinterpret_cast<cplx*>(b), std::size_t(P) * P * P, cplx{0, 0});
  // place f(v_j) at padded index j (v_j = -L + h j)
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k) {
        reinterpret_cast<cplx*>(b)[std::size_t(i * P + j) * P + k] =
            values[std::size_t(grid_.index(i, j, k))];
      }
  fftw_execute(static_cast<fftw_plan>(plan_fwd_));
  // DFT gives sum_j f_j exp(-2pi i j q / P); eta = d_eta * (q - P/2) maps to
  // phase exp(-i v_j eta) = exp(i L eta) * exp(-i h j eta).  Reorder + twiddle.
  std::vector<cplx> out(std::size_t(P) * P * P);
  const double scale = grid_.h * grid_.h * grid_.h;
  auto twiddle = [&](int k) {
    // exp(i L eta_k) with eta_k = d_eta (k - P/2); also exp(+i pi j ...) from shift
    double eta = eta_axis(k);
    return std::polar(1.0, grid_.L * eta);
  };
  std::vector<cplx> tw(P);
  for (int k = 0; k < P; ++k) tw[k] = twiddle(k);
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j)
      for (int k = 0; k < P; ++k) {
        int qi = (i + P / 2) % P;  // DFT bin for shifted frequency index
        int qj = (j + P / 2) % P;
        int qk = (k + P / 2) % P;
        cplx val = reinterpret_cast<cplx*>(b)[std::size_t(qi * P + qj) * P + qk];
        out[std::size_t(i * P + j) * P + k] = scale * tw[i] * tw[j] * tw[k] * val;
      }
  return out;
}

std::vector<cplx> VelocityFourier::inverse(std::span<const cplx> modes) const {
  const int N = grid_.N, P = P_;
  require(int(modes.size()) == size(), "fourier: mode size mismatch");
  auto* b = static_cast<fftw_complex*>(buf_);
  std::vector<cplx> tw(P);
  for (int k = 0; k < P; ++k) tw[k] = std::polar(1.0, -grid_.L * eta_axis(k));
  for (int i = 0; i < P; ++i)
    for (int j = 0; j < P; ++j)
      for (int k = 0; k < P; ++k) {
        int qi = (i + P / 2) % P;
        int qj = (j + P / 2) % P;
        int qk = (k + P / 2) % P;
        reinterpret_cast<cplx*>(b)[std::size_t(qi * P + qj) * P + qk] =
            modes[std::size_t(i * P + j) * P + k] * tw[i] * tw[j] * tw[k];
      }
  fftw_execute(static_cast<fftw_plan>(plan_bwd_));
  std::vector<cplx> out(std::size_t(grid_.size()));
  const double scale = 1.0 / (grid_.h * grid_.h * grid_.h * P * P * P);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int k = 0; k < N; ++k)
        out[std::size_t(grid_.index(i, j, k))] =
            scale * reinterpret_cast<cplx*>(b)[std::size_t(i * P + j) * P + k];
  return out;
}

cplx sample_modes(const VelocityFourier& vf, std::span<const cplx> modes, const Vec3& eta) {
  const int P = vf.P();
  auto stencil = [&](double e) {
    AxisStencil s;
    double t = e / vf.d_eta() + P / 2;
    int i1 = int(std::floor(t));
    double u = t - i1;
    s.base = i1 - 1;
    s.taps = 4;
    double u2 = u * u, u3 = u2 * u;
    s.w[0] = 0.5 * (-u3 + 2 * u2 - u);
    s.w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
    s.w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
    s.w[3] = 0.5 * (u3 - u2);
    return s;
  };
  AxisStencil sx = stencil(eta.x), sy = stencil(eta.y), sz = stencil(eta.z);
  cplx acc{0, 0};
  for (int a = 0; a < 4; ++a) {
    int i = sx.base + a;
    if (i < 0 || i >= P) continue;
    cplx accy{0, 0};
    for (int b = 0; b < 4; ++b) {
      int j = sy.base + b;
      if (j < 0 || j >= P) continue;
      cplx accz{0, 0};
      for (int c = 0; c < 4; ++c) {
        int k = sz.base + c;
        if (k < 0 || k >= P) continue;
        accz += sz.w[c] * modes[std::size_t(i * P + j) * P + k];
      }
      accy += sy.w[b] * accz;
    }
    acc += sx.w[a] * accy;
  }
  return acc;
}

const VelocityFourier& shared_fourier(const VelocityGrid& grid, int pad) {
  static std::map<std::tuple<const VelocityGrid*, int>, std::unique_ptr<VelocityFourier>> cache;
  auto key = std::make_tuple(&grid, pad);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<VelocityFourier>(grid, pad)).first;
  return *it->second;
}

Vec3 TorusTransform::point(int p) const {
  int i = p / (n[1] * n[2]);
  int j = (p / n[2]) % n[1];
  int k = p % n[2];
  return {2.0 * pi * i / n[0], 2.0 * pi * j / n[1], 2.0 * pi * k / n[2]};
}

void TorusTransform::forward(const VelocityGrid& g, std::span<const cplx> values,
                             std::span<cplx> out) const {
  const int nv = g.size();
  require(int(values.size()) == points() * nv, "torus transform: point data size");
  require(int(out.size()) == modes.count() * nv, "torus transform: mode data size");
  for (int m = 0; m < modes.count(); ++m) {
    Vec3 xi = modes.xi(m);
    for (int q = 0; q < nv; ++q) out[std::size_t(m) * nv + q] = 0;
    for (int p = 0; p < points(); ++p) {
      cplx ph = std::polar(1.0 / points(), -dot(xi, point(p)));
      for (int q = 0; q < nv; ++q)
        out[std::size_t(m) * nv + q] += ph * values[std::size_t(p) * nv + q];
    }
  }
}

void TorusTransform::inverse(const VelocityGrid& g, std::span<const cplx> mode_data,
                             std::span<cplx> out) const {
  const int nv = g.size();
  require(int(mode_data.size()) == modes.count() * nv, "torus transform: mode data size");
  require(int(out.size()) == points() * nv, "torus transform: point data size");
  for (int p = 0; p < points(); ++p) {
    for (int q = 0; q < nv; ++q) out[std::size_t(p) * nv + q] = 0;
    for (int m = 0; m < modes.count(); ++m) {
      cplx ph = std::polar(1.0, dot(modes.xi(m), point(p)));
      for (int q = 0; q < nv; ++q)
        out[std::size_t(p) * nv + q] += ph * mode_data[std::size_t(m) * nv + q];
    }
  }
}

TorusTransform make_torus_transform(const TorusModes& modes) {
  TorusTransform t;
  t.modes = modes;
  for (int a = 0; a < 3; ++a) t.n[a] = 2 * modes.M[a] + 1;
  return t;
}

}  // namespace boltzlab
