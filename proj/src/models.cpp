#include "mcflab/models.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "mcflab/error.hpp"
#include "fd.hpp"

namespace mcflab {

double sphere_radius(int n, double r0, double t) {
  double a = r0 * r0 - 2.0 * n * t;
  if (n < 2 || !(r0 > 0) || !(a > 0))
    throw PreconditionError("model_solutions", "sphere_spectrum", "extinct or invalid sphere");
  return std::sqrt(a);
}

double cylinder_radius(int n, double r0, double t) {
  double a = r0 * r0 - 2.0 * (n - 1) * t;
  if (n < 2 || !(r0 > 0) || !(a > 0))
    throw PreconditionError("model_solutions", "cylinder_spectrum", "extinct or invalid cylinder");
  return std::sqrt(a);
}

double ModelSurface::radius() const {
  switch (kind) {
    case ModelKind::sphere: return sphere_radius(n, r0, t);
    case ModelKind::cylinder: return cylinder_radius(n, r0, t);
    default: throw PreconditionError("model_solutions", "radius", "bowl has no radius");
  }
}

CurvatureSpectrum sphere_spectrum(int n, double r0, double t) {
  double r = sphere_radius(n, r0, t);
  return spectrum_from_values(std::vector<double>(n, 1.0 / r));
}

CurvatureSpectrum cylinder_spectrum(int n, double r0, double t) {
  double r = cylinder_radius(n, r0, t);
  return rotational_spectrum(n, 0.0, 1.0 / r);
}

std::vector<double> bowl_series_coefficients(int n) {
  const double N = n;
  double a = 1.0 / N;
  double b = 1.0 / (std::pow(N, 3) * (N + 2));
  double c = -(N - 3) / (std::pow(N, 5) * (N + 2) * (N + 4));
  double d = (N * N * N - 6 * N * N - 8 * N + 30) / (std::pow(N, 7) * (N + 2) * (N + 2) * (N + 4) * (N + 6));
  return {a, b, c, d};
}

double BowlProfile::k_axial(size_t i) const { return upp[i] / std::pow(1.0 + p[i] * p[i], 1.5); }

double BowlProfile::k_rot(size_t i) const {
  if (r[i] == 0.0) return upp[i];
  return p[i] / (r[i] * std::sqrt(1.0 + p[i] * p[i]));
}

CurvatureSpectrum BowlProfile::spectrum(size_t i) const { return rotational_spectrum(n, k_axial(i), k_rot(i)); }

namespace {

// y = (u, p, s); graph form of H = <nu, omega> for a rotational graph.
struct BowlRhs {
  int n;
  std::array<double, 3> operator()(double r, const std::array<double, 3>& y) const {
    double p = y[1];
    double w = 1.0 + p * p;
    return {p, w * (1.0 - (n - 1) * p / r), std::sqrt(w)};
  }
};

// Dormand-Prince 5(4) step; returns the error estimate.
double dopri_step(const BowlRhs& f, double r, const std::array<double, 3>& y, double h, std::array<double, 3>& out) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  std::array<double, 3> k1, k2, k3, k4, k5, k6, k7, t;
  auto comb = [&](std::initializer_list<std::pair<double, const std::array<double, 3>*>> terms) {
    std::array<double, 3> r0 = y;
    for (auto& [c, k] : terms)
      for (int i = 0; i < 3; ++i) r0[i] += h * c * (*k)[i];
    return r0;
  };
  k1 = f(r, y);
  t = comb({{a21, &k1}});
  k2 = f(r + c2 * h, t);
  t = comb({{a31, &k1}, {a32, &k2}});
  k3 = f(r + c3 * h, t);
  t = comb({{a41, &k1}, {a42, &k2}, {a43, &k3}});
  k4 = f(r + c4 * h, t);
  t = comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
  k5 = f(r + c5 * h, t);
  t = comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
  k6 = f(r + h, t);
  out = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
  k7 = f(r + h, out);
  double err = 0.0;
  for (int i = 0; i < 3; ++i) {
    double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double sc = 1e-13 + 1e-13 * std::max(std::abs(y[i]), std::abs(out[i]));
    err = std::max(err, std::abs(e) / sc);
  }
  return err;
}

}  // namespace

BowlProfile bowl_profile(int n, double r_max, double step) {
  if (n < 2) throw PreconditionError("model_solutions", "bowl_profile", "n must be >= 2");
  if (!(r_max > 0) || !(step > 0)) throw PreconditionError("model_solutions", "bowl_profile", "r_max and step must be positive");
  if (step > r_max / 1e3 * (1.0 + 1e-12))
    throw PreconditionError("model_solutions", "bowl_profile", "step too coarse: need step <= r_max/1000");
  const auto co = bowl_series_coefficients(n);
  const long M = std::lround(r_max / step);
  BowlProfile b;
  b.n = n;
  b.step = step;
  b.r.resize(M + 1);
  b.u.resize(M + 1);
  b.p.resize(M + 1);
  b.upp.resize(M + 1);
  b.s.resize(M + 1);
  BowlRhs f{n};
  auto series = [&](double r, double& u, double& p, double& s) {
    double r2 = r * r;
    p = r * (co[0] + r2 * (co[1] + r2 * (co[2] + r2 * co[3])));
    u = r2 * (co[0] / 2 + r2 * (co[1] / 4 + r2 * (co[2] / 6 + r2 * co[3] / 8)));
    // arclength of the seed arc by 8-point Gauss-Legendre
    static const double x8[4] = {0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363};
    static const double w8[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    s = 0.0;
    for (int k = 0; k < 4; ++k)
      for (int sg : {-1, 1}) {
        double q = 0.5 * r * (1.0 + sg * x8[k]);
        double q2 = q * q;
        double pq = q * (co[0] + q2 * (co[1] + q2 * (co[2] + q2 * co[3])));
        s += 0.5 * r * w8[k] * std::sqrt(1.0 + pq * pq);
      }
  };
  // Seed region: the series residual grows like r^8, so the seed stops at
  // 0.1 n even when 10 steps reach further.
  const double r_seed = std::min(10.0 * step, 0.1 * n);
  long i = 0;
  for (; i <= M && i * step <= r_seed * (1 + 1e-12); ++i) {
    b.r[i] = i * step;
    series(b.r[i], b.u[i], b.p[i], b.s[i]);
  }
  std::array<double, 3> y;
  series(r_seed, y[0], y[1], y[2]);
  double r = r_seed, h = step / 4;
  for (; i <= M; ++i) {
    const double target = i * step;
    while (r < target) {
      double hh = std::min(h, target - r);
      std::array<double, 3> out;
      double err = dopri_step(f, r, y, hh, out);
      if (err <= 1.0) {
        r = (target - r - hh < 1e-14 * target) ? target : r + hh;
        y = out;
        h = hh * std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
      } else {
        h = hh * std::max(0.1, 0.9 * std::pow(err, -0.2));
      }
      if (h < 1e-14 * target) throw PreconditionError("model_solutions", "bowl_profile", "integrator stalled");
    }
    b.r[i] = target;
    b.u[i] = y[0];
    b.p[i] = y[1];
    b.s[i] = y[2];
  }
  for (long i = 0; i <= M; ++i) {
    b.upp[i] = (i == 0) ? 1.0 / n : f(b.r[i], {b.u[i], b.p[i], b.s[i]})[1];
    if (!(b.k_axial(i) > 0.0))
      throw PreconditionError("model_solutions", "bowl_profile",
                              "convexity lost at r = " + std::to_string(b.r[i]));
  }
  // ODE residual on the returned grid: 12th-order differences of p, using
  // the odd reflection p(-r) = -p(r) at the tip and one-sided stencils at r_max.
  const int m = 6;
  std::vector<std::vector<double>> wts(2 * m + 1);
  for (int j = 0; j <= 2 * m; ++j) {
    std::vector<double> xs(2 * m + 1);
    for (int k = 0; k <= 2 * m; ++k) xs[k] = double(k - j);
    wts[j] = detail::fornberg(0.0, xs, 1)[1];
  }
  for (long i = 0; i <= M; ++i) {
    long first = std::min<long>(i - m, M - 2 * m);
    const auto& w = wts[i - first];
    double dp = 0.0;
    for (int k = 0; k <= 2 * m; ++k) {
      long idx = first + k;
      dp += w[k] * (idx < 0 ? -b.p[-idx] : b.p[idx]);
    }
    dp /= step;
    b.max_residual = std::max(b.max_residual, std::abs(dp - b.upp[i]) / std::max(1.0, std::abs(b.upp[i])));
  }
  return b;
}

RotSymProfile bowl_axial_profile(const BowlProfile& b, double r_lo, double r_hi, size_t N) {
  const double rmax = b.r.back();
  if (!(r_lo > 0) || !(r_hi > r_lo) || r_hi > rmax || N < 7)
    throw PreconditionError("model_solutions", "bowl_axial_profile", "need 0 < r_lo < r_hi <= r_max and N >= 7");
  // Quintic Hermite u(r) on a grid cell from (u, u', u'').
  auto eval = [&](double r, double& u, double& du) {
    size_t i = std::min(size_t(r / b.step), b.r.size() - 2);
    double h = b.step, t = (r - b.r[i]) / h;
    double y0 = b.u[i], y1 = b.u[i + 1], d0 = b.p[i] * h, d1 = b.p[i + 1] * h, c0 = b.upp[i] * h * h,
           c1 = b.upp[i + 1] * h * h;
    double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    double h0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, h1 = t - 6 * t3 + 8 * t4 - 3 * t5, h2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
    double h5 = 10 * t3 - 15 * t4 + 6 * t5, h4 = -4 * t3 + 7 * t4 - 3 * t5, h3 = 0.5 * (t3 - 2 * t4 + t5);
    u = h0 * y0 + h1 * d0 + h2 * c0 + h3 * c1 + h4 * d1 + h5 * y1;
    double g0 = -30 * t2 + 60 * t3 - 30 * t4, g1 = 1 - 18 * t2 + 32 * t3 - 15 * t4, g2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
    double g5 = -g0, g4 = -12 * t2 + 28 * t3 - 15 * t4, g3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    du = (g0 * y0 + g1 * d0 + g2 * c0 + g3 * c1 + g4 * d1 + g5 * y1) / h;
  };
  double u_lo, u_hi, d;
  eval(r_lo, u_lo, d);
  eval(r_hi, u_hi, d);
  RotSymProfile p;
  p.n = b.n;
  p.boundary = Boundary::clamped;
  p.dx = (u_hi - u_lo) / double(N - 1);
  p.x.resize(N);
  p.rho.resize(N);
  double r = r_lo;
  for (size_t i = 0; i < N; ++i) {
    double x = u_lo + double(i) * p.dx;
    for (int it = 0; it < 50; ++it) {
      double u, du;
      eval(r, u, du);
      double step = (u - x) / du;
      r = std::clamp(r - step, 0.0, rmax);
      if (std::abs(step) < 1e-15 * std::max(1.0, r)) break;
    }
    p.x[i] = x;
    p.rho[i] = r;
  }
  return p;
}

MeridianJets bowl_meridian_jets(int n, double r0, double th0, int kmax) {
  const int m = kmax + 2;
  Jet r(m, r0), th(m, th0);
  for (int k = 0; k + 1 < m; ++k) {
    Jet rk = r.truncated(k + 1), tk = th.truncated(k + 1);
    Jet s, c;
    sincos(tk, s, c);
    Jet rhs = c - (s / rk) * double(n - 1);
    r[k + 1] = c[k] / (k + 1);
    th[k + 1] = rhs[k] / (k + 1);
  }
  Jet s, c;
  sincos(th, s, c);
  MeridianJets j;
  j.k_axial = th.diff();
  j.k_rot = (s / r).truncated(kmax + 1);
  j.psi = (c / r).truncated(kmax + 1);
  return j;
}

}  // namespace mcflab
