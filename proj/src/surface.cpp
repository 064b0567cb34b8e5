#include "mcflab/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "fd.hpp"

namespace mcflab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

DerivativeNorms nan_norms() {
  DerivativeNorms d;
  d.fill(kNaN);
  return d;
}

DerivativeNorms zero_norms(int kmax) {
  DerivativeNorms d = nan_norms();
  for (int k = 1; k <= kmax; ++k) d[k] = 0.0;
  return d;
}

void identity_frame(SampledSurface& S) {
  S.frame = Eigen::MatrixXd::Identity(S.n + 1, S.n + 1);
  S.origin = Eigen::VectorXd::Zero(S.n + 1);
}

void resize(SampledSurface& S, size_t N) {
  for (auto* v : {&S.s, &S.z, &S.r, &S.nz, &S.nr, &S.k1, &S.k2}) v->assign(N, 0.0);
}

// Unit-spacing Fornberg weights on offsets -m..m, orders 0..m_ord.
const std::vector<std::vector<double>>& centered_weights(int m, int max_order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::vector<std::vector<double>>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(m, max_order);
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<double> xs(2 * m + 1);
    for (int k = 0; k <= 2 * m; ++k) xs[k] = double(k - m);
    it = cache.emplace(key, detail::fornberg(0.0, xs, max_order)).first;
  }
  return it->second;
}

// Arclength jets of the curvature data from jets of the raw representation:
// graph rho(x) (A = rho) or parametric (A = z(u), B = r(u)).
MeridianJets data_jets(const Jet& A, const Jet& B, bool graph, int kmax) {
  Jet k_ax, k_rot, psi, speed;
  if (graph) {
    Jet R1 = A.diff(), R2 = R1.diff();
    Jet w = sqrt(1.0 + R1 * R1);
    k_ax = -(R2 / (w * w * w));
    k_rot = 1.0 / (A * w);
    psi = R1 / (w * A);
    speed = w;
  } else {
    Jet zu = A.diff(), ru = B.diff(), zuu = zu.diff(), ruu = ru.diff();
    Jet g = sqrt(zu * zu + ru * ru);
    k_ax = (zuu * ru - ruu * zu) / (g * g * g);
    k_rot = zu / (g * B);
    psi = ru / (g * B);
    speed = g;
  }
  Jet u = reverse(speed.integral(0.0));
  MeridianJets out;
  out.k_axial = compose(k_ax, u).truncated(kmax + 1);
  out.k_rot = compose(k_rot, u).truncated(kmax + 1);
  out.psi = compose(psi, u).truncated(kmax + 1);
  return out;
}

}  // namespace

const char* to_string(EndKind e) {
  switch (e) {
    case EndKind::pole: return "pole";
    case EndKind::open: return "open";
    default: return "extends";
  }
}

Eigen::VectorXd SampledSurface::position(size_t i, int j, double sign) const {
  return origin + z[i] * frame.col(0) + sign * r[i] * frame.col(j);
}

Eigen::VectorXd SampledSurface::normal(size_t i, int j, double sign) const {
  return nz[i] * frame.col(0) + sign * nr[i] * frame.col(j);
}

double SampledSurface::spacing(size_t i) const {
  double a = i > 0 ? s[i] - s[i - 1] : 0.0;
  double b = i + 1 < size() ? s[i + 1] - s[i] : 0.0;
  return std::max(a, b);
}

double SampledSurface::max_spacing() const {
  double m = 0.0;
  for (size_t i = 1; i < size(); ++i) m = std::max(m, s[i] - s[i - 1]);
  return m;
}

void SampledSurface::validate() const {
  const size_t N = size();
  if (n < 2 || N < 3) throw PreconditionError("neck_analysis", "surface", "need n >= 2 and at least 3 samples");
  for (auto* v : {&z, &r, &nz, &nr, &k1, &k2})
    if (v->size() != N) throw PreconditionError("neck_analysis", "surface", "sample arrays differ in length");
  if (!dnorms.empty() && dnorms.size() != N) throw PreconditionError("neck_analysis", "surface", "derivative norms misaligned");
  for (size_t i = 1; i < N; ++i)
    if (!(s[i] > s[i - 1])) throw PreconditionError("neck_analysis", "surface", "arclength must increase");
  if (frame.rows() != n + 1 || frame.cols() != n + 1 || origin.size() != n + 1)
    throw PreconditionError("neck_analysis", "surface", "frame has wrong shape");
}

SampledSurface::Range SampledSurface::ball(size_t i, double rad) const {
  Range g;
  double lo = s[i] - rad, hi = s[i] + rad;
  g.lo = size_t(std::lower_bound(s.begin(), s.end(), lo) - s.begin());
  g.hi = size_t(std::upper_bound(s.begin(), s.end(), hi) - s.begin());
  g.hi = g.hi == 0 ? 0 : g.hi - 1;
  if (lo < s.front() && start == EndKind::open) g.covered = false;
  if (hi > s.back() && end == EndKind::open) g.covered = false;
  return g;
}

SampledSurface SampledSurface::transformed(const Eigen::MatrixXd& R, const Eigen::VectorXd& t) const {
  if (R.rows() != n + 1 || R.cols() != n + 1 || t.size() != n + 1)
    throw PreconditionError("neck_analysis", "transformed", "rigid motion has wrong dimension");
  if ((R.transpose() * R - Eigen::MatrixXd::Identity(n + 1, n + 1)).cwiseAbs().maxCoeff() > 1e-10)
    throw PreconditionError("neck_analysis", "transformed", "rotation is not orthogonal");
  SampledSurface out = *this;
  out.frame = R * frame;
  out.origin = R * origin + t;
  return out;
}

SampledSurface SampledSurface::scaled(double f) const {
  if (!(f > 0)) throw PreconditionError("neck_analysis", "scaled", "scale must be positive");
  SampledSurface out = *this;
  for (size_t i = 0; i < size(); ++i) {
    out.s[i] *= f;
    out.z[i] *= f;
    out.r[i] *= f;
    out.k1[i] /= f;
    out.k2[i] /= f;
    for (int k = 1; k <= kMaxDerivativeOrder; ++k) out.dnorms[i][k] /= std::pow(f, k + 1);
  }
  out.origin *= f;
  return out;
}

SampledSurface sphere_surface(int n, double R, size_t N) {
  if (n < 2 || !(R > 0) || N < 3) throw PreconditionError("model_solutions", "sphere_surface", "invalid parameters");
  SampledSurface S;
  S.n = n;
  S.source = "sphere";
  resize(S, N);
  for (size_t i = 0; i < N; ++i) {
    double phi = M_PI * double(i) / double(N - 1);
    S.s[i] = R * phi;
    S.z[i] = -R * std::cos(phi);
    S.r[i] = i + 1 == N ? 0.0 : R * std::sin(phi);
    S.nz[i] = -std::cos(phi);
    S.nr[i] = i + 1 == N ? 0.0 : std::sin(phi);
    S.k1[i] = S.k2[i] = 1.0 / R;
  }
  S.start = S.end = EndKind::pole;
  S.kmax = kMaxDerivativeOrder;
  S.dnorms.assign(N, zero_norms(S.kmax));
  identity_frame(S);
  return S;
}

SampledSurface cylinder_surface(int n, double R, double half_length, size_t N) {
  if (n < 2 || !(R > 0) || !(half_length > 0) || N < 3)
    throw PreconditionError("model_solutions", "cylinder_surface", "invalid parameters");
  SampledSurface S;
  S.n = n;
  S.source = "cylinder";
  resize(S, N);
  for (size_t i = 0; i < N; ++i) {
    double x = -half_length + 2.0 * half_length * double(i) / double(N - 1);
    S.s[i] = x + half_length;
    S.z[i] = x;
    S.r[i] = R;
    S.nz[i] = 0.0;
    S.nr[i] = 1.0;
    S.k1[i] = 0.0;
    S.k2[i] = 1.0 / R;
  }
  S.start = S.end = EndKind::extends;
  S.kmax = kMaxDerivativeOrder;
  S.dnorms.assign(N, zero_norms(S.kmax));
  identity_frame(S);
  return S;
}

SampledSurface bowl_surface(const BowlProfile& b, int kmax, size_t stride) {
  if (stride < 1 || kmax < 1 || kmax > kMaxDerivativeOrder)
    throw PreconditionError("model_solutions", "bowl_surface", "invalid stride or derivative order");
  SampledSurface S;
  S.n = b.n;
  S.source = "bowl";
  std::vector<size_t> idx;
  for (size_t i = 0; i < b.r.size(); i += stride) idx.push_back(i);
  resize(S, idx.size());
  std::vector<MeridianJets> jets;
  std::vector<size_t> where;
  // Taylor-mode jets of the translator ODE are exact near the tip but amplify
  // its stiff mode by (r/(n-1))^(k+1) further out; the tail uses wide
  // finite-difference stencils on u(r) instead.
  const double exclusion = 0.06 * (b.n - 1);
  const double r_switch = 10.0 * (b.n - 1);
  const int D = kmax + 2;
  const int m = kmax <= 2 ? 4 : 8;
  const auto& W = centered_weights(m, D);
  const long M = long(b.r.size());
  for (size_t j = 0; j < idx.size(); ++j) {
    size_t i = idx[j];
    double w = std::sqrt(1.0 + b.p[i] * b.p[i]);
    double c = 1.0 / w, sn = b.p[i] / w;
    S.s[j] = b.s[i];
    S.z[j] = b.u[i];
    S.r[j] = b.r[i];
    S.nz[j] = -c;
    S.nr[j] = sn;
    S.k1[j] = b.k_axial(i);
    S.k2[j] = b.k_rot(i);
    if (b.s[i] < exclusion) continue;
    if (b.r[i] < r_switch) {
      jets.push_back(bowl_meridian_jets(b.n, b.r[i], std::atan(b.p[i]), kmax));
      where.push_back(j);
      continue;
    }
    double ell = 1.0 / std::max(S.k1[j], S.k2[j]);
    long st = std::max(1L, std::lround(0.15 * ell * c / b.step));
    if (long(i) + m * st > M - 1) continue;
    Jet A(D + 1), B = Jet::variable(D + 1, b.r[i]);
    double h = double(st) * b.step, hk = 1.0, fact = 1.0;
    for (int k = 0; k <= D; ++k) {
      if (k > 0) {
        hk *= h;
        fact *= k;
      }
      double acc = 0.0;
      for (int q = -m; q <= m; ++q) acc += W[k][q + m] * b.u[i + q * st];
      A[k] = acc / (hk * fact);
    }
    jets.push_back(data_jets(A, B, false, kmax));
    where.push_back(j);
  }
  S.kmax = kmax;
  S.dnorms.assign(idx.size(), nan_norms());
  auto norms = covariant_derivative_norms(jets, b.n, kmax);
  for (size_t q = 0; q < where.size(); ++q) S.dnorms[where[q]] = norms[q];
  S.start = EndKind::pole;
  S.end = EndKind::open;
  identity_frame(S);
  return S;
}

bool profile_meridian_jets(const RotSymProfile& p, size_t i, const JetOptions& opt, MeridianJets& out,
                           double stride_factor) {
  const int kmax = opt.kmax;
  if (kmax < 1 || kmax > kMaxDerivativeOrder) throw PreconditionError("rotsym_flow", "derivative_norms", "k must be in 1..8");
  const int D = kmax + 2;
  const int m = kmax <= 2 ? 4 : 8;
  const long N = long(p.size());
  const bool caps = p.boundary == Boundary::closed_caps;
  MeridianPoint mp = meridian_point(p, i);
  const double ell = 1.0 / std::max(std::abs(mp.k_axial), std::abs(mp.k_rot));
  if (caps && (i == 0 || long(i) == N - 1 || p.rho[i] < opt.pole_exclusion * ell)) return false;
  const long stride = std::max(1L, std::lround(opt.stencil_scale * stride_factor * ell / p.dx));
  const auto& W = centered_weights(m, D);
  std::vector<double> fa(2 * m + 1), fb(2 * m + 1);
  for (int j = -m; j <= m; ++j) {
    long k = long(i) + j * stride;
    if (p.boundary == Boundary::periodic) {
      fa[j + m] = p.rho[((k % N) + N) % N];
    } else if (p.boundary == Boundary::clamped) {
      if (k < 0 || k > N - 1) return false;
      fa[j + m] = p.rho[k];
    } else {
      if (k < -(N - 1) || k > 2 * (N - 1)) return false;
      if (k < 0) {
        fa[j + m] = p.x[-k];
        fb[j + m] = -p.rho[-k];
      } else if (k > N - 1) {
        fa[j + m] = p.x[2 * (N - 1) - k];
        fb[j + m] = -p.rho[2 * (N - 1) - k];
      } else {
        fa[j + m] = p.x[k];
        fb[j + m] = p.rho[k];
      }
    }
  }
  const double h = caps ? double(stride) : double(stride) * p.dx;
  Jet A(D + 1), B(D + 1);
  double hk = 1.0, fact = 1.0;
  for (int k = 0; k <= D; ++k) {
    if (k > 0) {
      hk *= h;
      fact *= k;
    }
    double sa = 0.0, sb = 0.0;
    for (int j = 0; j <= 2 * m; ++j) {
      sa += W[k][j] * fa[j];
      sb += W[k][j] * fb[j];
    }
    A[k] = sa / (hk * fact);
    B[k] = sb / (hk * fact);
  }
  out = data_jets(A, B, !caps, kmax);
  return true;
}

SampledSurface profile_surface(const RotSymProfile& p, const JetOptions& opt, int periods) {
  p.validate();
  if (periods < 1 || (periods > 1 && p.boundary != Boundary::periodic))
    throw PreconditionError("rotsym_flow", "profile_surface", "periods > 1 needs a periodic profile");
  const size_t N = p.size();
  std::vector<double> s = arclength(p);
  const double period_len = p.boundary == Boundary::periodic ? s[N] : 0.0;
  std::vector<MeridianPoint> mp(N);
  std::vector<MeridianJets> jets;
  std::vector<size_t> where;
  for (size_t i = 0; i < N; ++i) {
    mp[i] = meridian_point(p, i);
    MeridianJets j;
    if (profile_meridian_jets(p, i, opt, j)) {
      jets.push_back(j);
      where.push_back(i);
    }
  }
  std::vector<DerivativeNorms> base(N, nan_norms());
  auto norms = covariant_derivative_norms(jets, p.n, opt.kmax);
  for (size_t q = 0; q < where.size(); ++q) base[where[q]] = norms[q];

  SampledSurface S;
  S.n = p.n;
  S.source = std::string("profile:") + to_string(p.boundary);
  const size_t M = N * size_t(periods);
  resize(S, M);
  S.dnorms.resize(M);
  for (int c = 0; c < periods; ++c)
    for (size_t i = 0; i < N; ++i) {
      size_t j = size_t(c) * N + i;
      S.s[j] = s[i] + c * period_len;
      S.z[j] = p.x[i] + c * p.period();
      S.r[j] = p.rho[i];
      S.nz[j] = mp[i].nz;
      S.nr[j] = mp[i].nr;
      S.k1[j] = mp[i].k_axial;
      S.k2[j] = mp[i].k_rot;
      S.dnorms[j] = base[i];
    }
  S.kmax = opt.kmax;
  if (p.boundary == Boundary::closed_caps) S.start = S.end = EndKind::pole;
  identity_frame(S);
  return S;
}

}  // namespace mcflab
