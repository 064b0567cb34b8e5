#include "mcflab/profile.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fd.hpp"

namespace mcflab {

namespace {

constexpr double kSlopeLimit = 1e6;

const std::vector<std::vector<double>>& one_sided_weights(int offset_index) {
  // Six-point stencils at node offsets {0..5} - j for the first two nodes of a
  // clamped grid (j = 0, 1); second-derivative and first-derivative rows.
  static const auto table = [] {
    std::vector<std::vector<std::vector<double>>> t(2);
    for (int j = 0; j < 2; ++j) {
      std::vector<double> xs(6);
      for (int k = 0; k < 6; ++k) xs[k] = double(k - j);
      t[j] = detail::fornberg(0.0, xs, 2);
    }
    return t;
  }();
  return table[offset_index];
}

struct Derivs {
  double d1 = 0, d2 = 0;
};

// rho' and rho'' of a graph profile, 4th order.
Derivs graph_derivs(const RotSymProfile& p, size_t i) {
  const long N = long(p.size());
  const auto& r = p.rho;
  const double h = p.dx;
  long ii = long(i);
  if (p.boundary == Boundary::periodic) {
    auto at = [&](long k) { return r[((k % N) + N) % N]; };
    double d1 = (at(ii - 2) - 8 * at(ii - 1) + 8 * at(ii + 1) - at(ii + 2)) / (12 * h);
    double d2 = (-at(ii - 2) + 16 * at(ii - 1) - 30 * at(ii) + 16 * at(ii + 1) - at(ii + 2)) / (12 * h * h);
    return {d1, d2};
  }
  if (ii >= 2 && ii <= N - 3) {
    double d1 = (r[ii - 2] - 8 * r[ii - 1] + 8 * r[ii + 1] - r[ii + 2]) / (12 * h);
    double d2 = (-r[ii - 2] + 16 * r[ii - 1] - 30 * r[ii] + 16 * r[ii + 1] - r[ii + 2]) / (12 * h * h);
    return {d1, d2};
  }
  bool left = ii < 2;
  int j = left ? int(ii) : int(N - 1 - ii);
  const auto& w = one_sided_weights(j);
  double d1 = 0, d2 = 0;
  for (int k = 0; k < 6; ++k) {
    long idx = left ? long(k) : N - 1 - k;
    double sgn = left ? 1.0 : -1.0;
    d1 += sgn * w[1][k] * r[idx];
    d2 += w[2][k] * r[idx];
  }
  return {d1 / h, d2 / (h * h)};
}

// Closed caps: reflected node values (z even, r odd about each pole).
inline void node_zr(const RotSymProfile& p, long k, double& z, double& r) {
  const long N = long(p.size());
  if (k < 0) {
    z = p.x[-k];
    r = -p.rho[-k];
  } else if (k > N - 1) {
    long m = 2 * (N - 1) - k;
    z = p.x[m];
    r = -p.rho[m];
  } else {
    z = p.x[k];
    r = p.rho[k];
  }
}

struct ParamDerivs {
  double zu = 0, ru = 0, zuu = 0, ruu = 0;
};

ParamDerivs param_derivs(const RotSymProfile& p, size_t i) {
  double z[5], r[5];
  for (int k = -2; k <= 2; ++k) node_zr(p, long(i) + k, z[k + 2], r[k + 2]);
  ParamDerivs d;
  d.zu = (z[0] - 8 * z[1] + 8 * z[3] - z[4]) / 12;
  d.ru = (r[0] - 8 * r[1] + 8 * r[3] - r[4]) / 12;
  d.zuu = (-z[0] + 16 * z[1] - 30 * z[2] + 16 * z[3] - z[4]) / 12;
  d.ruu = (-r[0] + 16 * r[1] - 30 * r[2] + 16 * r[3] - r[4]) / 12;
  return d;
}

}  // namespace

const char* to_string(Boundary b) {
  switch (b) {
    case Boundary::periodic: return "periodic";
    case Boundary::closed_caps: return "closed-caps";
    default: return "clamped";
  }
}

double RotSymProfile::max_rho() const { return rho.empty() ? 0.0 : *std::max_element(rho.begin(), rho.end()); }

void RotSymProfile::validate() const {
  if (n < 2) throw PreconditionError("rotsym_flow", "profile", "n must be >= 2");
  if (rho.size() != x.size() || rho.size() < 7) throw PreconditionError("rotsym_flow", "profile", "need >= 7 nodes with matching x");
  if (!(dx > 0)) throw PreconditionError("rotsym_flow", "profile", "dx must be positive");
  size_t lo = 0, hi = rho.size();
  if (boundary == Boundary::closed_caps) {
    if (rho.front() != 0.0 || rho.back() != 0.0)
      throw PreconditionError("rotsym_flow", "profile", "closed caps need rho = 0 at both ends");
    lo = 1;
    hi = rho.size() - 1;
  }
  for (size_t i = lo; i < hi; ++i)
    if (!(rho[i] > 0)) throw PreconditionError("rotsym_flow", "profile", "rho must be positive at node " + std::to_string(i));
}

MeridianPoint meridian_point(const RotSymProfile& p, size_t i) {
  if (i >= p.size()) throw PreconditionError("rotsym_flow", "curvature_at", "index out of range");
  MeridianPoint m;
  m.z = p.x[i];
  m.r = p.rho[i];
  if (p.boundary != Boundary::closed_caps) {
    Derivs d = graph_derivs(p, i);
    if (std::abs(d.d1) > kSlopeLimit)
      throw PreconditionError("rotsym_flow", "curvature_at", "grid too coarse: slope exceeds 1e6 at node " + std::to_string(i));
    double w = std::sqrt(1.0 + d.d1 * d.d1);
    m.nz = -d.d1 / w;
    m.nr = 1.0 / w;
    m.k_axial = -d.d2 / (w * w * w);
    m.k_rot = 1.0 / (p.rho[i] * w);
    return m;
  }
  ParamDerivs d = param_derivs(p, i);
  double g = std::hypot(d.zu, d.ru);
  if (!(g > 1e-14 * p.dx)) throw PreconditionError("rotsym_flow", "curvature_at", "degenerate parametrization at node " + std::to_string(i));
  m.nz = -d.ru / g;
  m.nr = d.zu / g;
  m.k_axial = (d.zuu * d.ru - d.ruu * d.zu) / (g * g * g);
  bool pole = (i == 0 || i + 1 == p.size());
  m.k_rot = pole ? m.k_axial : d.zu / (g * p.rho[i]);
  return m;
}

CurvatureSpectrum curvature_at(const RotSymProfile& p, size_t i) {
  MeridianPoint m = meridian_point(p, i);
  return rotational_spectrum(p.n, m.k_axial, m.k_rot);
}

std::vector<double> arclength(const RotSymProfile& p) {
  const size_t N = p.size();
  std::vector<double> w(N), wp(N), s(N, 0.0);
  double h = 1.0;
  for (size_t i = 0; i < N; ++i) {
    if (p.boundary == Boundary::closed_caps) {
      ParamDerivs d = param_derivs(p, i);
      w[i] = std::hypot(d.zu, d.ru);
      wp[i] = (d.zu * d.zuu + d.ru * d.ruu) / w[i];
    } else {
      Derivs d = graph_derivs(p, i);
      w[i] = std::sqrt(1 + d.d1 * d.d1);
      wp[i] = d.d1 * d.d2 / w[i];
      h = p.dx;
    }
  }
  for (size_t i = 1; i < N; ++i)
    s[i] = s[i - 1] + 0.5 * h * (w[i - 1] + w[i]) + h * h / 12.0 * (wp[i - 1] - wp[i]);
  if (p.boundary == Boundary::periodic)
    s.push_back(s[N - 1] + 0.5 * h * (w[N - 1] + w[0]) + h * h / 12.0 * (wp[N - 1] - wp[0]));
  return s;
}

NeckMin neck_minimum(const RotSymProfile& p) {
  NeckMin best;
  const size_t N = p.size();
  if (p.boundary != Boundary::closed_caps) {
    auto it = std::min_element(p.rho.begin(), p.rho.end());
    best.index = size_t(it - p.rho.begin());
    best.rho = *it;
    best.x = p.x[best.index];
    best.found = true;
    return best;
  }
  for (size_t i = 2; i + 2 < N; ++i) {
    if (p.rho[i] <= p.rho[i - 1] && p.rho[i] <= p.rho[i + 1] && (!best.found || p.rho[i] < best.rho)) {
      best.found = true;
      best.rho = p.rho[i];
      best.index = i;
      best.x = p.x[i];
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Stepping

struct FlowStepper::Cache {
  size_t N = 0;
  Boundary boundary = Boundary::periodic;
  double c = -1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_a, lu_b;  // graph: a; caps: a = z, b = r
};

FlowStepper::FlowStepper(FlowOptions opt) : opt_(opt), cache_(std::make_unique<Cache>()) {}
FlowStepper::~FlowStepper() = default;
FlowStepper::FlowStepper(FlowStepper&&) noexcept = default;
FlowStepper& FlowStepper::operator=(FlowStepper&&) noexcept = default;

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Unit-spacing second-difference operator with the boundary treatment of p.
// parity: +1 even reflection (z), -1 odd (r); ignored for graphs.
Eigen::SparseMatrix<double> d2_matrix(const RotSymProfile& p, int parity) {
  const long N = long(p.size());
  Triplets t;
  static const double w5[5] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
  for (long i = 0; i < N; ++i) {
    if (p.boundary == Boundary::periodic) {
      for (int k = -2; k <= 2; ++k) t.emplace_back(i, ((i + k) % N + N) % N, w5[k + 2]);
    } else if (p.boundary == Boundary::clamped) {
      if (i == 0 || i == N - 1) continue;
      if (i >= 2 && i <= N - 3) {
        for (int k = -2; k <= 2; ++k) t.emplace_back(i, i + k, w5[k + 2]);
      } else {
        bool left = i < 2;
        int j = left ? int(i) : int(N - 1 - i);
        const auto& w = one_sided_weights(j);
        for (int k = 0; k < 6; ++k) t.emplace_back(i, left ? k : N - 1 - k, w[2][k]);
      }
    } else {
      if (parity < 0 && (i == 0 || i == N - 1)) continue;
      for (int k = -2; k <= 2; ++k) {
        long m = i + k;
        double sgn = 1.0;
        if (m < 0) {
          m = -m;
          sgn = parity;
        } else if (m > N - 1) {
          m = 2 * (N - 1) - m;
          sgn = parity;
        }
        t.emplace_back(i, m, sgn * w5[k + 2]);
      }
    }
  }
  Eigen::SparseMatrix<double> D(N, N);
  D.setFromTriplets(t.begin(), t.end());
  return D;
}

Eigen::SparseMatrix<double> implicit_matrix(const Eigen::SparseMatrix<double>& D, double c) {
  Eigen::SparseMatrix<double> I(D.rows(), D.cols());
  I.setIdentity();
  Eigen::SparseMatrix<double> M = I - c * D;
  M.makeCompressed();
  return M;
}

Eigen::VectorXd mul(const Eigen::SparseMatrix<double>& D, const std::vector<double>& v) {
  Eigen::Map<const Eigen::VectorXd> m(v.data(), Eigen::Index(v.size()));
  return D * m;
}

}  // namespace

RotSymProfile FlowStepper::step(const RotSymProfile& p, double dt) {
  p.validate();
  if (!(dt > 0)) throw PreconditionError("rotsym_flow", "step_mcf", "dt must be positive");
  if (rho_min_ <= 0) rho_min_ = opt_.rho_min > 0 ? opt_.rho_min : 1e-6 * p.max_rho();
  const size_t N = p.size();
  const bool caps = p.boundary == Boundary::closed_caps;
  const int n = p.n;
  // Unit-spacing diffusion scale of the implicit stabilizer.
  const double g = p.dx;
  const double a = caps ? double(n) / (g * g) : 1.0 / (g * g);
  if (opt_.scheme == Scheme::explicit_euler) {
    double limit = caps ? opt_.cfl * g * g / n : opt_.cfl * g * g;
    if (opt_.cfl > 0.25 || dt > limit * (1 + 1e-12))
      throw PreconditionError("rotsym_flow", "step_mcf", "explicit step violates dt <= cfl*dx^2 with cfl <= 0.25");
  }

  RotSymProfile out = p;
  out.time = p.time + dt;

  if (!caps) {
    std::vector<double> F(N, 0.0);
    for (size_t i = 0; i < N; ++i) {
      if (p.boundary == Boundary::clamped && (i == 0 || i + 1 == N)) continue;
      Derivs d = graph_derivs(p, i);
      F[i] = d.d2 / (1 + d.d1 * d.d1) - (n - 1) / p.rho[i];
    }
    if (opt_.scheme == Scheme::explicit_euler) {
      for (size_t i = 0; i < N; ++i) out.rho[i] = p.rho[i] + dt * F[i];
    } else {
      const double c = dt * a;
      auto& C = *cache_;
      Eigen::SparseMatrix<double> D = d2_matrix(p, 1);
      if (C.N != N || C.boundary != p.boundary || c > C.c * 1.1 || c < C.c / 1.1) {
        C.lu_a.compute(implicit_matrix(D, c));
        if (C.lu_a.info() != Eigen::Success) throw PreconditionError("rotsym_flow", "step_mcf", "factorization failed");
        C.N = N;
        C.boundary = p.boundary;
        C.c = c;
      }
      Eigen::VectorXd Dr = mul(D, p.rho);
      Eigen::VectorXd rhs(N);
      for (size_t i = 0; i < N; ++i) rhs[i] = p.rho[i] + dt * F[i] - C.c * Dr[i];
      Eigen::VectorXd y = C.lu_a.solve(rhs);
      for (size_t i = 0; i < N; ++i) out.rho[i] = y[i];
    }
    for (size_t i = 0; i < N; ++i)
      if (!(out.rho[i] > rho_min_))
        throw SingularityError("step_mcf", "radius reached rho_min at x = " + std::to_string(p.x[i]), p.x[i]);
    return out;
  }

  // Parametric meridian with tangential redistribution.
  std::vector<MeridianPoint> mp(N);
  std::vector<double> gi(N), tz(N), tr(N);
  for (size_t i = 0; i < N; ++i) {
    mp[i] = meridian_point(p, i);
    ParamDerivs d = param_derivs(p, i);
    gi[i] = std::hypot(d.zu, d.ru);
    tz[i] = d.zu / gi[i];
    tr[i] = d.ru / gi[i];
  }
  std::vector<double> s = arclength(p);
  const double Ltot = s.back();
  const double gbar = Ltot / double(N - 1);
  std::vector<double> hk(N);
  for (size_t i = 0; i < N; ++i) hk[i] = (mp[i].k_axial + (n - 1) * mp[i].k_rot) * mp[i].k_axial;
  double mean = 0.0;
  for (size_t i = 1; i < N; ++i) mean += 0.5 * (hk[i - 1] + hk[i]) * (s[i] - s[i - 1]);
  mean /= Ltot;
  const double omega = opt_.redistribution / dt;
  std::vector<double> f(N), alpha(N, 0.0);
  for (size_t i = 0; i < N; ++i) f[i] = hk[i] - mean - omega * (1.0 - gbar / gi[i]);
  for (size_t i = 1; i < N; ++i) alpha[i] = alpha[i - 1] + 0.5 * (f[i - 1] + f[i]) * (s[i] - s[i - 1]);
  const double drift = alpha.back();
  for (size_t i = 0; i < N; ++i) alpha[i] -= drift * s[i] / Ltot;
  alpha.front() = alpha.back() = 0.0;

  std::vector<double> Fz(N), Fr(N);
  for (size_t i = 0; i < N; ++i) {
    double H = mp[i].k_axial + (n - 1) * mp[i].k_rot;
    Fz[i] = -H * mp[i].nz + alpha[i] * tz[i];
    Fr[i] = -H * mp[i].nr + alpha[i] * tr[i];
  }
  Fr.front() = Fr.back() = 0.0;

  if (opt_.scheme == Scheme::explicit_euler) {
    for (size_t i = 0; i < N; ++i) {
      out.x[i] = p.x[i] + dt * Fz[i];
      out.rho[i] = p.rho[i] + dt * Fr[i];
    }
  } else {
    const double c = dt * a;
    auto& C = *cache_;
    Eigen::SparseMatrix<double> Dz = d2_matrix(p, 1), Dr = d2_matrix(p, -1);
    // The stabilizer only needs c above the stiffness of the explicit part;
    // reuse the factorization while c stays within 10% of the stored value.
    if (C.N != N || C.boundary != p.boundary || c > C.c * 1.1 || c < C.c / 1.1) {
      C.lu_a.compute(implicit_matrix(Dz, c));
      C.lu_b.compute(implicit_matrix(Dr, c));
      if (C.lu_a.info() != Eigen::Success || C.lu_b.info() != Eigen::Success)
        throw PreconditionError("rotsym_flow", "step_mcf", "factorization failed");
      C.N = N;
      C.boundary = p.boundary;
      C.c = c;
    }
    const double cc = C.c;
    Eigen::VectorXd DZ = mul(Dz, p.x), DR = mul(Dr, p.rho);
    Eigen::VectorXd rz(N), rr(N);
    for (size_t i = 0; i < N; ++i) {
      rz[i] = p.x[i] + dt * Fz[i] - cc * DZ[i];
      rr[i] = p.rho[i] + dt * Fr[i] - cc * DR[i];
    }
    rr[0] = 0.0;
    rr[N - 1] = 0.0;
    Eigen::VectorXd z = C.lu_a.solve(rz), r = C.lu_b.solve(rr);
    for (size_t i = 0; i < N; ++i) {
      out.x[i] = z[i];
      out.rho[i] = r[i];
    }
  }
  out.rho.front() = out.rho.back() = 0.0;
  for (size_t i = 1; i + 1 < N; ++i)
    if (!(out.rho[i] > rho_min_))
      throw SingularityError("step_mcf", "radius reached rho_min at z = " + std::to_string(p.x[i]), p.x[i]);
  double len = 0.0;
  for (size_t i = 1; i < N; ++i) len += std::hypot(out.x[i] - out.x[i - 1], out.rho[i] - out.rho[i - 1]);
  out.dx = len / double(N - 1);
  return out;
}

RotSymProfile step_mcf(const RotSymProfile& p, double dt, const FlowOptions& opt) {
  FlowStepper st(opt);
  return st.step(p, dt);
}

// ---------------------------------------------------------------------------
// Simulation driver

void FlowTrajectory::validate() const {
  for (size_t i = 0; i < snapshots.size(); ++i) {
    snapshots[i].validate();
    if (i > 0 && !(snapshots[i].time > snapshots[i - 1].time))
      throw PreconditionError("rotsym_flow", "trajectory", "snapshot times must increase");
  }
}

namespace {

double min_curvature_radius(const RotSymProfile& p, double* min_ratio_l1 = nullptr) {
  double kmax = 0.0, rl = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < p.size(); ++i) {
    MeridianPoint m = meridian_point(p, i);
    kmax = std::max({kmax, std::abs(m.k_axial), std::abs(m.k_rot)});
    double H = m.k_axial + (p.n - 1) * m.k_rot;
    double l1 = std::min(m.k_axial, m.k_rot);
    if (H > 0) rl = std::min(rl, l1 / H);
    else rl = std::min(rl, -1.0);
  }
  if (min_ratio_l1) *min_ratio_l1 = rl;
  return 1.0 / kmax;
}

}  // namespace

FlowTrajectory simulate(const RotSymProfile& initial, const FlowSettings& s) {
  initial.validate();
  if (!(s.t_end > initial.time)) throw PreconditionError("rotsym_flow", "simulate", "t_end must exceed the initial time");
  if (!(s.dt_max > 0) || !(s.dt_accuracy > 0)) throw PreconditionError("rotsym_flow", "simulate", "dt bounds must be positive");
  FlowTrajectory tr;
  FlowStepper stepper(s.options);
  RotSymProfile cur = initial;
  tr.snapshots.push_back(cur);
  NeckMin nm0 = neck_minimum(cur);
  double l1_0;
  min_curvature_radius(cur, &l1_0);
  const bool convex0 = l1_0 >= 0.0;
  bool convexity_reported = false;
  double next_snap = cur.time + s.snapshot_interval;
  const bool caps = cur.boundary == Boundary::closed_caps;
  while (cur.time < s.t_end - 1e-14 * std::max(1.0, std::abs(s.t_end))) {
    double ell = min_curvature_radius(cur);
    double dt = std::min({s.dt_max, s.dt_accuracy * ell * ell, s.t_end - cur.time});
    if (s.options.scheme == Scheme::explicit_euler)
      dt = std::min(dt, caps ? s.options.cfl * cur.dx * cur.dx / cur.n : s.options.cfl * cur.dx * cur.dx);
    RotSymProfile nxt;
    try {
      nxt = stepper.step(cur, dt);
    } catch (const SingularityError& e) {
      tr.events.push_back({cur.time, "min-radius-threshold", e.location()});
      break;
    }
    cur = std::move(nxt);
    tr.dts.push_back(dt);
    bool event = false;
    NeckMin nm = neck_minimum(cur);
    if (nm.found && s.min_radius_threshold > 0 && nm.rho <= s.min_radius_threshold) {
      tr.events.push_back({cur.time, "min-radius-threshold", nm.x});
      event = true;
    }
    if (nm.found && nm0.found && s.neck_ratio > 0 && nm.rho <= s.neck_ratio * nm0.rho) {
      tr.events.push_back({cur.time, "neck-formed", nm.x});
      event = true;
    }
    if (convex0 && !convexity_reported) {
      double l1;
      min_curvature_radius(cur, &l1);
      if (l1 < -1e-9) {
        tr.events.push_back({cur.time, "convexity-lost", 0.0});
        convexity_reported = true;
        event = true;
      }
    }
    bool last = cur.time >= s.t_end - 1e-14 * std::max(1.0, std::abs(s.t_end));
    if (s.snapshot_interval <= 0 || cur.time >= next_snap - 1e-12 * s.snapshot_interval || last || event) {
      tr.snapshots.push_back(cur);
      while (s.snapshot_interval > 0 && next_snap <= cur.time + 1e-12 * s.snapshot_interval) next_snap += s.snapshot_interval;
    }
    if (event && s.stop_on_event) break;
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Initial data

RotSymProfile cylinder_profile(int n, double r0, double length, size_t N, Boundary b) {
  if (b == Boundary::closed_caps) throw PreconditionError("rotsym_flow", "cylinder_profile", "cylinder has no caps");
  if (!(r0 > 0) || !(length > 0) || N < 7) throw PreconditionError("rotsym_flow", "cylinder_profile", "invalid parameters");
  RotSymProfile p;
  p.n = n;
  p.boundary = b;
  p.dx = b == Boundary::periodic ? length / double(N) : length / double(N - 1);
  p.x.resize(N);
  p.rho.assign(N, r0);
  for (size_t i = 0; i < N; ++i) p.x[i] = -0.5 * length + double(i) * p.dx;
  return p;
}

RotSymProfile periodic_profile(int n, double length, size_t N, const std::function<double(double)>& rho) {
  RotSymProfile p = cylinder_profile(n, 1.0, length, N, Boundary::periodic);
  for (size_t i = 0; i < N; ++i) p.rho[i] = rho(p.x[i]);
  p.validate();
  return p;
}

RotSymProfile closed_profile(int n, size_t N, const std::function<void(double, double&, double&)>& curve) {
  if (N < 9) throw PreconditionError("rotsym_flow", "closed_profile", "need at least 9 nodes");
  const double h = 1e-6;
  auto speed = [&](double phi) {
    double a = std::max(0.0, phi - h), b = std::min(M_PI, phi + h);
    double z0, r0, z1, r1;
    curve(a, z0, r0);
    curve(b, z1, r1);
    return std::hypot(z1 - z0, r1 - r0) / (b - a);
  };
  static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665, 0.2369268850561891};
  auto seg = [&](double a, double b) {
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) acc += gw[k] * speed(0.5 * (a + b) + 0.5 * (b - a) * gx[k]);
    return 0.5 * (b - a) * acc;
  };
  const size_t M = 40 * N;
  std::vector<double> S(M + 1, 0.0);
  for (size_t j = 0; j < M; ++j) S[j + 1] = S[j] + seg(M_PI * j / M, M_PI * (j + 1) / M);
  const double total = S[M];
  RotSymProfile p;
  p.n = n;
  p.boundary = Boundary::closed_caps;
  p.x.resize(N);
  p.rho.resize(N);
  for (size_t i = 0; i < N; ++i) {
    double phi;
    if (i == 0) phi = 0.0;
    else if (i + 1 == N) phi = M_PI;
    else {
      double target = total * double(i) / double(N - 1);
      size_t j = size_t(std::upper_bound(S.begin(), S.end(), target) - S.begin()) - 1;
      j = std::min(j, M - 1);
      double a = M_PI * j / M;
      phi = a + (target - S[j]) / std::max(speed(a), 1e-300);
      for (int it = 0; it < 8; ++it) {
        double err = S[j] + seg(a, phi) - target;
        phi -= err / speed(phi);
        if (std::abs(err) < 1e-15 * total) break;
      }
    }
    double z, r;
    curve(phi, z, r);
    p.x[i] = z;
    p.rho[i] = r;
  }
  p.rho.front() = p.rho.back() = 0.0;
  p.dx = total / double(N - 1);
  p.validate();
  return p;
}

RotSymProfile sphere_profile(int n, double r0, size_t N) {
  if (!(r0 > 0)) throw PreconditionError("rotsym_flow", "sphere_profile", "radius must be positive");
  return closed_profile(n, N, [r0](double phi, double& z, double& r) {
    z = -r0 * std::cos(phi);
    r = r0 * std::sin(phi);
  });
}

RotSymProfile spheroid_profile(int n, double a, double b, size_t N) {
  if (!(a > 0) || !(b > 0)) throw PreconditionError("rotsym_flow", "spheroid_profile", "semi-axes must be positive");
  return closed_profile(n, N, [a, b](double phi, double& z, double& r) {
    z = -a * std::cos(phi);
    r = b * std::sin(phi);
  });
}

RotSymProfile dumbbell_profile(int n, const DumbbellParams& d, size_t N) {
  if (!(d.tube > 0) || !(d.bulb > d.tube) || !(d.width > 0) || !(d.half_length > d.junction) || !(d.junction > 0))
    throw PreconditionError("rotsym_flow", "dumbbell_profile", "need 0 < tube < bulb, 0 < junction < half_length");
  return closed_profile(n, N, [d](double phi, double& z, double& r) {
    double c = std::cos(phi);
    double x = -d.half_length * c;
    double env = (std::abs(c) >= 1.0) ? 0.0 : std::sqrt(-std::expm1(16.0 * std::log(std::abs(c))));
    if (c == 0.0) env = 1.0;
    auto sig = [](double t) { return 0.5 * (1.0 + std::tanh(t)); };
    double core = d.tube + (d.bulb - d.tube) * (sig((x - d.junction) / d.width) + sig((-x - d.junction) / d.width));
    z = x;
    r = env * core;
  });
}

}  // namespace mcflab
