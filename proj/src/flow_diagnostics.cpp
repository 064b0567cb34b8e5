#include "mcflab/flow_diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace mcflab {

DerivativeNormEstimate derivative_norms(const RotSymProfile& p, size_t i, int k, const JetOptions& opt) {
  if (k < 1 || k > kMaxDerivativeOrder) throw PreconditionError("rotsym_flow", "derivative_norms", "k must be in 1..8");
  if (i >= p.size()) throw PreconditionError("rotsym_flow", "derivative_norms", "node out of range");
  JetOptions o = opt;
  o.kmax = std::max(k, 1);
  DerivativeNormEstimate e;
  MeridianJets a, b;
  if (!profile_meridian_jets(p, i, o, a)) return e;
  e.available = true;
  e.value = covariant_derivative_norms({a}, p.n, k)[0][k];
  if (!profile_meridian_jets(p, i, o, b, 1.5)) {
    e.refined = e.value;
    return e;
  }
  e.refined = covariant_derivative_norms({b}, p.n, k)[0][k];
  MeridianPoint mp = meridian_point(p, i);
  double H = std::abs(mp.k_axial + (p.n - 1) * mp.k_rot);
  double floor = 1e-8 * std::pow(H, k + 1);
  e.flagged = std::abs(e.value - e.refined) > 0.25 * std::max(e.value, e.refined) + floor;
  return e;
}

namespace {

void accumulate(GammaEstimate& g, const SampledSurface& s, double time) {
  for (size_t i = 0; i < s.size(); ++i) {
    double H = s.H(i);
    if (s.dnorms.empty() || !(H > 0) || std::isnan(s.dnorms[i][1]) || s.kmax < 2 || std::isnan(s.dnorms[i][2])) {
      ++g.excluded;
      continue;
    }
    ++g.samples;
    double a = s.dnorms[i][1] / (H * H), b = s.dnorms[i][2] / (H * H * H);
    if (a > g.gamma1) {
      g.gamma1 = a;
      g.time_of_gamma1 = time;
    }
    if (b > g.gamma2) {
      g.gamma2 = b;
      g.time_of_gamma2 = time;
    }
  }
}

struct Snap {
  double t;
  std::vector<double> z, r, nz, nr, H;
};

Snap snap_of(const RotSymProfile& p) {
  Snap s;
  s.t = p.time;
  const size_t N = p.size();
  for (size_t i = 0; i < N; ++i) {
    MeridianPoint m = meridian_point(p, i);
    s.z.push_back(m.z);
    s.r.push_back(m.r);
    s.nz.push_back(m.nz);
    s.nr.push_back(m.nr);
    s.H.push_back(m.k_axial + (p.n - 1) * m.k_rot);
  }
  if (p.boundary == Boundary::periodic) {
    // one ghost node at each end so normal lines near the seam still land
    double P = p.period();
    auto wrap = [&](std::vector<double>& v, double shift) {
      double first = v.front(), last = v.back();
      v.insert(v.begin(), last - shift);
      v.push_back(first + shift);
    };
    wrap(s.z, P);
    wrap(s.r, 0.0);
    wrap(s.nz, 0.0);
    wrap(s.nr, 0.0);
    wrap(s.H, 0.0);
  }
  return s;
}

// Closest intersection of the line X + tau*nu with the polyline of snap.
bool follow(const Snap& s, double& z, double& r, double& nz, double& nr, double& H) {
  double best = INFINITY;
  bool found = false;
  double bz = 0, br = 0, bnz = 0, bnr = 0, bH = 0;
  for (size_t j = 0; j + 1 < s.z.size(); ++j) {
    double ez = s.z[j + 1] - s.z[j], er = s.r[j + 1] - s.r[j];
    // solve z + tau nz = z_j + u ez, r + tau nr = r_j + u er
    double det = -nz * er + nr * ez;
    if (std::abs(det) < 1e-300) continue;
    double dz = s.z[j] - z, dr = s.r[j] - r;
    double tau = (-dz * er + dr * ez) / det;
    double u = (nz * dr - nr * dz) / det;
    if (u < -1e-12 || u > 1 + 1e-12) continue;
    if (std::abs(tau) < best) {
      best = std::abs(tau);
      found = true;
      bz = s.z[j] + u * ez;
      br = s.r[j] + u * er;
      bnz = (1 - u) * s.nz[j] + u * s.nz[j + 1];
      bnr = (1 - u) * s.nr[j] + u * s.nr[j + 1];
      bH = (1 - u) * s.H[j] + u * s.H[j + 1];
    }
  }
  if (!found) return false;
  double l = std::hypot(bnz, bnr);
  z = bz;
  r = br;
  nz = bnz / l;
  nr = bnr / l;
  H = bH;
  return true;
}

double duration_for(double H0, int n, double rhat) {
  double R = (n - 1) / H0;
  return R * R * rhat * rhat;
}

}  // namespace

GammaEstimate estimate_gammas(const SampledSurface& s) {
  GammaEstimate g;
  accumulate(g, s, 0.0);
  return g;
}

GammaEstimate estimate_gammas(const FlowTrajectory& traj, size_t stride, const JetOptions& opt) {
  if (traj.snapshots.empty()) throw PreconditionError("rotsym_flow", "estimate_gammas", "empty trajectory");
  if (stride < 1) throw PreconditionError("rotsym_flow", "estimate_gammas", "stride must be >= 1");
  GammaEstimate g;
  JetOptions o = opt;
  o.kmax = std::max(o.kmax, 2);
  const size_t K = traj.snapshots.size();
  for (size_t k = 0; k < K; k += stride) accumulate(g, profile_surface(traj.snapshots[k], o), traj.snapshots[k].time);
  if ((K - 1) % stride != 0) accumulate(g, profile_surface(traj.snapshots[K - 1], o), traj.snapshots[K - 1].time);
  return g;
}

RHat r_hat(int n, double gamma1, double gamma2) {
  if (n < 2 || gamma1 < 0 || gamma2 < 0) throw PreconditionError("rotsym_flow", "r_hat", "requires n >= 2 and gammas >= 0");
  RHat r;
  r.c1 = n * gamma1;
  r.c2 = n * gamma2 + 1.0;
  r.r1 = r.c1 > 0 ? 1.0 / (2.0 * r.c1 * (n - 1)) : INFINITY;
  r.r2 = 3.0 / (16.0 * r.c2 * (n - 1) * (n - 1));
  r.r_hat = std::min(r.r1, std::sqrt(r.r2));
  return r;
}

ParabolicCheck parabolic_neighborhood_check(const FlowTrajectory& traj, size_t k0, size_t i0, double rhat) {
  if (k0 >= traj.snapshots.size()) throw PreconditionError("rotsym_flow", "parabolic_neighborhood_check", "snapshot out of range");
  const RotSymProfile& P0 = traj.snapshots[k0];
  if (i0 >= P0.size()) throw PreconditionError("rotsym_flow", "parabolic_neighborhood_check", "node out of range");
  if (!(rhat > 0)) throw PreconditionError("rotsym_flow", "parabolic_neighborhood_check", "rhat must be positive");
  Snap s0 = snap_of(P0);
  const size_t off = P0.boundary == Boundary::periodic ? 1 : 0;
  const double H0 = s0.H[i0 + off];
  if (!(H0 > 0)) throw PreconditionError("rotsym_flow", "parabolic_neighborhood_check", "H must be positive at the centre");
  ParabolicCheck c;
  c.radius = (P0.n - 1) / H0 * rhat;
  c.duration = duration_for(H0, P0.n, rhat);
  const double t_lo = P0.time - c.duration;
  if (t_lo < traj.snapshots.front().time - 1e-12) c.covered = false;

  std::vector<double> s = arclength(P0);
  const size_t N = P0.size();
  if (P0.boundary != Boundary::closed_caps && P0.boundary != Boundary::periodic &&
      (s[i0] - c.radius < s.front() || s[i0] + c.radius > s[N - 1]))
    c.covered = false;
  struct Track {
    double z, r, nz, nr;
    bool alive;
  };
  std::vector<Track> pts;
  auto note = [&](double H) {
    double q = H / H0;
    c.min_ratio = std::min(c.min_ratio, q);
    c.max_ratio = std::max(c.max_ratio, q);
    ++c.points;
  };
  const double period_len = P0.boundary == Boundary::periodic ? s[N] : 0.0;
  for (size_t i = 0; i < N; ++i) {
    double d = std::abs(s[i] - s[i0]);
    if (period_len > 0) d = std::min(d, period_len - d);
    if (d > c.radius) continue;
    pts.push_back({s0.z[i + off], s0.r[i + off], s0.nz[i + off], s0.nr[i + off], true});
    note(s0.H[i + off]);
  }
  for (size_t k = k0; k-- > 0;) {
    const RotSymProfile& Pk = traj.snapshots[k];
    if (Pk.time < t_lo - 1e-15) break;
    Snap sk = snap_of(Pk);
    ++c.snapshots;
    for (auto& q : pts) {
      if (!q.alive) continue;
      double H;
      if (!follow(sk, q.z, q.r, q.nz, q.nr, H)) {
        q.alive = false;
        c.covered = false;
        continue;
      }
      note(H);
    }
  }
  c.pass = c.min_ratio >= 0.25 && c.max_ratio <= 4.0;
  return c;
}

ParabolicSweep parabolic_sweep(const FlowTrajectory& traj, const GammaEstimate& g, size_t count, std::uint64_t seed) {
  if (traj.snapshots.size() < 2) throw PreconditionError("rotsym_flow", "parabolic_sweep", "need at least two snapshots");
  ParabolicSweep sw;
  sw.rhat = r_hat(traj.snapshots.front().n, g.gamma1, g.gamma2);
  std::mt19937_64 rng(seed);
  const double t_first = traj.snapshots.front().time;
  size_t attempts = 0;
  while (sw.checks.size() < count) {
    if (++attempts > 200 * count + 1000)
      throw CoverageError("rotsym_flow", "parabolic_sweep", "too few spacetime centres with full backward coverage");
    size_t k = std::uniform_int_distribution<size_t>(1, traj.snapshots.size() - 1)(rng);
    const RotSymProfile& P = traj.snapshots[k];
    size_t i = std::uniform_int_distribution<size_t>(0, P.size() - 1)(rng);
    MeridianPoint m = meridian_point(P, i);
    double H = m.k_axial + (P.n - 1) * m.k_rot;
    if (!(H > 0) || P.time - duration_for(H, P.n, sw.rhat.r_hat) < t_first) continue;
    ParabolicCheck c = parabolic_neighborhood_check(traj, k, i, sw.rhat.r_hat);
    if (!c.covered) continue;
    sw.snapshot.push_back(k);
    sw.node.push_back(i);
    sw.min_ratio = std::min(sw.min_ratio, c.min_ratio);
    sw.max_ratio = std::max(sw.max_ratio, c.max_ratio);
    if (!c.pass) ++sw.violations;
    sw.checks.push_back(c);
  }
  sw.pass = sw.violations == 0;
  return sw;
}

}  // namespace mcflab
