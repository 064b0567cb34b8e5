#include "mcflab/noncollapsing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcflab {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}  // namespace

InscribedRadius inscribed_radius(const SampledSurface& S, size_t p) {
  if (p >= S.size()) throw PreconditionError("noncollapsing", "inscribed_radius", "sample out of range");
  const double zp = S.z[p], rp = S.r[p], nz = S.nz[p], nr = S.nr[p];
  InscribedRadius best{kInf, p, true};
  for (double k : {S.k1[p], S.k2[p]})
    if (k > 0) best.r_in = std::min(best.r_in, 1.0 / k);
  // On each orbit the ratio is a Moebius function of the angle's cosine, so
  // its infimum sits at one of the two meridian-plane points.
  for (size_t q = 0; q < S.size(); ++q)
    for (double sg : {1.0, -1.0}) {
      if (q == p && sg > 0) continue;
      double dz = zp - S.z[q], dr = rp - sg * S.r[q];
      double den = 2.0 * (nz * dz + nr * dr);
      double d2 = dz * dz + dr * dr;
      if (!(den > 1e-14 * std::sqrt(d2))) continue;
      double r = d2 / den;
      if (r < best.r_in) best = {r, q, false};
    }
  if (!std::isfinite(best.r_in)) throw CoverageError("noncollapsing", "inscribed_radius", "no admissible obstruction among the samples");
  double cz = zp - best.r_in * nz;
  auto past = [&](EndKind e, double z_end, double outward) {
    return e == EndKind::open && (cz + outward * best.r_in - z_end) * outward > 0;
  };
  const size_t N = S.size();
  double o_start = S.z[0] < S.z[N - 1] ? -1.0 : 1.0;
  if (past(S.start, S.z[0], o_start) || past(S.end, S.z[N - 1], -o_start))
    throw CoverageError("noncollapsing", "inscribed_radius", "inscribed ball reaches past an open end of the samples");
  return best;
}

AlphaProfile alpha_profile(const SampledSurface& S) {
  S.validate();
  AlphaProfile a;
  const size_t N = S.size();
  a.r_in.assign(N, kNaN);
  a.alpha.assign(N, kNaN);
  a.valid.assign(N, false);
  a.min_alpha = kInf;
  for (size_t i = 0; i < N; ++i) {
    try {
      a.r_in[i] = inscribed_radius(S, i).r_in;
    } catch (const CoverageError&) {
      ++a.excluded;
      continue;
    }
    a.valid[i] = true;
    a.alpha[i] = S.H(i) * a.r_in[i];
    if (a.alpha[i] < a.min_alpha) {
      a.min_alpha = a.alpha[i];
      a.argmin = i;
    }
  }
  if (a.excluded == N) throw CoverageError("noncollapsing", "alpha_profile", "no sample has a decidable inscribed radius");
  return a;
}

namespace {

// Meridian-plane point at arclength t, continued through poles by reflection.
bool meridian_at(const SampledSurface& S, double t, double& z, double& r, double& nz, double& nr) {
  const size_t N = S.size();
  double sign = 1.0;
  for (int bounce = 0; bounce < 4; ++bounce) {
    if (t < S.s[0]) {
      if (S.start != EndKind::pole) return false;
      t = 2 * S.s[0] - t;
      sign = -sign;
    } else if (t > S.s[N - 1]) {
      if (S.end != EndKind::pole) return false;
      t = 2 * S.s[N - 1] - t;
      sign = -sign;
    } else {
      break;
    }
  }
  size_t j = size_t(std::upper_bound(S.s.begin(), S.s.end(), t) - S.s.begin());
  j = std::clamp<size_t>(j, 1, N - 1) - 1;
  double h = S.s[j + 1] - S.s[j], u = (t - S.s[j]) / h;
  double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u), h01 = u * u * (3 - 2 * u),
         h11 = u * u * (u - 1);
  // tangent (dz/ds, dr/ds) = (nr, -nz)
  z = h00 * S.z[j] + h10 * h * S.nr[j] + h01 * S.z[j + 1] + h11 * h * S.nr[j + 1];
  r = h00 * S.r[j] - h10 * h * S.nz[j] + h01 * S.r[j + 1] - h11 * h * S.nz[j + 1];
  nz = (1 - u) * S.nz[j] + u * S.nz[j + 1];
  nr = (1 - u) * S.nr[j] + u * S.nr[j + 1];
  double l = std::hypot(nz, nr);
  nz /= l;
  nr = sign * nr / l;
  r *= sign;
  return true;
}

}  // namespace

GeodesicProbe geodesic_functions(const SampledSurface& S, size_t p, int direction, double alpha, double C0,
                                 size_t probes) {
  if (p >= S.size()) throw PreconditionError("noncollapsing", "geodesic_functions", "sample out of range");
  if (direction != 1 && direction != -1) throw PreconditionError("noncollapsing", "geodesic_functions", "direction must be +1 or -1");
  if (!(alpha > 0) || !(C0 >= 1.0) || probes < 1)
    throw PreconditionError("noncollapsing", "geodesic_functions", "requires alpha > 0, C0 >= 1, probes >= 1");
  GeodesicProbe g;
  g.s_max = alpha * C0;
  // Pinching precondition on every sample the geodesic can reach.
  const double tol = 1e-9;
  auto pinched = [&](size_t i) {
    double H = S.H(i);
    return H >= (1 - tol) / C0 && H <= C0 * (1 + tol) && S.lambda1(i) >= H / C0 * (1 - tol);
  };
  const double s0 = S.s[p];
  for (size_t i = 0; i < S.size(); ++i) {
    double d = std::abs(S.s[i] - s0);
    if (S.start == EndKind::pole) d = std::min(d, (s0 - S.s[0]) + (S.s[i] - S.s[0]));
    if (S.end == EndKind::pole) d = std::min(d, (S.s.back() - s0) + (S.s.back() - S.s[i]));
    if (d <= g.s_max + S.spacing(i) && !pinched(i))
      throw PreconditionError("noncollapsing", "geodesic_functions",
                              "pinching precondition C0^-1 <= H <= C0, lambda1 >= H/C0 fails on the probed region");
  }
  g.f_check_applies = alpha <= 0.5 / (C0 * C0) * (1 + 1e-12);
  const double zp = S.z[p], rp = S.r[p], nz = S.nz[p], nr = S.nr[p];
  g.min_k_margin = kInf;
  for (size_t j = 1; j <= probes; ++j) {
    double t = g.s_max * double(j) / double(probes);
    double z, r, a, b;
    if (!meridian_at(S, s0 + direction * t, z, r, a, b)) {
      g.truncated = true;
      break;
    }
    double dz = z - zp, dr = r - rp;
    double k = -(dz * nz + dr * nr);
    double f = 0.5 * (dz * dz + dr * dr) - alpha * C0 * k;
    double kb = t * t / (4 * C0 * C0);
    g.s.push_back(t);
    g.k.push_back(k);
    g.f.push_back(f);
    g.k_bound.push_back(kb);
    g.s_reached = t;
    if (k < kb) ++g.k_violations;
    g.min_k_margin = std::min(g.min_k_margin, (k - kb) / kb);
    if (g.f_check_applies && !(f > 0)) ++g.f_violations;
  }
  return g;
}

NoncollapsingResult verify_noncollapsing(const SampledSurface& S, const AlphaProfile& a, double alpha,
                                         const std::vector<size_t>& samples) {
  if (!(alpha > 0)) throw PreconditionError("noncollapsing", "verify_noncollapsing", "alpha must be positive");
  NoncollapsingResult res;
  res.worst_margin = kInf;
  for (size_t i : samples) {
    if (!a.valid[i]) {
      ++res.excluded;
      continue;
    }
    ++res.checked;
    double need = alpha / S.H(i);
    bool ok = a.r_in[i] >= need - 1e-9 * a.r_in[i];
    double m = a.r_in[i] / need - 1.0;
    if (m < res.worst_margin) {
      res.worst_margin = m;
      res.worst = i;
    }
    if (!ok) res.pass = false;
  }
  return res;
}

NoncollapsingResult verify_noncollapsing(const SampledSurface& S, double alpha) {
  AlphaProfile a = alpha_profile(S);
  std::vector<size_t> all(S.size());
  for (size_t i = 0; i < all.size(); ++i) all[i] = i;
  return verify_noncollapsing(S, a, alpha, all);
}

}  // namespace mcflab
