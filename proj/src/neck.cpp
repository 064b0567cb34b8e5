#include "mcflab/neck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mcflab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Window {
  size_t lo = 0, hi = 0;
  bool graph = true;
};

// Contiguous samples around p with |z - z_p| <= half, walking along the
// meridian while it stays a graph over the axis.
Window axial_window(const SampledSurface& S, size_t p, double half, bool strict_coverage) {
  Window w{p, p, true};
  const long N = long(S.size());
  const double orient = S.nr[p] > 0 ? 1.0 : -1.0;  // sign of dz/ds on a graph
  if (!(S.nr[p] > 0)) w.graph = false;
  for (int dir : {-1, 1}) {
    long j = long(p);
    for (;;) {
      long k = j + dir;
      if (k < 0 || k >= N) {
        EndKind e = k < 0 ? S.start : S.end;
        if (e == EndKind::open && strict_coverage)
          throw CoverageError("neck_analysis", "detect_neck", "axial window passes an open end of the samples");
        if (e == EndKind::pole) w.graph = false;
        break;
      }
      if (std::abs(S.z[size_t(k)] - S.z[p]) > half) break;
      if (!(S.nr[size_t(k)] > 0) || !(S.r[size_t(k)] > 0) || (S.z[size_t(k)] - S.z[size_t(j)]) * dir * orient <= 0) {
        w.graph = false;
        break;
      }
      j = k;
    }
    (dir < 0 ? w.lo : w.hi) = size_t(j);
    if (!w.graph) break;
  }
  return w;
}

Eigen::VectorXd window_axis(const SampledSurface& S, size_t p, const Window& w) {
  const int d = S.n + 1;
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d, d);
  for (size_t i = w.lo; i <= w.hi; ++i)
    for (int j = 1; j <= S.n; ++j)
      for (double sg : {-1.0, 1.0}) {
        Eigen::VectorXd v = S.normal(i, j, sg);
        M += v * v.transpose();
      }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  Eigen::VectorXd a = es.eigenvectors().col(0);
  Eigen::VectorXd T = S.nr[p] * S.frame.col(0) - S.nz[p] * S.frame.col(1);
  if (a.dot(T) < 0) a = -a;
  return a.normalized();
}

// Min-norm point of the convex hull of the columns of P (Wolfe).
Eigen::VectorXd min_norm_point(const Eigen::MatrixXd& P) {
  const long m = P.cols();
  long i0 = 0;
  P.colwise().squaredNorm().minCoeff(&i0);
  std::vector<long> S{i0};
  std::vector<double> w{1.0};
  Eigen::VectorXd x = P.col(i0);
  const double scale = P.colwise().squaredNorm().maxCoeff();
  for (int major = 0; major < 1000; ++major) {
    long j = 0;
    (x.transpose() * P).minCoeff(&j);
    if (x.squaredNorm() - x.dot(P.col(j)) <= 1e-15 * scale) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    w.push_back(0.0);
    for (int minor = 0; minor < 100; ++minor) {
      const long k = long(S.size());
      Eigen::MatrixXd A(P.rows(), k);
      for (long q = 0; q < k; ++q) A.col(q) = P.col(S[q]);
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(k + 1, k + 1);
      K.topLeftCorner(k, k) = A.transpose() * A;
      K.block(0, k, k, 1).setOnes();
      K.block(k, 0, 1, k).setOnes();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs[k] = 1.0;
      Eigen::VectorXd v = K.completeOrthogonalDecomposition().solve(rhs).head(k);
      if (v.minCoeff() > 1e-12) {
        for (long q = 0; q < k; ++q) w[q] = v[q];
        x = A * v;
        break;
      }
      double theta = 1.0;
      for (long q = 0; q < k; ++q)
        if (v[q] <= 1e-12) theta = std::min(theta, w[q] / (w[q] - v[q]));
      for (long q = 0; q < k; ++q) w[q] = theta * v[q] + (1 - theta) * w[q];
      std::vector<long> S2;
      std::vector<double> w2;
      for (long q = 0; q < k; ++q)
        if (w[q] > 1e-12) {
          S2.push_back(S[q]);
          w2.push_back(w[q]);
        }
      if (S2.empty()) {
        S2.push_back(S.back());
        w2.push_back(1.0);
      }
      double tot = 0.0;
      for (double a : w2) tot += a;
      for (double& a : w2) a /= tot;
      S = S2;
      w = w2;
      x.setZero();
      for (size_t q = 0; q < S.size(); ++q) x += w[q] * P.col(S[q]);
    }
  }
  (void)m;
  return x;
}

}  // namespace

double NeckCriteria::max() const {
  return std::max({ratio_lambda1, ratio_gap, derivative_sum, graph_c0, graph_c1, graph_c2});
}

NeckCertificate measure_neck(const SampledSurface& S, size_t p, double L) {
  if (p >= S.size()) throw PreconditionError("neck_analysis", "detect_neck", "sample out of range");
  if (!(L > 0)) throw PreconditionError("neck_analysis", "detect_neck", "L must be positive");
  NeckCertificate c;
  c.center = p;
  c.L = L;
  const double H = S.H(p);
  NeckCriteria& k = c.criteria;
  if (!(H > 0)) {
    k.ratio_lambda1 = k.ratio_gap = k.derivative_sum = kInf;
    c.epsilon_achieved = kInf;
    c.radius_scale = kInf;
    c.axis = S.axis();
    return c;
  }
  const int n = S.n;
  const double R = (n - 1) / H;
  c.radius_scale = R;
  CurvatureSpectrum sp = S.spectrum(p);
  k.ratio_lambda1 = sp.lambdas.front() / H;
  k.ratio_gap = (sp.lambdas.back() - sp.lambdas[1]) / H;

  auto ball = S.ball(p, (L + 10.0) * R);
  if (!ball.covered) throw CoverageError("neck_analysis", "detect_neck", "derivative ball passes an open end of the samples");
  const double x = 1.0 / H;
  size_t used = 0;
  for (size_t q = ball.lo; q <= ball.hi; ++q) {
    if (S.dnorms.empty() || std::isnan(S.dnorms[q][1])) {
      ++k.skipped;
      continue;
    }
    ++used;
    double sum = 0.0, xp = x;
    for (int j = 1; j <= S.kmax; ++j) {
      xp *= x;
      sum += S.dnorms[q][j] * xp;
    }
    k.derivative_sum = std::max(k.derivative_sum, sum);
  }
  if (used == 0) throw CoverageError("neck_analysis", "detect_neck", "no derivative data inside the ball");

  Window w = axial_window(S, p, L * R, true);
  if (!w.graph) {
    k.graph_c0 = k.graph_c1 = k.graph_c2 = kInf;
  } else {
    for (size_t q = w.lo; q <= w.hi; ++q) {
      k.graph_c0 = std::max(k.graph_c0, std::abs(S.r[q] / R - 1.0));
      k.graph_c1 = std::max(k.graph_c1, std::abs(S.nz[q] / S.nr[q]));
      k.graph_c2 = std::max(k.graph_c2, R * std::abs(S.k1[q]) / std::pow(S.nr[q], 3));
    }
  }
  c.axis = w.graph ? window_axis(S, p, w) : S.axis();
  c.epsilon_achieved = k.max();
  return c;
}

NeckDecision detect_neck(const SampledSurface& S, size_t p, double epsilon, double L) {
  if (!(epsilon > 0)) throw PreconditionError("neck_analysis", "detect_neck", "epsilon must be positive");
  NeckDecision d;
  d.certificate = measure_neck(S, p, L);
  const NeckCriteria& k = d.certificate.criteria;
  d.accepted = d.certificate.epsilon_achieved <= epsilon;
  if (!d.accepted) {
    const std::pair<const char*, double> items[] = {{"ratio_lambda1", k.ratio_lambda1}, {"ratio_gap", k.ratio_gap},
                                                    {"derivative_sum", k.derivative_sum}, {"graph_c0", k.graph_c0},
                                                    {"graph_c1", k.graph_c1}, {"graph_c2", k.graph_c2}};
    for (auto& it : items)
      if (it.second > epsilon) {
        d.reason = it.first;
        break;
      }
  }
  return d;
}

double neck_quality(const SampledSurface& S, size_t p, double L) {
  double e = measure_neck(S, p, L).epsilon_achieved;
  return e > 1.0 ? kInf : e;
}

AxisEstimate estimate_axis(const SampledSurface& S) {
  S.validate();
  const int d = S.n + 1;
  Eigen::MatrixXd P(d, long(S.size()) * 2 * S.n);
  long c = 0;
  for (size_t i = 0; i < S.size(); ++i)
    for (int j = 1; j <= S.n; ++j)
      for (double sg : {1.0, -1.0}) P.col(c++) = S.normal(i, j, sg);
  AxisEstimate a;
  Eigen::VectorXd x = min_norm_point(P);
  if (x.norm() > 1e-9) {
    a.omega = x.normalized();
  } else {
    a.zero_in_hull = true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P * P.transpose());
    Eigen::VectorXd v = es.eigenvectors().col(0);
    double up = (v.transpose() * P).minCoeff(), down = (-v.transpose() * P).minCoeff();
    if (down > up + 1e-12) v = -v;
    else if (std::abs(down - up) <= 1e-12) {
      long im = 0;
      v.cwiseAbs().maxCoeff(&im);
      if (v[im] < 0) v = -v;
    }
    a.omega = v.normalized();
  }
  a.min_normal_component = (a.omega.transpose() * P).minCoeff();
  if (a.min_normal_component < -1e-3)
    throw PreconditionError("neck_analysis", "estimate_axis",
                            "no direction with min <nu, omega> >= -1e-3: not noncompact-convex-like");
  return a;
}

double sup_normal_component(const SampledSurface& S, const Eigen::VectorXd& omega, const std::vector<size_t>& samples) {
  double m = 0.0;
  for (size_t i : samples)
    for (int j = 1; j <= S.n; ++j)
      for (double sg : {1.0, -1.0}) m = std::max(m, std::abs(S.normal(i, j, sg).dot(omega)));
  return m;
}

HeightCurves trace_height_curves(const SampledSurface& S, double y0, const Eigen::VectorXd& omega, double theta) {
  S.validate();
  if (omega.size() != S.n + 1 || std::abs(omega.norm() - 1.0) > 1e-9)
    throw PreconditionError("neck_analysis", "trace_height_curves", "omega must be a unit vector in R^{n+1}");
  const double align = omega.dot(S.axis());
  if (std::acos(std::min(1.0, std::abs(align))) > 1e-3)
    throw PreconditionError("neck_analysis", "trace_height_curves", "omega must be the symmetry axis to within 1e-3");
  const double sg = align > 0 ? 1.0 : -1.0;
  const size_t N = S.size();
  const double y_off = S.origin.dot(omega);
  auto y = [&](size_t i) { return y_off + sg * S.z[i]; };

  long seed = -1;
  for (size_t i = 0; i + 1 < N; ++i)
    if ((y(i) - y0) * (y(i + 1) - y0) <= 0) {
      seed = std::abs(y(i) - y0) <= std::abs(y(i + 1) - y0) ? long(i) : long(i + 1);
      break;
    }
  if (seed < 0) throw PreconditionError("neck_analysis", "trace_height_curves", "level set not on the sampled surface");
  long dir = 1;
  {
    long a = seed > 0 ? seed - 1 : seed, b = seed + 1 < long(N) ? seed + 1 : seed;
    if (y(size_t(b)) - y(size_t(a)) < 0) dir = -1;
  }
  HeightCurves hc;
  hc.copies = size_t(2 * S.n);
  auto point = [&](size_t i) {
    HeightPoint h;
    h.sample = i;
    h.y = y(i);
    h.nu_omega = sg * S.nz[i];
    h.H = S.H(i);
    h.radius = S.r[i];
    h.lambda1 = S.lambda1(i);
    return h;
  };
  const double H0 = S.H(size_t(seed));
  hc.shrinking_applies = sg * S.nz[size_t(seed)] > 0;
  hc.min_H_ratio = 1.0;
  long i = seed;
  hc.curve.push_back(point(size_t(i)));
  for (;;) {
    if (std::abs(S.nr[size_t(i)]) < 1e-10) {
      hc.terminal = S.r[size_t(i)] == 0.0 ? "pole" : "critical-point";
      break;
    }
    long k = i + dir;
    if (k < 0 || k >= long(N)) {
      EndKind e = k < 0 ? S.start : S.end;
      hc.terminal = e == EndKind::pole ? "pole" : "domain-edge";
      hc.y_unbounded = e == EndKind::extends;
      break;
    }
    HeightPoint a = hc.curve.back(), b = point(size_t(k));
    double dy = b.y - a.y;
    if (!(dy > 0)) {
      hc.terminal = "not-graph";
      break;
    }
    if (b.nu_omega < a.nu_omega - 1e-8) ++hc.nu_omega_violations;
    if (hc.shrinking_applies && b.radius > a.radius * (1 + 1e-12) + 1e-14) ++hc.shrinking_violations;
    if (b.H < theta * H0 * (1 - 1e-12)) ++hc.theta_violations;
    double slope = (b.nu_omega - a.nu_omega) / dy;
    double need = std::min(a.lambda1, b.lambda1) - std::abs(S.k1[size_t(k)] - S.k1[size_t(i)]);
    if (slope < need - 1e-9 * std::max(1.0, std::abs(need))) ++hc.slope_violations;
    hc.min_H_ratio = std::min(hc.min_H_ratio, b.H / H0);
    hc.curve.push_back(b);
    i = k;
  }
  hc.y_max = hc.curve.back().y;
  return hc;
}

const char* to_string(SampleClass c) {
  switch (c) {
    case SampleClass::neck: return "neck";
    case SampleClass::cap: return "cap";
    default: return "uncovered";
  }
}

bool DecompositionReport::all_pass() const {
  for (const auto& c : checks)
    if (c.status != "pass") return false;
  return !checks.empty();
}

namespace {

double q2(const SampledSurface& S, size_t i, double L, bool& covered) {
  try {
    covered = true;
    return neck_quality(S, i, L);
  } catch (const CoverageError&) {
    covered = false;
    return kInf;
  }
}

}  // namespace

DecompositionReport decompose(const SampledSurface& S, double eps0, double eps1, double L, double C0_bundle) {
  S.validate();
  if (!(eps1 > 0) || !(eps1 < eps0)) throw PreconditionError("neck_analysis", "decompose", "requires 0 < epsilon1 < epsilon0");
  if (!(L > 0)) throw PreconditionError("neck_analysis", "decompose", "L must be positive");
  const size_t N = S.size();
  const int n = S.n;
  DecompositionReport rep;
  for (size_t i = 0; i < N; ++i) {
    if (!(S.H(i) > 0)) throw PreconditionError("neck_analysis", "decompose", "H must be positive at every sample");
    if (!(S.lambda1(i) > 0)) rep.strictly_convex = false;
  }
  rep.classes.resize(N);
  rep.quality.resize(N);
  for (size_t i = 0; i < N; ++i) {
    bool cov;
    double q = q2(S, i, L, cov);
    rep.quality[i] = q;
    if (!cov) {
      rep.classes[i] = SampleClass::uncovered;
      rep.uncovered.push_back(i);
    } else if (q <= eps0) {
      rep.classes[i] = SampleClass::neck;
      rep.neck_points.push_back(i);
    } else {
      rep.classes[i] = SampleClass::cap;
    }
  }
  rep.neck_fraction = double(rep.neck_points.size()) / double(N);

  auto fill_region = [&](CapRegion& c, size_t lo, size_t hi) {
    c.H_min = kInf;
    c.H_max = 0.0;
    c.min_lambda1_over_H = kInf;
    double rmax = 0.0;
    for (size_t i = lo; i <= hi; ++i) {
      c.samples.push_back(i);
      c.H_min = std::min(c.H_min, S.H(i));
      c.H_max = std::max(c.H_max, S.H(i));
      c.min_lambda1_over_H = std::min(c.min_lambda1_over_H, S.lambda1(i) / S.H(i));
      rmax = std::max(rmax, S.r[i]);
    }
    c.contains_pole = (lo == 0 && S.start == EndKind::pole) || (hi == N - 1 && S.end == EndKind::pole);
    c.diameter = c.contains_pole ? 2.0 * (S.s[hi] - S.s[lo]) : S.s[hi] - S.s[lo] + M_PI * rmax;
  };
  for (size_t i = 0; i < N;) {
    if (rep.classes[i] != SampleClass::cap) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < N && rep.classes[j + 1] == SampleClass::cap) ++j;
    CapRegion c;
    fill_region(c, i, j);
    c.touches_boundary = (i == 0 && S.start == EndKind::open) || (j == N - 1 && S.end == EndKind::open) ||
                         (i > 0 && rep.classes[i - 1] == SampleClass::uncovered) ||
                         (j + 1 < N && rep.classes[j + 1] == SampleClass::uncovered);
    rep.caps.push_back(c);
    i = j + 1;
  }
  const int poles = int(S.start == EndKind::pole) + int(S.end == EndKind::pole);
  bool truncated = poles == 0;
  for (const auto& c : rep.caps) truncated = truncated || c.touches_boundary;
  rep.topology = truncated ? "truncated" : poles == 2 ? "compact" : "noncompact";

  // Transition points, walking inward from each pole.
  std::vector<size_t> pole_ids;
  if (S.start == EndKind::pole) pole_ids.push_back(0);
  if (S.end == EndKind::pole) pole_ids.push_back(N - 1);
  for (size_t pole : pole_ids) {
    CapDomain D;
    D.pole = pole;
    const long step = pole == 0 ? 1 : -1;
    for (long i = long(pole); i >= 0 && i < long(N); i += step) {
      if (rep.classes[size_t(i)] == SampleClass::uncovered || !(rep.quality[size_t(i)] <= eps1)) continue;
      bool cov;
      double q = q2(S, size_t(i), 2 * L, cov);
      if (cov && q > eps1 / 2) {
        D.transition_found = true;
        D.transition = size_t(i);
        break;
      }
    }
    if (!D.transition_found) {
      rep.domains.push_back(D);
      continue;
    }
    const size_t pb = D.transition;
    rep.transition_points.push_back(pb);
    const double Rb = (n - 1) / S.H(pb);
    Window w = axial_window(S, pb, L * Rb, false);
    long edge = pole == 0 ? long(w.lo) - 1 : long(w.hi) + 1;  // last sample of D
    if (!w.graph || edge < 0 || edge >= long(N)) {
      D.transition_found = false;
      rep.domains.push_back(D);
      continue;
    }
    D.lo = pole == 0 ? 0 : size_t(edge);
    D.hi = pole == 0 ? size_t(edge) : N - 1;
    const double Hb = S.H(pb);
    double C0 = 1.0;
    for (size_t i = D.lo; i <= D.hi; ++i) {
      C0 = std::max({C0, S.H(i) / Hb, Hb / S.H(i)});
      double l = S.lambda1(i);
      C0 = std::max(C0, l > 0 ? S.H(i) / l : kInf);
    }
    D.diameter = 2.0 * (S.s[D.hi] - S.s[D.lo]);
    C0 = std::max(C0, D.diameter * Hb / (n - 1));
    D.C0 = C0;
    rep.C0_measured = std::max(rep.C0_measured, C0);
    rep.domains.push_back(D);
  }

  const size_t expected = poles == 2 ? 2 : 1;
  std::vector<const CapDomain*> good;
  for (const auto& D : rep.domains)
    if (D.transition_found) good.push_back(&D);
  auto add = [&](std::string name, std::string status, double margin, std::string detail) {
    rep.checks.push_back({std::move(name), std::move(status), margin, std::move(detail)});
  };
  const bool determinate = !truncated && good.size() == expected;
  const std::string why = truncated ? "topology truncated" : "transition point not found";
  auto in_domains = [&](size_t i) {
    for (auto* D : good)
      if (i >= D->lo && i <= D->hi) return true;
    return false;
  };
  // Neck everywhere outside the cap domains.
  if (!determinate) {
    add("necks_outside_caps", "indeterminate", 0.0, why);
  } else {
    double worst = 0.0;
    size_t excluded = 0;
    for (size_t i = 0; i < N; ++i) {
      if (in_domains(i)) continue;
      if (rep.classes[i] == SampleClass::uncovered) {
        ++excluded;
        continue;
      }
      worst = std::max(worst, rep.quality[i]);
    }
    add("necks_outside_caps", worst <= eps0 ? "pass" : "fail", eps0 - worst,
        "uncovered samples excluded: " + std::to_string(excluded));
  }
  // Each cap domain is a run ending at a single pole, hence a ball.
  if (!determinate) {
    add("caps_are_balls", "indeterminate", 0.0, why);
  } else {
    bool ok = true;
    for (auto* D : good) ok = ok && D->lo <= D->hi && (D->lo == 0) != (D->hi == N - 1);
    add("caps_are_balls", ok ? "pass" : "fail", 0.0, std::to_string(good.size()) + " cap domain(s)");
  }
  // The boundary of each cap domain is a cross-section of an (eps0, L)-neck.
  if (!determinate) {
    add("cap_boundary_on_neck", "indeterminate", 0.0, why);
  } else {
    double worst = 0.0;
    for (auto* D : good) {
      size_t b = D->pole == 0 ? D->hi + 1 : D->lo - 1;
      worst = std::max(worst, rep.quality[b]);
    }
    add("cap_boundary_on_neck", worst <= eps0 ? "pass" : "fail", eps0 - worst, "");
  }
  auto bounds = [&](const std::string& suffix, double C0, bool bundle_form) {
    if (!determinate) {
      add("cap_diameter" + suffix, "indeterminate", 0.0, why);
      add("cap_pinching" + suffix, "indeterminate", 0.0, why);
      return;
    }
    double dmargin = kInf, pmargin = kInf;
    for (auto* D : good) {
      double Hb = S.H(D->transition);
      double bound = bundle_form ? C0 / Hb : C0 * (n - 1) / Hb;
      dmargin = std::min(dmargin, (bound - D->diameter) / bound);
      for (size_t i = D->lo; i <= D->hi; ++i) {
        double H = S.H(i);
        pmargin = std::min({pmargin, (C0 * Hb - H) / H, (H - Hb / C0) / H, (S.lambda1(i) - H / C0) / H});
      }
    }
    if (std::isnan(dmargin)) dmargin = 0.0;
    add("cap_diameter" + suffix, dmargin >= 0 ? "pass" : "fail", dmargin, "");
    add("cap_pinching" + suffix, pmargin >= 0 ? "pass" : "fail", pmargin,
        rep.strictly_convex ? "" : "surface is not strictly convex");
  };
  bounds("", rep.C0_measured, false);
  if (C0_bundle > 0) bounds("_bundle", C0_bundle, true);
  return rep;
}

AlignmentResult axis_alignment_check(const std::vector<NeckCertificate>& certs) {
  if (certs.size() < 2) throw PreconditionError("neck_analysis", "axis_alignment_check", "need at least two certificates");
  AlignmentResult a;
  for (const auto& c : certs) a.max_epsilon = std::max(a.max_epsilon, c.epsilon_achieved);
  for (size_t i = 0; i < certs.size(); ++i)
    for (size_t j = i + 1; j < certs.size(); ++j) {
      double d = std::min(1.0, std::abs(certs[i].axis.dot(certs[j].axis)));
      a.max_angle = std::max(a.max_angle, std::acos(d));
      ++a.pairs;
    }
  a.C = a.max_epsilon > 0 ? a.max_angle / a.max_epsilon : (a.max_angle > 0 ? kInf : 0.0);
  return a;
}

EtaCalibration calibrate_eta(const std::vector<const SampledSurface*>& surfaces, double eps0, double L,
                             const std::vector<double>& etas) {
  EtaCalibration cal;
  cal.eta = etas;
  std::sort(cal.eta.begin(), cal.eta.end());
  struct Item {
    double ratio, q;
  };
  std::vector<Item> items;
  for (const auto* S : surfaces)
    for (size_t i = 0; i < S->size(); ++i) {
      if (!(S->H(i) > 0)) continue;
      bool cov;
      double q = q2(*S, i, L, cov);
      if (cov) items.push_back({S->lambda1(i) / S->H(i), q});
    }
  bool ok = true;
  for (double e : cal.eta) {
    size_t cand = 0, acc = 0;
    for (const auto& it : items)
      if (it.ratio <= e) {
        ++cand;
        if (it.q <= eps0) ++acc;
      }
    cal.candidates.push_back(cand);
    cal.accepted.push_back(acc);
    ok = ok && acc == cand;
    if (ok && cand > 0) cal.eta0 = e;
  }
  return cal;
}

}  // namespace mcflab
