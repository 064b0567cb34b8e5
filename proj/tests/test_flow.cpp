#include <doctest.h>

#include <cmath>

#include "mcflab/error.hpp"
#include "mcflab/flow_diagnostics.hpp"
#include "mcflab/models.hpp"
#include "mcflab/profile.hpp"
#include "mcflab/surface.hpp"

using namespace mcflab;

namespace {

RotSymProfile semicircle(int n, size_t N) {
  RotSymProfile p;
  p.n = n;
  p.boundary = Boundary::clamped;
  p.dx = 1.6 / double(N - 1);
  for (size_t i = 0; i < N; ++i) {
    p.x.push_back(-0.8 + double(i) * p.dx);
    p.rho.push_back(std::sqrt(1.0 - p.x.back() * p.x.back()));
  }
  return p;
}

double max_error_vs(const RotSymProfile& a, const RotSymProfile& ref) {
  // ref lives on a grid refined by an integer factor.
  size_t f = ref.size() / a.size();
  double e = 0.0;
  for (size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a.rho[i] - ref.rho[i * f]));
  return e;
}

RotSymProfile evolve_fixed(RotSymProfile p, double dt, int steps, Scheme scheme = Scheme::semi_implicit) {
  FlowOptions o;
  o.scheme = scheme;
  FlowStepper st(o);
  for (int k = 0; k < steps; ++k) p = st.step(p, dt);
  return p;
}

}  // namespace

TEST_CASE("curvature of graph profiles") {
  RotSymProfile c = cylinder_profile(3, 1.0, 10.0, 200, Boundary::periodic);
  CurvatureSpectrum s = curvature_at(c, 17);
  CHECK(std::abs(s.lambdas[0]) < 1e-14);
  CHECK(s.lambdas[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.H == doctest::Approx(2.0).epsilon(1e-14));
  // Semicircle: sphere of radius 1, fourth-order accurate.
  double e1 = 0, e2 = 0;
  RotSymProfile a = semicircle(3, 161), b = semicircle(3, 321);
  for (size_t i = 10; i + 10 < a.size(); ++i)
    for (double l : curvature_at(a, i).lambdas) e1 = std::max(e1, std::abs(l - 1.0));
  for (size_t i = 20; i + 20 < b.size(); ++i)
    for (double l : curvature_at(b, i).lambdas) e2 = std::max(e2, std::abs(l - 1.0));
  CHECK(e1 < 1e-5);
  CHECK(std::log2(e1 / e2) > 3.5);
}

TEST_CASE("bowl as radius over axis agrees with the model") {
  BowlProfile b = bowl_profile(3, 20.0, 0.01);
  RotSymProfile g = bowl_axial_profile(b, 2.0, 18.0, 4001);
  double worst = 0.0;
  for (size_t i = 10; i + 10 < g.size(); i += 50) {
    CurvatureSpectrum s = curvature_at(g, i);
    // Translator: H equals the axial normal component.
    MeridianPoint m = meridian_point(g, i);
    worst = std::max(worst, std::abs(s.H - std::abs(m.nz)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("cylinder radius law") {
  const int n = 3;
  const double r0 = 1.0, T = 0.2 * r0 * r0 / (2 * (n - 1));
  FlowSettings fs;
  fs.t_end = T;
  fs.dt_max = 1e-4;
  FlowTrajectory tr = simulate(cylinder_profile(n, r0, 10.0, 2000, Boundary::periodic), fs);
  double exact = std::sqrt(r0 * r0 - 2.0 * (n - 1) * T);
  const RotSymProfile& last = tr.snapshots.back();
  CHECK(last.time == doctest::Approx(T).epsilon(1e-12));
  for (double r : last.rho) CHECK(std::abs(r - exact) / exact < 1e-3);
  // First order in time.
  RotSymProfile c = cylinder_profile(n, r0, 10.0, 50, Boundary::periodic);
  double ea = std::abs(evolve_fixed(c, T / 50, 50).rho[0] - exact);
  double eb = std::abs(evolve_fixed(c, T / 100, 100).rho[0] - exact);
  CHECK(std::log2(ea / eb) > 0.9);
  // Explicit scheme for cross-validation.
  fs.options.scheme = Scheme::explicit_euler;
  FlowTrajectory te = simulate(cylinder_profile(n, r0, 10.0, 200, Boundary::periodic), fs);
  CHECK(std::abs(te.snapshots.back().rho[5] - exact) / exact < 1e-3);
}

TEST_CASE("spatial convergence order on a perturbed cylinder") {
  auto init = [](size_t N) { return periodic_profile(3, 2 * M_PI, N, [](double x) { return 1.0 + 0.1 * std::cos(x); }); };
  const double dt = 1e-4;
  const int steps = 500;
  RotSymProfile ref = evolve_fixed(init(512), dt, steps);
  double e32 = max_error_vs(evolve_fixed(init(32), dt, steps), ref);
  double e64 = max_error_vs(evolve_fixed(init(64), dt, steps), ref);
  MESSAGE("spatial errors " << e32 << " " << e64 << " order " << std::log2(e32 / e64));
  CHECK(std::log2(e32 / e64) >= 3.5);
  // The explicit scheme converges to the same solution.
  RotSymProfile ex = evolve_fixed(init(64), 0.05 / 2000, 2000, Scheme::explicit_euler);
  RotSymProfile im = evolve_fixed(init(64), 0.05 / 2000, 2000);
  CHECK(max_error_vs(ex, im) < 1e-4);
}

TEST_CASE("sphere extinction and comparison with an enclosing sphere") {
  FlowSettings fs;
  fs.t_end = 0.3;
  fs.dt_max = 1e-3;
  fs.dt_accuracy = 0.005;
  FlowTrajectory tr = simulate(sphere_profile(3, 1.0, 200), fs);
  REQUIRE_FALSE(tr.events.empty());
  double t_ext = tr.events.back().time;
  MESSAGE("extinction " << t_ext);
  CHECK(std::abs(t_ext - 1.0 / 6.0) < 0.01);

  fs.t_end = 0.3;
  fs.snapshot_interval = 0.01;
  FlowTrajectory sp = simulate(spheroid_profile(3, 1.4, 1.0, 300), fs);
  double prev_l1 = -1.0;
  for (const auto& p : sp.snapshots) {
    double R2 = 1.4 * 1.4 - 2.0 * 3 * p.time;
    if (R2 <= 0) break;
    double R = std::sqrt(R2);
    for (size_t i = 0; i < p.size(); ++i) CHECK(std::hypot(p.x[i], p.rho[i]) <= R * (1 + 1e-6));
    // lambda1/H stays bounded below by its initial minimum.
    double l1 = 1.0;
    for (size_t i = 0; i < p.size(); ++i) {
      CurvatureSpectrum s = curvature_at(p, i);
      l1 = std::min(l1, s.lambdas[0] / s.H);
    }
    CHECK(l1 >= prev_l1 - 1e-4);
    prev_l1 = l1;
  }
}

TEST_CASE("dumbbell neck forms in the tube") {
  FlowSettings fs;
  fs.t_end = 0.05;
  fs.dt_max = 1e-3;
  fs.dt_accuracy = 0.002;
  fs.neck_ratio = 0.3;
  FlowTrajectory tr = simulate(dumbbell_profile(3, {}, 600), fs);
  REQUIRE_FALSE(tr.events.empty());
  CHECK(tr.events.back().kind == "neck-formed");
  double prev = 1e9;
  for (const auto& p : tr.snapshots) {
    NeckMin m = neck_minimum(p);
    REQUIRE(m.found);
    CHECK(std::abs(m.x) < 4.5);
    CHECK(m.rho < prev);
    prev = m.rho;
  }
  CHECK_NOTHROW(tr.validate());
}

TEST_CASE("step preconditions") {
  RotSymProfile c = cylinder_profile(3, 1.0, 10.0, 100, Boundary::periodic);
  FlowOptions o;
  o.scheme = Scheme::explicit_euler;
  CHECK_THROWS_AS(step_mcf(c, 0.01, o), PreconditionError);
  CHECK_THROWS_AS(step_mcf(c, -1.0), PreconditionError);
  CHECK_THROWS_AS(simulate(c, FlowSettings{}), PreconditionError);
  FlowSettings fs;
  fs.t_end = 1.0;
  fs.dt_max = 0.01;
  FlowTrajectory tr = simulate(cylinder_profile(3, 0.5, 10.0, 100, Boundary::periodic), fs);
  REQUIRE(tr.events.size() == 1);
  CHECK(tr.events[0].kind == "min-radius-threshold");
  CHECK(tr.events[0].time == doctest::Approx(0.0625).epsilon(0.02));
}

TEST_CASE("derivative norms and gamma estimates") {
  RotSymProfile c = cylinder_profile(3, 1.0, 10.0, 200, Boundary::periodic);
  for (int k = 1; k <= 8; ++k) {
    DerivativeNormEstimate d = derivative_norms(c, 50, k);
    REQUIRE(d.available);
    // Exact value is zero; high orders see amplified round-off.
    CHECK(d.value < 1e-10 * std::pow(c.dx, -k));
  }
  FlowSettings fs;
  fs.t_end = 0.05;
  fs.dt_max = 1e-3;
  fs.snapshot_interval = 0.01;
  GammaEstimate gc = estimate_gammas(simulate(c, fs));
  CHECK(gc.gamma1 < 1e-9);
  CHECK(gc.gamma2 < 1e-9);
  GammaEstimate gs = estimate_gammas(simulate(sphere_profile(3, 1.0, 400), fs));
  MESSAGE("sphere gammas " << gs.gamma1 << " " << gs.gamma2);
  CHECK(gs.gamma1 < 1e-4);
  CHECK(gs.gamma2 < 1e-4);
  // Bowl: positive and stable under grid refinement.
  GammaEstimate b1 = estimate_gammas(bowl_surface(bowl_profile(3, 30.0, 0.02)));
  GammaEstimate b2 = estimate_gammas(bowl_surface(bowl_profile(3, 30.0, 0.01)));
  CHECK(b1.gamma1 > 0.01);
  CHECK(b1.gamma2 > 0.01);
  CHECK(std::abs(b1.gamma1 / b2.gamma1 - 1) < 0.01);
  CHECK(std::abs(b1.gamma2 / b2.gamma2 - 1) < 0.01);
}

TEST_CASE("r_hat construction") {
  RHat r = r_hat(3, 0.1, 0.2);
  CHECK(r.c1 == doctest::Approx(0.3));
  CHECK(r.c2 == doctest::Approx(1.6));
  CHECK(r.r1 == doctest::Approx(1.0 / (2 * 0.3 * 2)));
  CHECK(r.r2 == doctest::Approx(3.0 / (16 * 1.6 * 4)));
  CHECK(r.r_hat == doctest::Approx(std::min(r.r1, std::sqrt(r.r2))));
}

TEST_CASE("curvature control in parabolic neighbourhoods") {
  FlowSettings fs;
  fs.t_end = 0.04;
  fs.dt_max = 1e-3;
  fs.snapshot_interval = 0.002;
  FlowTrajectory cyl = simulate(cylinder_profile(3, 1.0, 10.0, 200, Boundary::periodic), fs);
  ParabolicCheck pc = parabolic_neighborhood_check(cyl, cyl.snapshots.size() - 1, 100, 0.2);
  CHECK(pc.pass);
  CHECK(pc.covered);
  CHECK(pc.min_ratio > 0.9);
  FlowTrajectory sph = simulate(sphere_profile(3, 1.0, 300), fs);
  GammaEstimate g = estimate_gammas(sph);
  ParabolicSweep sw = parabolic_sweep(sph, g, 5, 3);
  CHECK(sw.pass);
  CHECK(sw.violations == 0);
}
