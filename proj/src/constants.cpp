#include "mcflab/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mcflab/error.hpp"

namespace mcflab {

HatAB hat_ab(double eta0, double c1) {
  if (!(eta0 > 0.0) || !(c1 > 0.0)) throw PreconditionError("constants_ledger", "hat_ab", "eta0 and c1 must be positive");
  HatAB r;
  double x = 2.0 * std::numbers::pi * c1 / eta0;
  if (x > 700.0) {
    r.overflow = true;
    r.a_hat = std::numeric_limits<double>::infinity();
    r.b_hat = std::numeric_limits<double>::infinity();
    return r;
  }
  r.a_hat = (100.0 / c1) * std::expm1(x) * (1.0 + 1e-6);
  r.b_hat = 2.0 + 100.0 * c1 * r.a_hat;
  return r;
}

double hat_ab_slack(double eta0, double c1, double a_hat) {
  return (eta0 / c1) * std::log1p(c1 * a_hat / 100.0) - 2.0 * std::numbers::pi;
}

double theta_hat(int n, double gamma1) {
  if (n < 2 || gamma1 < 0.0) throw PreconditionError("constants_ledger", "theta_hat", "requires n >= 2, gamma1 >= 0");
  return 1.0 / (2.0 + 2.0 * (2.0 + std::numbers::pi) * n * (n - 1) * gamma1);
}

double curvature_lower_bound(double H_p, double d, int n, double gamma1) {
  if (!(H_p > 0.0) || d < 0.0)
    throw PreconditionError("constants_ledger", "curvature_lower_bound", "requires H_p > 0, d >= 0");
  return 1.0 / (1.0 / H_p + n * gamma1 * d);
}

C0Result structure_C0(double eta2, double theta, double b_hat, double a_hat, int n, double L) {
  if (!(eta2 > 0) || !(theta > 0) || !(b_hat > 0) || !(a_hat > 0) || n < 2 || !(L > 0))
    throw PreconditionError("constants_ledger", "structure_C0", "all inputs must be positive");
  C0Result r;
  r.terms[0] = 1.0 / eta2;
  r.terms[1] = theta;
  r.terms[2] = 2.0 * b_hat;
  r.terms[3] = 2.0 * (a_hat * theta + 100.0 * n * L);
  static const char* names[4] = {"inv_eta2", "theta", "two_b_hat", "a_theta_L"};
  int arg = static_cast<int>(std::max_element(r.terms, r.terms + 4) - r.terms);
  r.value = r.terms[arg];
  r.attained_by = names[arg];
  return r;
}

CapAlpha cap_alpha_bound(double C0) {
  if (!(C0 >= 1.0)) throw PreconditionError("noncollapsing", "cap_alpha_bound", "C0 must be >= 1");
  CapAlpha r;
  r.alpha_tilde = std::pow(C0, -5.0) / 32.0;
  r.alpha_case1 = 0.5 / (C0 * C0);
  return r;
}

ConstantBundle make_bundle(int n, double gamma1, double gamma2, double eta0, double eta2, double L) {
  ConstantBundle b;
  b.n = n;
  b.gamma1 = gamma1;
  b.gamma2 = gamma2;
  b.eta0 = eta0;
  b.eta2 = eta2;
  b.L = L;
  b.c1 = n * gamma1;
  if (!(b.c1 > 0.0)) throw PreconditionError("constants_ledger", "make_bundle", "gamma1 must be positive");
  HatAB ab = hat_ab(eta0, b.c1);
  b.a_hat = ab.a_hat;
  b.b_hat = ab.b_hat;
  b.a_hat_overflow = ab.overflow;
  b.theta_hat = theta_hat(n, gamma1);
  C0Result c0 = structure_C0(eta2, b.theta_hat, b.b_hat, b.a_hat, n, L);
  b.C0 = c0.value;
  b.C0_attained_by = c0.attained_by;
  if (std::isfinite(b.C0)) {
    CapAlpha ca = cap_alpha_bound(b.C0);
    b.alpha_tilde = ca.alpha_tilde;
    b.alpha_case1 = ca.alpha_case1;
  }
  return b;
}

namespace {
// JSON has no infinity; overflowed values are written as null.
nlohmann::json num(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }
double get(const nlohmann::json& j, const char* k) {
  return j.at(k).is_null() ? std::numeric_limits<double>::infinity() : j.at(k).get<double>();
}
}  // namespace

nlohmann::json to_json(const ConstantBundle& b) {
  return {{"n", b.n},
          {"gamma1", b.gamma1},
          {"gamma2", b.gamma2},
          {"eta0", b.eta0},
          {"eta2", b.eta2},
          {"L", b.L},
          {"c1", b.c1},
          {"a_hat", num(b.a_hat)},
          {"b_hat", num(b.b_hat)},
          {"a_hat_overflow", b.a_hat_overflow},
          {"theta_hat", b.theta_hat},
          {"C0", num(b.C0)},
          {"C0_attained_by", b.C0_attained_by},
          {"alpha_tilde", b.alpha_tilde},
          {"alpha_case1", b.alpha_case1}};
}

ConstantBundle bundle_from_json(const nlohmann::json& j) {
  ConstantBundle b;
  b.n = j.at("n").get<int>();
  b.gamma1 = j.at("gamma1").get<double>();
  b.gamma2 = j.at("gamma2").get<double>();
  b.eta0 = j.at("eta0").get<double>();
  b.eta2 = j.at("eta2").get<double>();
  b.L = j.at("L").get<double>();
  b.c1 = j.at("c1").get<double>();
  b.a_hat = get(j, "a_hat");
  b.b_hat = get(j, "b_hat");
  b.a_hat_overflow = j.at("a_hat_overflow").get<bool>();
  b.theta_hat = j.at("theta_hat").get<double>();
  b.C0 = get(j, "C0");
  b.C0_attained_by = j.at("C0_attained_by").get<std::string>();
  b.alpha_tilde = j.at("alpha_tilde").get<double>();
  b.alpha_case1 = j.at("alpha_case1").get<double>();
  return b;
}

}  // namespace mcflab
