#pragma once

#include <string>

#include <json.hpp>

namespace mcflab {

struct HatAB {
  double a_hat = 0.0;
  double b_hat = 0.0;
  bool overflow = false;  // exponent too large, values saturated to +inf
};

HatAB hat_ab(double eta0, double c1);
// (eta0/c1) log(1 + c1 a/100) - 2 pi, positive when a is admissible.
double hat_ab_slack(double eta0, double c1, double a_hat);

double theta_hat(int n, double gamma1);

double curvature_lower_bound(double H_p, double d, int n, double gamma1);

struct C0Result {
  double value = 0.0;
  std::string attained_by;  // "inv_eta2" | "theta" | "two_b_hat" | "a_theta_L"
  double terms[4] = {0, 0, 0, 0};
};

C0Result structure_C0(double eta2, double theta, double b_hat, double a_hat, int n, double L);

struct CapAlpha {
  double alpha_tilde = 0.0;
  double alpha_case1 = 0.0;
};

CapAlpha cap_alpha_bound(double C0);

struct ConstantBundle {
  int n = 3;
  double gamma1 = 0.0, gamma2 = 0.0;
  double eta0 = 0.0, eta2 = 0.0;
  double L = 0.0;
  double c1 = 0.0;
  double a_hat = 0.0, b_hat = 0.0;
  bool a_hat_overflow = false;
  double theta_hat = 0.0;
  double C0 = 0.0;
  std::string C0_attained_by;
  double alpha_tilde = 0.0, alpha_case1 = 0.0;
};

ConstantBundle make_bundle(int n, double gamma1, double gamma2, double eta0, double eta2, double L);

nlohmann::json to_json(const ConstantBundle& b);
ConstantBundle bundle_from_json(const nlohmann::json& j);

}  // namespace mcflab
