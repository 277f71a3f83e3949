#pragma once

#include "wsob/admissible.hpp"
#include "wsob/forms.hpp"
#include "wsob/quadrature.hpp"

#include <functional>
#include <string>
#include <vector>

namespace wsob {

/// w(x) = R_eps(x)^exponent, or 1 without a field.
struct Weight {
  const RadiusField* field = nullptr;
  double exponent = 0.0;

  double at(const Vec& x) const;
  bool trivial() const { return field == nullptr || exponent == 0.0; }
};

double weight_at(const Vec& x, double gamma, const RadiusField& field);

struct SobolevParams {
  int n = 0;
  int m = 1;
  int k = 0;
  double r = 2.0;
  double s = 0.0;
  double gamma = 0.0;
  double nu = 0.0;

  /// Derives s from 1/s = 1/r - (m-k)/n and nu = s(2 + gamma/r).
  static SobolevParams make(int n, int m, int k, double r, double gamma);
};

/// (sum_q w_q |f(x_q)|^tau w(x_q) sqrt(det g))^(1/tau) for a pointwise modulus f.
double lp_integral(const Manifold& M, const Quadrature& q, double tau, const Weight& w,
                   const std::function<double(const Vec&)>& modulus);

double lp_norm(const Manifold& M, const FormField& f, const Quadrature& q, double tau, const Weight& w = {});
double lp_norm(const Manifold& M, const FormField& f, const Box& region, double tau, const Weight& w = {},
               int nodes = kWindowNodes);
double lp_norm(const Manifold& M, const FormField& f, const BallRegion& ball, double tau, const Weight& w = {},
               int nodes = kBallNodes);

/// ||nabla^j f||_{L^r(w)} for j = 0..k.
std::vector<double> sobolev_terms(const Manifold& M, const FormField& f, const Quadrature& q, int k, double r,
                                  const Weight& w = {});
double sobolev_norm(const Manifold& M, const FormField& f, const Quadrature& q, int k, double r,
                    const Weight& w = {});
double sobolev_norm(const Manifold& M, const FormField& f, const Box& region, int k, double r, const Weight& w = {},
                    int nodes = kWindowNodes);
double sobolev_norm(const Manifold& M, const FormField& f, const BallRegion& ball, int k, double r,
                    const Weight& w = {}, int nodes = kBallNodes);

/// Window rule restricted to the field support.
Quadrature support_rule(const Manifold& M, const FormField& f, int nodes = kWindowNodes);
BallRegion ball_region(const AdmissibleBall& b, double scale = 1.0);

struct ChartComparison {
  // M side over B(x, R); flat side of the pulled-back field over B_e(0, t R).
  double m_L = 0, m_grad = 0, m_W = 0;
  double inner_L = 0, inner_grad = 0, inner_W = 0;   // t = 1 - eps
  double same_L = 0, same_grad = 0, same_W = 0;      // t = 1
  double outer_L = 0, outer_grad = 0, outer_W = 0;   // t = 1 + eps
  double factor_up = 0;    // ||w||_W(B) / ||v||_W(B_e((1+eps)R))
  double factor_down = 0;  // ||v||_W(B_e((1-eps)R)) / ||w||_W(B)
  double c_up = 0;         // C with factor_up = (1 + C eps) / R
  double c_down = 0;
};

ChartComparison chart_comparison(const Manifold& M, const FormField& f, const AdmissibleBall& ball, double r,
                                 int nodes = kBallNodes);

struct Covering;

struct LocalizationReport {
  double global = 0.0;       // ||f||^tau_{L^tau(M, R^mu)}
  double covering_sum = 0.0; // sum_x R(x)^mu ||f||^tau_{L^tau(B(x, R(x)))}
  double ratio = 0.0;
  double lower = 0.0, upper = 0.0;
  bool ok = false;
  std::size_t balls_used = 0;
};

LocalizationReport localization_check(const Manifold& M, const FormField& f, const Covering& cover, double tau,
                                      double mu, const RadiusField& field, double T);

/// sum a^r <= (sum a^s)^(r/s) for r >= s >= 1.
bool lp_sequence_compare(const std::vector<double>& a, double r, double s);

struct HolderReport {
  double lhs = 0.0;   // ||w||_{L^r(B)}
  double rhs = 0.0;   // R^{n/r - n/s} ||w||_{L^s(B)}
  double c = 0.0;
  double envelope = 0.0;
  bool vacuous = false;
  bool ok = true;
};

HolderReport holder_ball_check(const Manifold& M, const FormField& f, const AdmissibleBall& ball, double r, double s,
                               double slack = 0.10, int nodes = kBallNodes);

}  // namespace wsob
