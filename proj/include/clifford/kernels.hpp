#pragma once

// Helmholtz fundamental solution Lambda_alpha in R^n and the perturbed Cauchy
// kernel E_alpha = -(d_x + alpha e_{m+1}) Lambda_alpha = E1 + e_{m+1} E2.

#include <map>
#include <shared_mutex>

#include "clifford/algebra.hpp"
#include "clifford/fields.hpp"

namespace clifford {

struct KernelParams {
  int n = 3;  // ambient dimension m+1
  Complex alpha{0.0, 1.0};
  double tolerance = 1e-10;
};

// Lambda and its radial derivative at one radius.
struct RadialValues {
  Complex lambda;
  Complex lambda_prime;
};

struct KernelValue {
  Mv e1;        // pure 1-vector in e_0..e_m
  Complex e2;   // scalar
  Mv combined;  // e1 + e_{m+1} e2
};

// Surface area of the unit sphere in R^n: 2 pi^(n/2) / Gamma(n/2).
double sphere_area(int n);

// Radial profile of Lambda_alpha with a read-through memo keyed by radius.
// Direct evaluation of the heat-kernel integral needs Re(alpha^2) < 0; for
// real alpha and n = 3 the closed form -exp(i alpha r)/(4 pi r) is used.
// Everything else is rejected with UnsupportedParameterError.
class HelmholtzKernel {
 public:
  explicit HelmholtzKernel(KernelParams params);

  const KernelParams& params() const { return params_; }
  int algebra_dim() const { return params_.n + 1; }

  RadialValues radial(double r) const;
  Complex lambda(double r) const { return radial(r).lambda; }

  // Coefficients of E1 = g(r) x and E2 at x: g = -Lambda'(r)/r, E2 = -alpha Lambda.
  struct Parts {
    Complex e1_scale;
    Complex e2;
  };
  Parts parts(double r) const;

  KernelValue eval(const Point& x) const;

 private:
  RadialValues compute(double r) const;

  KernelParams params_;
  bool closed_form_;
  mutable std::shared_mutex mutex_;
  mutable std::map<double, RadialValues> memo_;
};

// Throws UnsupportedParameterError for (n, alpha) outside the supported set.
void check_kernel_params(const KernelParams& params);

Complex lambda_alpha(const Point& x, const KernelParams& params);
KernelValue eval_kernel(const Point& x, const KernelParams& params);

}  // namespace clifford
