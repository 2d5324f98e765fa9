#include "clifford/kernels.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <functional>
#include <mutex>

namespace clifford {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
// Integrand cut-off: ln(1e18) below the peak of |integrand|.
const double kTailDrop = std::log(1e18);

// log |exp(a2 e^u - (r^2/4) e^-u) e^(c u)| with a2 = Re(alpha^2) < 0.
struct LogMagnitude {
  double a2, quarter_r2, c;
  double operator()(double u) const { return a2 * std::exp(u) - quarter_r2 * std::exp(-u) + c * u; }
  double slope(double u) const { return a2 * std::exp(u) + quarter_r2 * std::exp(-u) + c; }
};

// Root of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
double solve_bracketed(const std::function<double(double)>& f, double lo, double hi) {
  boost::math::tools::eps_tolerance<double> tol(40);
  std::uintmax_t iters = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  return 0.5 * (a + b);
}

// Integral over t in (0, inf) of exp(alpha^2 t - r^2/(4t)) t^(-power) dt,
// computed over u = ln t with the tails beyond kTailDrop discarded.
Complex heat_integral(Complex alpha2, double r, double power, double tolerance) {
  const LogMagnitude g{alpha2.real(), 0.25 * r * r, 1.0 - power};
  // g is strictly concave; its slope decreases from +inf to -inf.
  auto slope = [&](double u) { return g.slope(u); };
  double lo = -1.0, hi = 1.0;
  while (slope(lo) <= 0.0) lo -= 4.0;
  while (slope(hi) >= 0.0) hi += 4.0;
  const double peak = solve_bracketed(slope, lo, hi);
  const double top = g(peak);
  auto drop = [&](double u) { return g(u) - (top - kTailDrop); };
  double left_lo = peak - 1.0, right_hi = peak + 1.0;
  while (drop(left_lo) > 0.0) left_lo -= 2.0;
  while (drop(right_hi) > 0.0) right_hi += 2.0;
  const double left = solve_bracketed(drop, left_lo, peak);
  const double right = solve_bracketed(drop, peak, right_hi);

  auto integrand = [&](double u) {
    const double t = std::exp(u);
    return std::exp(alpha2 * t - g.quarter_r2 / t + Complex(g.c * u, 0.0));
  };
  double error = 0.0;
  // Split at the peak so each half is monotone in magnitude.
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const Complex below = GK::integrate(integrand, left, peak, 20, tolerance, &error);
  const Complex above = GK::integrate(integrand, peak, right, 20, tolerance, &error);
  return below + above;
}

}  // namespace

double sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

void check_kernel_params(const KernelParams& params) {
  if (params.n < 3) throw UnsupportedParameterError("kernel needs ambient dimension n >= 3");
  const Complex a2 = params.alpha * params.alpha;
  if (a2.real() < 0.0) return;
  if (params.n == 3 && params.alpha.imag() == 0.0) return;
  throw UnsupportedParameterError(
      "Lambda_alpha needs Re(alpha^2) < 0, or real alpha with n = 3 (closed form)");
}

HelmholtzKernel::HelmholtzKernel(KernelParams params) : params_(params) {
  check_kernel_params(params_);
  closed_form_ = params_.n == 3 && params_.alpha.imag() == 0.0;
}

RadialValues HelmholtzKernel::compute(double r) const {
  const Complex alpha = params_.alpha;
  if (closed_form_) {
    // Lambda = -exp(i alpha r)/(4 pi r), Lambda' = -exp(i alpha r)(i alpha r - 1)/(4 pi r^2)
    const Complex phase = std::exp(Complex(0.0, 1.0) * alpha * r);
    return {-phase / (4.0 * kPi * r), -phase * (Complex(0.0, 1.0) * alpha * r - 1.0) / (4.0 * kPi * r * r)};
  }
  const double n = params_.n;
  const double norm = std::pow(4.0 * kPi, -0.5 * n);
  const Complex a2 = alpha * alpha;
  const Complex lam = -norm * heat_integral(a2, r, 0.5 * n, params_.tolerance);
  // d/dr under the integral: -r/(2t) factor.
  const Complex lam_prime = norm * 0.5 * r * heat_integral(a2, r, 0.5 * n + 1.0, params_.tolerance);
  return {lam, lam_prime};
}

RadialValues HelmholtzKernel::radial(double r) const {
  if (!(r > 0.0)) throw SingularityError("kernel evaluated at the origin");
  {
    std::shared_lock lock(mutex_);
    if (auto it = memo_.find(r); it != memo_.end()) return it->second;
  }
  const RadialValues v = compute(r);
  std::unique_lock lock(mutex_);
  memo_.emplace(r, v);
  return v;
}

HelmholtzKernel::Parts HelmholtzKernel::parts(double r) const {
  const RadialValues v = radial(r);
  return {-v.lambda_prime / r, -params_.alpha * v.lambda};
}

KernelValue HelmholtzKernel::eval(const Point& x) const {
  if (x.size() != params_.n) throw ConfigurationError("point dimension does not match kernel");
  const Parts p = parts(x.norm());
  const int dim = algebra_dim();
  KernelValue out{Mv(dim), p.e2, Mv(dim)};
  for (int i = 0; i < params_.n; ++i) out.e1[generator(i)] = p.e1_scale * x[i];
  out.combined = out.e1;
  out.combined[generator(params_.n)] = p.e2;
  return out;
}

Complex lambda_alpha(const Point& x, const KernelParams& params) {
  if (x.size() != params.n) throw ConfigurationError("point dimension does not match kernel");
  return HelmholtzKernel(params).lambda(x.norm());
}

KernelValue eval_kernel(const Point& x, const KernelParams& params) { return HelmholtzKernel(params).eval(x); }

}  // namespace clifford
