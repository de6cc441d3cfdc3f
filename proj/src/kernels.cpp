#include "wavelab/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace wavelab {

// In the variables a = |rho-r|, b = rho+r the kernel factors as
// {(l^2-a^2)(b^2-l^2)}^{-1/2}, which is what both the domain check and the
// endpoint splits below use.
double h_kernel(const KernelPoint& q) {
  const double a = std::abs(q.rho - q.r), b = q.rho + q.r;
  const double l = q.lambda;
  if (!(l > a && l < b))
    throw std::domain_error("h_kernel: point outside |l-r| < rho < l+r");
  const double u = (l - a) * (l + a);
  const double v = (b - l) * (b + l);
  return 1.0 / std::sqrt(u * v);
}

double circle_average(const RadialProfile& b, double r, double rho, double tol) {
  if (rho <= 0.0)
    throw std::invalid_argument("circle_average: rho must be positive");
  if (r < 0.0)
    throw std::invalid_argument("circle_average: r must be nonnegative");
  if (r == 0.0)
    return 2.0 * M_PI * b(rho);

  const double lo = std::abs(rho - r);
  const double hi = rho + r;
  const double cut = std::min(hi, b.support_radius);
  if (b.is_zero() || cut <= lo)
    return 0.0;

  SingularIntegrand q;
  q.a = lo;
  q.left_exponent = -0.5;
  if (cut < hi) {
    // support ends before the singular upper endpoint; the (hi - l) factor
    // stays smooth and is kept in the integrand
    q.b = cut;
    q.right_exponent = 0.0;
    q.smooth_part = [&b, lo, hi](double l) {
      return 4.0 * l * b(l) / std::sqrt((l + lo) * (hi - l) * (hi + l));
    };
  } else {
    q.b = hi;
    q.right_exponent = -0.5;
    q.smooth_part = [&b, lo, hi](double l) {
      return 4.0 * l * b(l) / std::sqrt((l + lo) * (l + hi));
    };
  }
  QuadratureOptions opt;
  opt.tol = tol;
  return integrate_singular(q, opt);
}

double gamma_exponent(double p, int n) {
  if (!(p > 1.0))
    throw std::invalid_argument("gamma_exponent: requires p > 1");
  if (n < 2)
    throw std::invalid_argument("gamma_exponent: requires n >= 2");
  return 2.0 + (n + 1) * p - (n - 1) * p * p;
}

double strauss_exponent(int n) {
  if (n < 2)
    throw std::invalid_argument("strauss_exponent: requires n >= 2");
  const double nn = n;
  return (nn + 1.0 + std::sqrt(nn * nn + 10.0 * nn - 7.0)) / (2.0 * (nn - 1.0));
}

} // namespace wavelab
