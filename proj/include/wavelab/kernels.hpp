#pragma once

#include "wavelab/quadrature.hpp"
#include "wavelab/radial_data.hpp"

namespace wavelab {

// Interaction kernel of the radially reduced spherical mean:
//   h = {(l+r)^2 - rho^2}^{-1/2} {rho^2 - (l-r)^2}^{-1/2},
// defined on the open region |l - r| < rho < l + r.
struct KernelPoint {
  double lambda;
  double rho;
  double r;
};

double h_kernel(const KernelPoint& q);

// Average of b(|x + rho*w|) over the unit circle in w, |x| = r:
//   r > 0:  4 * int_{|rho-r|}^{rho+r} lambda h(lambda,rho,r) b(lambda) dlambda
//   r = 0:  2*pi*b(rho)
double circle_average(const RadialProfile& b, double r, double rho,
                      double tol = 1e-9);

// gamma(p,n) = 2 + (n+1)p - (n-1)p^2
double gamma_exponent(double p, int n);

// positive root of gamma(.,n): (n+1+sqrt(n^2+10n-7)) / (2(n-1))
double strauss_exponent(int n);

} // namespace wavelab
