#include "wavelab/radial_data.hpp"

#include "wavelab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace wavelab {

namespace {

double bump_value(double r, double k) {
  const double x = r / k;
  if (x >= 1.0)
    return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

} // namespace

RadialProfile bump_profile(double k, double amplitude) {
  if (k <= 0.0)
    throw std::invalid_argument("bump_profile: k must be positive");
  return {[k, amplitude](double r) { return amplitude * bump_value(r, k); }, k};
}

RadialProfile meanzero_profile(double k, double amplitude) {
  if (k <= 0.0)
    throw std::invalid_argument("meanzero_profile: k must be positive");
  // (1 - c (r/k)^2) factor; the vanishing-mean condition is linear in c, so c
  // is the ratio of the two moments.
  QuadratureOptions opt;
  opt.tol = 1e-13;
  const double m0 =
      integrate_smooth([k](double s) { return bump_value(s, k) * s; }, 0.0, k, opt);
  const double m2 = integrate_smooth(
      [k](double s) { return bump_value(s, k) * s * (s / k) * (s / k); }, 0.0, k,
      opt);
  const double c = m0 / m2;
  return {[k, amplitude, c](double r) {
            const double x = r / k;
            return amplitude * bump_value(r, k) * (1.0 - c * x * x);
          },
          k};
}

double planar_moment(const RadialProfile& phi) {
  if (phi.is_zero())
    return 0.0;
  QuadratureOptions opt;
  opt.tol = 1e-12;
  return 2.0 * M_PI *
         integrate_smooth([&phi](double s) { return phi(s) * s; }, 0.0,
                          phi.support_radius, opt);
}

DataPair make_data_family(const std::string& family, double k, double amplitude) {
  DataPair d;
  d.k = k;
  d.family = family;
  if (family == "bump_positive_g") {
    d.f = bump_profile(k, amplitude);
    d.g = bump_profile(k, amplitude);
  } else if (family == "bump_meanzero_g") {
    d.f = RadialProfile{};
    d.g = meanzero_profile(k, amplitude);
  } else if (family == "f_only") {
    d.f = bump_profile(k, amplitude);
    d.g = RadialProfile{};
  } else {
    throw std::invalid_argument("make_data_family: unknown family " + family);
  }
  d.g_moment = planar_moment(d.g);
  const double scale = 2.0 * M_PI *
                       integrate_smooth(
                           [&d](double s) { return std::abs(d.g(s)) * s; }, 0.0,
                           std::max(d.g.support_radius, 1e-30),
                           QuadratureOptions{});
  d.g_mean_zero = std::abs(d.g_moment) <= 1e-9 * std::max(scale, 1e-30);
  return d;
}

} // namespace wavelab
