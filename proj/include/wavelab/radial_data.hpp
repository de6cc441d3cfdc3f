#pragma once

#include <functional>
#include <string>

namespace wavelab {

// Radial function vanishing outside its support radius.
struct RadialProfile {
  std::function<double(double)> fn;
  double support_radius = 0.0;

  double operator()(double r) const {
    if (!fn || r >= support_radius)
      return 0.0;
    return fn(r);
  }
  bool is_zero() const { return !fn || support_radius <= 0.0; }
};

// Initial displacement/velocity pair (f, g), both supported in {r <= k}.
struct DataPair {
  RadialProfile f;
  RadialProfile g;
  double k = 1.0;
  double g_moment = 0.0; // integral of g over the plane
  bool g_mean_zero = true;
  std::string family;
};

// C^infinity bump: amplitude * exp(1 - 1/(1-(r/k)^2)) on [0,k).
RadialProfile bump_profile(double k, double amplitude);

// bump(r) * (1 - c (r/k)^2) with c fixed so the planar mean vanishes.
RadialProfile meanzero_profile(double k, double amplitude);

// family is one of "bump_positive_g", "bump_meanzero_g", "f_only".
DataPair make_data_family(const std::string& family, double k, double amplitude);

// 2*pi*int_0^k phi(s) s ds
double planar_moment(const RadialProfile& phi);

} // namespace wavelab
