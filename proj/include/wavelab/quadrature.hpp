#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace wavelab {

// Thrown when the refinement budget runs out before the tolerance is met.
class QuadratureError : public std::runtime_error {
public:
  QuadratureError(const std::string& msg, double best, double err)
      : std::runtime_error(msg), best_estimate(best), error_bound(err) {}

  double best_estimate;
  double error_bound;
};

// f(x) = smooth_part(x) * (x-a)^left_exponent * (b-x)^right_exponent.
// The endpoint factors are split off analytically so the integrator can remove
// them with the substitutions x = a + s^2 / x = b - s^2. Exponents are limited
// to {0, -1/2}; smooth_part must be finite on the open interval.
struct SingularIntegrand {
  std::function<double(double)> smooth_part;
  double a = 0.0;
  double b = 0.0;
  double left_exponent = 0.0;
  double right_exponent = 0.0;
};

struct QuadratureOptions {
  double tol = 1e-9;         // absolute tolerance
  int max_intervals = 4000;  // bisection budget for one call
};

// Adaptive Gauss-Kronrod 7/15 with an explicit interval stack.
double integrate_smooth(const std::function<double(double)>& f, double a,
                        double b, const QuadratureOptions& opt = {});

// Integrates a SingularIntegrand. Intervals shorter than 1e-14 are treated as
// degenerate slivers and return 0.
double integrate_singular(const SingularIntegrand& q,
                          const QuadratureOptions& opt = {});

} // namespace wavelab
