#pragma once

// Shared helpers for the unit tests. The fixed-rule integrator below is the
// independent oracle used against the adaptive code: plain composite 20-point
// Gauss-Legendre, no refinement logic shared with the library.

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace testsupport {

inline double gl20(const std::function<double(double)>& f, double a, double b) {
  static const double x[10] = {
      0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
      0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
      0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
      0.9931285991850949};
  static const double w[10] = {
      0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
      0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
      0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
      0.0176140071391521};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 10; ++i)
    s += w[i] * (f(c + h * x[i]) + f(c - h * x[i]));
  return s * h;
}

inline double gl20_composite(const std::function<double(double)>& f, double a,
                             double b, int panels) {
  double s = 0.0;
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i)
    s += gl20(f, a + i * h, a + (i + 1) * h);
  return s;
}

// Reproducible uniforms, independent of libstdc++ distribution internals.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  double uniform(double lo, double hi) {
    const double u = (eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
  std::uint64_t raw() { return eng_(); }

private:
  std::mt19937_64 eng_;
};

} // namespace testsupport
