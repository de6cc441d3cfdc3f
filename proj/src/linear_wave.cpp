#include "wavelab/linear_wave.hpp"

#include "wavelab/kernels.hpp"
#include "wavelab/parallel.hpp"
#include "wavelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace wavelab {

double poisson_integral(const RadialProfile& phi, double r, double t, double tol) {
  if (t < 0.0)
    throw std::invalid_argument("poisson_integral: t must be nonnegative");
  if (phi.is_zero() || t == 0.0)
    return 0.0;
  const double k = phi.support_radius;
  if (r >= t + k)
    return 0.0;

  const double rho0 = std::max(0.0, r - k);
  const double rho1 = std::min(t, r + k);
  if (rho1 <= rho0)
    return 0.0;

  // error in the circle average enters through
  // (1/2pi) int rho (t^2-rho^2)^{-1/2}, so budget the inner tolerance by that
  const double amp = (std::sqrt(std::max(0.0, t * t - rho0 * rho0)) -
                      std::sqrt(std::max(0.0, t * t - rho1 * rho1))) /
                     (2.0 * M_PI);
  const double ca_tol = 0.3 * tol / std::max(amp, 1e-3);
  const auto weighted_average = [&](double rho) {
    if (rho <= 0.0)
      return 0.0;
    return rho * circle_average(phi, r, rho, ca_tol) / (2.0 * M_PI);
  };

  QuadratureOptions opt;
  opt.tol = 0.5 * tol;
  if (rho1 >= t - 1e-14 * std::max(1.0, t)) {
    SingularIntegrand q;
    q.a = rho0;
    q.b = t;
    q.right_exponent = -0.5;
    q.smooth_part = [&](double rho) {
      return weighted_average(rho) / std::sqrt(t + rho);
    };
    return integrate_singular(q, opt);
  }
  return integrate_smooth(
      [&](double rho) {
        return weighted_average(rho) / std::sqrt((t - rho) * (t + rho));
      },
      rho0, rho1, opt);
}

double poisson_integral_dt(const RadialProfile& phi, double r, double t,
                           double tol, bool* reduced_accuracy) {
  if (reduced_accuracy)
    *reduced_accuracy = false;
  if (phi.is_zero())
    return 0.0;
  if (t < 0.0)
    throw std::invalid_argument("poisson_integral_dt: t must be nonnegative");
  const double k = phi.support_radius;
  if (r > t + k + 1e-12)
    return 0.0;

  const double delta = std::max(1e-4 * k, 1e-6 * t);
  const double rtol = 0.125 * tol * delta;
  const auto R = [&](double tt) { return poisson_integral(phi, r, tt, rtol); };

  if (t > 2.0 * delta) {
    const double d1 = (R(t + delta) - R(t - delta)) / (2.0 * delta);
    const double d2 = (R(t + 0.5 * delta) - R(t - 0.5 * delta)) / delta;
    return (4.0 * d2 - d1) / 3.0;
  }
  if (reduced_accuracy)
    *reduced_accuracy = true;
  return (-3.0 * R(t) + 4.0 * R(t + delta) - R(t + 2.0 * delta)) /
         (2.0 * delta);
}

SpacetimeField free_solution_field(const DataPair& data, const GridSpec& grid,
                                   double tol, int workers) {
  SpacetimeField u(grid, data.k, true);
  parallel_for(u.nt(), workers, [&](std::size_t j) {
    const double t = u.t_at(j);
    for (std::size_t i = 0; i < u.nr(); ++i) {
      const double r = u.r_at(i);
      if (r > t + data.k)
        break;
      if (j == 0) {
        u.set(i, 0, data.f(r));
        continue;
      }
      const double val = poisson_integral_dt(data.f, r, t, tol) +
                         poisson_integral(data.g, r, t, tol);
      u.set(i, j, val);
    }
  });
  return u;
}

SpacetimeField scaled_free_field(const DataPair& data, double eps,
                                 const GridSpec& grid, double tol, int workers) {
  return free_solution_field(data, grid, tol, workers).scaled(eps);
}

namespace {

struct Sample {
  double r, t, value; // value = |u_L| + |d_r u_L|
};

std::vector<Sample> decay_samples(const DataPair& data, const DecaySpec& spec,
                                  double k) {
  // log-spaced times, radii fanned over [0, t+k] with extra points hugging the
  // light cone where the fast-decay branch peaks
  std::vector<double> times;
  const double t_lo = 0.25 * k;
  for (int j = 0; j < spec.n_times; ++j)
    times.push_back(t_lo * std::pow(spec.horizon / t_lo,
                                    double(j) / (spec.n_times - 1)));

  std::vector<double> fractions;
  const int n_uniform = (2 * spec.n_radii) / 3;
  for (int i = 0; i < n_uniform; ++i)
    fractions.push_back(double(i) / n_uniform);
  for (int i = 0; fractions.size() < static_cast<std::size_t>(spec.n_radii); ++i)
    fractions.push_back(1.0 - 0.2 * std::pow(0.5, i));

  std::vector<Sample> out(times.size() * fractions.size());
  parallel_for(times.size(), 1, [&](std::size_t j) {
    const double t = times[j];
    const double h = 1e-3 * k;
    for (std::size_t i = 0; i < fractions.size(); ++i) {
      const double r = fractions[i] * (t + k);
      const auto ul = [&](double rr) {
        return poisson_integral_dt(data.f, rr, t, spec.tol) +
               poisson_integral(data.g, rr, t, spec.tol);
      };
      const double u0 = ul(r);
      const double um = ul(std::max(0.0, r - h));
      const double up = ul(r + h);
      const double du = (up - um) / (r - h >= 0.0 ? 2.0 * h : h);
      out[j * fractions.size() + i] = {r, t, std::abs(u0) + std::abs(du)};
    }
  });
  return out;
}

} // namespace

DecayConstants estimate_decay_constants(const DataPair& data,
                                        const DecaySpec& spec) {
  const double k = data.k;
  if (spec.horizon < 100.0 * k)
    throw std::invalid_argument(
        "estimate_decay_constants: horizon must be at least 100k");

  DecayConstants out;
  out.mean_zero = data.g_mean_zero;
  out.horizon = spec.horizon;
  if (data.f.is_zero() && data.g.is_zero())
    return out;

  const auto samples = decay_samples(data, spec, k);

  const auto slow_weight = [&](const Sample& s) {
    return std::sqrt((s.t + s.r + 2 * k) * (s.t - s.r + 2 * k));
  };
  const auto fast_weight = [&](const Sample& s) {
    return std::sqrt(s.t + s.r + 2 * k) * std::pow(s.t - s.r + 2 * k, 1.5);
  };

  if (!out.mean_zero) {
    // slow branch fitted in the deep interior far field where it dominates
    for (const auto& s : samples)
      if (s.t >= 0.5 * spec.horizon && s.r <= 0.5 * s.t)
        out.mean_term = std::max(out.mean_term, s.value * slow_weight(s));
  }

  bool any_positive = false;
  for (const auto& s : samples) {
    const double residual =
        s.value - (out.mean_term > 0.0 ? out.mean_term / slow_weight(s) : 0.0);
    if (residual <= 0.0)
      continue;
    any_positive = true;
    const double cand = residual * fast_weight(s);
    if (cand > out.c0_hat) {
      out.c0_hat = cand;
      out.argmax_r = s.r;
      out.argmax_t = s.t;
    }
  }
  if (!any_positive)
    throw DecayFitError("estimate_decay_constants: residual nowhere positive");
  return out;
}

} // namespace wavelab
