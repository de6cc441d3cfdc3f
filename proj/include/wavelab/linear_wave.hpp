#pragma once

#include "wavelab/radial_data.hpp"
#include "wavelab/spacetime_field.hpp"

#include <stdexcept>

namespace wavelab {

// Disc-average solution operator of the 2d wave equation,
//   (P phi)(r,t) = (1/2pi) int_{|y-x|<=t} phi(|y|)/sqrt(t^2-|y-x|^2) dy,
// evaluated through the circle average. u_L = d/dt P(f) + P(g).
double poisson_integral(const RadialProfile& phi, double r, double t,
                        double tol = 1e-9);

// Time derivative by Richardson-extrapolated central differences,
// step max(1e-4*k, 1e-6*t); falls back to a one-sided stencil near t = 0 and
// reports it through reduced_accuracy when given.
double poisson_integral_dt(const RadialProfile& phi, double r, double t,
                           double tol = 1e-9, bool* reduced_accuracy = nullptr);

// u_L on the grid (row t=0 is f itself); zero outside {r <= t + k}.
SpacetimeField free_solution_field(const DataPair& data, const GridSpec& grid,
                                   double tol = 1e-9, int workers = 1);

// eps * u_L
SpacetimeField scaled_free_field(const DataPair& data, double eps,
                                 const GridSpec& grid, double tol = 1e-9,
                                 int workers = 1);

struct DecaySpec {
  double horizon = 100.0; // must be >= 100*k
  int n_times = 22;
  int n_radii = 32;
  double tol = 1e-9;
};

// Envelope constants for |u_L| + |d_r u_L| against
//   mean_term / sqrt((t+r+2k)(t-r+2k))  +  c0_hat / ((t+r+2k)^{1/2} (t-r+2k)^{3/2}).
// mean_term is 0 for mean-zero velocity data; otherwise it is fitted on the
// far-field interior where the slow branch dominates, and c0_hat on the
// positive part of the residual.
struct DecayConstants {
  double c0_hat = 0.0;
  double mean_term = 0.0;
  bool mean_zero = true;
  double horizon = 0.0;
  double argmax_r = 0.0;
  double argmax_t = 0.0;

  double cprime0(double k) const { return mean_term + c0_hat / k; }
};

class DecayFitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

DecayConstants estimate_decay_constants(const DataPair& data,
                                        const DecaySpec& spec = {});

} // namespace wavelab
