#pragma once

#include "wavelab/radial_data.hpp"
#include "wavelab/spacetime_field.hpp"
#include "wavelab/weights.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wavelab {

// Successive-approximation record. norms[i] is the case-norm of iterate
// U_{i+1} (so norms.front() = 0 for U_1 = 0), diffs[i] the norm of
// U_{i+2} - U_{i+1}, and contraction_ratios the successive diff quotients
// (skipping exactly-zero denominators).
struct IterationTrace {
  std::vector<double> norms;
  std::vector<double> diffs;
  std::vector<double> contraction_ratios;
  bool converged = false;
  int l_stop = 0;
  int weight_id = 3; // 3: mean-zero velocity data, 1: nonzero planar mean
};

class PicardDivergenceError : public std::runtime_error {
public:
  PicardDivergenceError(const std::string& what, int iterate)
      : std::runtime_error(what), first_bad_iterate(iterate) {}
  int first_bad_iterate;
};

class CertificateRangeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// U_1 = 0, U_l = L(|u0 + U_{l-1}|^p) on the grid clipped to the horizon.
// Stops once the update norm falls under 1e-8 * (1 + norm) or at l_max;
// iterate norms beyond 1e8 abort with PicardDivergenceError.
std::pair<SpacetimeField, IterationTrace>
picard_iterate(const DataPair& data, double eps, double p, double horizon,
               int l_max, const GridSpec& grid, int workers = 1);

// Case-norm of U - L(|u0 + U|^p) on the grid of U.
double picard_residual(const DataPair& data, double eps, double p,
                       const SpacetimeField& fixed_point, int workers = 1);

// M0 = 2^p p max(C1,C2) k^2 C0^p and the smallness constant
// C = (2^{2p} p)^{p/(p-1)} max{C1 k^2 M0^{p-1}, (C2 k^2 C0^{p-1})^p,
//                              (C2 k^2 M0^{p-2} C0)^{p/(p-1)}}.
std::pair<double, double> compute_M0_and_C(double c0, double c1_hat,
                                           double c2_hat, double p, double k);

enum class LifespanCase { mean_zero, nonzero_mean };

// Envelope and operator constants feeding the certificate. All constants
// use the tau-weight convention of weighted_norm: C0 bounds sup |u_L| w2
// per unit of data size, C0tilde_term is the g-moment branch's w1-envelope
// coefficient, and C1_hat/C2_hat bound the Duhamel amplification measured
// by verify_apriori. Derived fields are filled by certify_lifespan.
struct CertifiedConstants {
  double C0 = 0.0;
  double C0tilde_term = 0.0;
  double Cprime0 = 0.0; // derived: C0tilde_term + C0
  double C1_hat = 0.0;
  double C2_hat = 0.0;
  double C3_hat = 0.0; // derived: max(C1_hat, C2_hat)
  double M0 = 0.0;     // derived; see norm_bound for the per-case meaning
  double C_big = 0.0;  // derived smallness constant
  std::string provenance; // grid/ladder metadata for the estimated entries
};

struct ConstantEstimationSpec {
  std::vector<double> ladder_horizons; // empty: {8k, 16k, 32k, 64k}
  double ladder_dr = 0.0;              // <= 0: k/20
  double ladder_dt = 0.0;              // <= 0: k/10
  double safety = 2.0;
  double decay_horizon = 0.0;          // <= 0: 100k
  int workers = 1;
};

// Measures C0/C0tilde_term from the linear-decay fit and C1_hat/C2_hat as
// safety * (largest normalized ladder value) over the operator ladders.
CertifiedConstants estimate_constants(const DataPair& data, double p,
                                      const ConstantEstimationSpec& spec = {});

// Lifespan lower bound with an explicit validity threshold eps0.
struct CertifiedBound {
  LifespanCase case_id = LifespanCase::mean_zero;
  CertifiedConstants constants;
  double p = 0.0;
  double k = 0.0;
  double eps0 = 0.0;
  std::string provenance;

  // mean-zero: (k/2) [ (C eps^{p(p-1)})^{-2/gamma} - 3 ]
  // nonzero:   (k/2) [ (2^p p C1 k^2 (C'0 eps)^{p-1})^{-1/(3-p)} - 3 ]
  // Throws CertificateRangeError outside (0, eps0].
  double t_lower(double eps) const;

  // Guaranteed iterate-norm cap: 2 M0 eps^p (mean-zero case, norm 3) or
  // 2 M0 eps (nonzero-mean case, norm 1, M0 = C'0/(2p)).
  double norm_bound(double eps) const;

  std::string to_json() const;
};

CertifiedBound certify_lifespan(const DataPair& data,
                                const CertifiedConstants& constants, double p);

struct ValidateOptions {
  int l_max = 25;
  bool check_refinement = true;
  int workers = 1;
};

struct ValidationReport {
  double eps = 0.0;
  double horizon = 0.0;
  double norm_cap = 0.0;
  double max_norm = 0.0;
  double residual = 0.0;
  double residual_cap = 0.0;
  double coarse_norm = 0.0;
  double refined_norm = 0.0;
  double refinement_change = 0.0;
  IterationTrace trace;
  bool converged = false;
  bool norms_bounded = false;
  bool residual_ok = false;
  bool refinement_stable = true;

  bool valid() const {
    return converged && norms_bounded && residual_ok && refinement_stable;
  }
};

// Runs the iteration up to t_lower(eps) on the given mesh resolution and
// checks the certificate's claims: convergence, the norm cap (+1e-6 slack),
// the fixed-point residual, and stability under halving dr.
ValidationReport validate_certificate(const DataPair& data,
                                      const CertifiedBound& bound, double eps,
                                      const GridSpec& grid,
                                      const ValidateOptions& options = {});

} // namespace wavelab
