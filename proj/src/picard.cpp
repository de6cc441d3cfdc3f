#include "wavelab/picard.hpp"

#include "wavelab/duhamel.hpp"
#include "wavelab/kernels.hpp"
#include "wavelab/linear_wave.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace wavelab {

namespace {

void require_exponent(double p) {
  if (!(p > 1.0 && p < 2.0))
    throw std::invalid_argument("picard: exponent must lie in (1,2)");
}

int case_weight(const DataPair& data) { return data.g_mean_zero ? 3 : 1; }

// node-wise |u0 + prev|^p on the shared mesh
SpacetimeField forcing_field(const SpacetimeField& u0,
                             const SpacetimeField& prev, double p) {
  SpacetimeField out(u0.grid(), u0.k(), true);
  for (std::size_t j = 0; j < out.nt(); ++j)
    for (std::size_t i = 0; i < out.nr(); ++i) {
      if (!out.inside_cone(i, j))
        continue;
      out.set(i, j, std::pow(std::abs(u0.at(i, j) + prev.at(i, j)), p));
    }
  return out;
}

double diff_norm(const SpacetimeField& a, const SpacetimeField& b,
                 int weight_id, double p) {
  SpacetimeField d(a.grid(), a.k(), a.cone_supported());
  for (std::size_t j = 0; j < d.nt(); ++j)
    for (std::size_t i = 0; i < d.nr(); ++i) {
      if (!d.inside_cone(i, j))
        continue;
      d.set(i, j, a.at(i, j) - b.at(i, j));
    }
  return weighted_norm(d, weight_id, p).value;
}

std::string short_number(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

} // namespace

std::pair<SpacetimeField, IterationTrace>
picard_iterate(const DataPair& data, double eps, double p, double horizon,
               int l_max, const GridSpec& grid, int workers) {
  require_exponent(p);
  if (eps < 0.0)
    throw std::invalid_argument("picard_iterate: eps must be nonnegative");
  if (!(horizon > 0.0))
    throw std::invalid_argument("picard_iterate: horizon must be positive");
  if (horizon > grid.t_max * (1.0 + 1e-12) + 1e-12)
    throw std::invalid_argument(
        "picard_iterate: horizon exceeds the grid's tabulated range");
  if (l_max < 2)
    throw std::invalid_argument("picard_iterate: need at least two iterates");

  GridSpec g = grid;
  g.t_max = horizon;
  g.r_max = -1.0; // cover the influence cone

  const SpacetimeField u0 = scaled_free_field(data, eps, g, 1e-9, workers);

  IterationTrace trace;
  trace.weight_id = case_weight(data);
  trace.norms.push_back(0.0);
  trace.l_stop = 1;

  SpacetimeField cur(g, data.k, true);
  for (int l = 2; l <= l_max; ++l) {
    const SpacetimeField forcing = forcing_field(u0, cur, p);
    SpacetimeField next = apply_duhamel(forcing, workers);
    const double norm = weighted_norm(next, trace.weight_id, p).value;
    const double diff = diff_norm(next, cur, trace.weight_id, p);
    trace.norms.push_back(norm);
    if (!trace.diffs.empty() && trace.diffs.back() > 0.0)
      trace.contraction_ratios.push_back(diff / trace.diffs.back());
    trace.diffs.push_back(diff);
    trace.l_stop = l;
    cur = std::move(next);
    if (!std::isfinite(norm) || norm > 1e8)
      throw PicardDivergenceError("picard_iterate: iterate " +
                                      std::to_string(l) + " has norm " +
                                      short_number(norm) +
                                      ", beyond the 1e8 blow-up range",
                                  l);
    if (diff < 1e-8 * (1.0 + norm)) {
      trace.converged = true;
      break;
    }
  }
  return {std::move(cur), trace};
}

double picard_residual(const DataPair& data, double eps, double p,
                       const SpacetimeField& fixed_point, int workers) {
  require_exponent(p);
  if (eps < 0.0)
    throw std::invalid_argument("picard_residual: eps must be nonnegative");
  const SpacetimeField u0 =
      scaled_free_field(data, eps, fixed_point.grid(), 1e-9, workers);
  const SpacetimeField forcing = forcing_field(u0, fixed_point, p);
  const SpacetimeField applied = apply_duhamel(forcing, workers);
  return diff_norm(fixed_point, applied, case_weight(data), p);
}

std::pair<double, double> compute_M0_and_C(double c0, double c1_hat,
                                           double c2_hat, double p, double k) {
  require_exponent(p);
  if (!(c0 > 0.0) || !(c1_hat > 0.0) || !(c2_hat > 0.0) || !(k > 0.0))
    throw std::invalid_argument(
        "compute_M0_and_C: all inputs must be positive");
  const double c3 = std::max(c1_hat, c2_hat);
  const double m0 = std::pow(2.0, p) * p * c3 * k * k * std::pow(c0, p);
  const double pref = std::pow(std::pow(2.0, 2.0 * p) * p, p / (p - 1.0));
  const double b1 = c1_hat * k * k * std::pow(m0, p - 1.0);
  const double b2 = std::pow(c2_hat * k * k * std::pow(c0, p - 1.0), p);
  const double b3 =
      std::pow(c2_hat * k * k * std::pow(m0, p - 2.0) * c0, p / (p - 1.0));
  return {m0, pref * std::max({b1, b2, b3})};
}

CertifiedConstants estimate_constants(const DataPair& data, double p,
                                      const ConstantEstimationSpec& spec) {
  require_exponent(p);
  const double k = data.k;

  DecaySpec dspec;
  dspec.horizon = spec.decay_horizon > 0.0 ? spec.decay_horizon : 100.0 * k;
  const DecayConstants decay = estimate_decay_constants(data, dspec);

  CertifiedConstants out;
  out.C0 = decay.c0_hat / (k * k);
  out.C0tilde_term = decay.mean_term / k;

  std::vector<double> horizons = spec.ladder_horizons;
  if (horizons.empty())
    horizons = {8.0 * k, 16.0 * k, 32.0 * k, 64.0 * k};
  const double dr = spec.ladder_dr > 0.0 ? spec.ladder_dr : k / 20.0;
  const double dt = spec.ladder_dt > 0.0 ? spec.ladder_dt : k / 10.0;

  auto largest_q = [&](AprioriKind kind, double nu) {
    AprioriSpec aspec;
    aspec.kind = kind;
    aspec.p = p;
    aspec.k = k;
    aspec.nu = nu;
    aspec.horizons = horizons;
    aspec.dr = dr;
    aspec.dt = dt;
    aspec.workers = spec.workers;
    const AprioriReport report = verify_apriori(aspec);
    return *std::max_element(report.q_values.begin(), report.q_values.end());
  };

  const double q1 = largest_q(AprioriKind::basic1, 0.0);
  const double q2 = largest_q(AprioriKind::basic2, 0.0);
  const double q3_zero = largest_q(AprioriKind::basic3, 0.0);
  const double q3_pm1 = largest_q(AprioriKind::basic3, p - 1.0);
  const double q3_one = largest_q(AprioriKind::basic3, 1.0);

  out.C1_hat = spec.safety * q1;
  out.C2_hat = spec.safety * std::max({q2, q3_zero, q3_pm1, q3_one});

  const nlohmann::json prov{
      {"decay",
       {{"horizon", dspec.horizon},
        {"c0_hat", decay.c0_hat},
        {"mean_term", decay.mean_term},
        {"argmax_r", decay.argmax_r},
        {"argmax_t", decay.argmax_t}}},
      {"ladders",
       {{"horizons", horizons},
        {"dr", dr},
        {"dt", dt},
        {"Q_basic1", q1},
        {"Q_basic2", q2},
        {"Q_basic3_nu_zero", q3_zero},
        {"Q_basic3_nu_pm1", q3_pm1},
        {"Q_basic3_nu_one", q3_one}}},
      {"safety", spec.safety}};
  out.provenance = prov.dump();
  return out;
}

double CertifiedBound::t_lower(double eps) const {
  if (!(eps > 0.0) || eps > eps0 * (1.0 + 1e-12))
    throw CertificateRangeError("certificate covers 0 < eps <= " +
                                short_number(eps0) + "; got " +
                                short_number(eps));
  if (case_id == LifespanCase::mean_zero) {
    const double x = constants.C_big * std::pow(eps, p * (p - 1.0));
    return 0.5 * k * (std::pow(x, -2.0 / gamma_exponent(p, 2)) - 3.0);
  }
  const double x = constants.C_big * std::pow(constants.Cprime0 * eps, p - 1.0);
  return 0.5 * k * (std::pow(x, -1.0 / (3.0 - p)) - 3.0);
}

double CertifiedBound::norm_bound(double eps) const {
  if (case_id == LifespanCase::mean_zero)
    return 2.0 * constants.M0 * std::pow(eps, p);
  return 2.0 * constants.M0 * eps;
}

std::string CertifiedBound::to_json() const {
  nlohmann::json j;
  j["case"] = case_id == LifespanCase::mean_zero ? "mean_zero" : "nonzero_mean";
  j["p"] = p;
  j["k"] = k;
  j["eps0"] = eps0;
  j["constants"] = {{"C0", constants.C0},
                    {"C0tilde_term", constants.C0tilde_term},
                    {"Cprime0", constants.Cprime0},
                    {"C1_hat", constants.C1_hat},
                    {"C2_hat", constants.C2_hat},
                    {"C3_hat", constants.C3_hat},
                    {"M0", constants.M0},
                    {"C_big", constants.C_big}};
  j["t_lower_form"] =
      case_id == LifespanCase::mean_zero
          ? "(k/2)*((C_big*eps^(p*(p-1)))^(-2/gamma) - 3)"
          : "(k/2)*((C_big*(Cprime0*eps)^(p-1))^(-1/(3-p)) - 3)";
  j["norm_bound_form"] =
      case_id == LifespanCase::mean_zero ? "2*M0*eps^p" : "2*M0*eps";
  const nlohmann::json prov =
      nlohmann::json::parse(provenance, nullptr, /*allow_exceptions=*/false);
  j["provenance"] = prov.is_discarded() ? nlohmann::json(provenance) : prov;
  return j.dump(2);
}

CertifiedBound certify_lifespan(const DataPair& data,
                                const CertifiedConstants& constants,
                                double p) {
  require_exponent(p);
  const double k = data.k;
  if (!(k > 0.0))
    throw std::invalid_argument("certify_lifespan: k must be positive");
  if (!(constants.C0 > 0.0) || !(constants.C1_hat > 0.0) ||
      !(constants.C2_hat > 0.0) || constants.C0tilde_term < 0.0)
    throw std::invalid_argument(
        "certify_lifespan: envelope and operator constants must be positive");

  CertifiedBound bound;
  bound.p = p;
  bound.k = k;
  bound.case_id = data.g_mean_zero ? LifespanCase::mean_zero
                                   : LifespanCase::nonzero_mean;
  bound.constants = constants;
  CertifiedConstants& c = bound.constants;
  c.Cprime0 = c.C0tilde_term + c.C0;
  c.C3_hat = std::max(c.C1_hat, c.C2_hat);

  if (bound.case_id == LifespanCase::mean_zero) {
    const auto [m0, cbig] = compute_M0_and_C(c.C0, c.C1_hat, c.C2_hat, p, k);
    c.M0 = m0;
    c.C_big = cbig;
    const double g = gamma_exponent(p, 2);
    bound.eps0 =
        std::pow(cbig * std::pow(6.0, 0.5 * g), -1.0 / (p * (p - 1.0)));
  } else {
    // slow-decay branch: uniform-bound constant and smallness prefactor
    c.M0 = c.Cprime0 / (2.0 * p);
    c.C_big = std::pow(2.0, p) * p * c.C1_hat * k * k;
    bound.eps0 =
        std::pow(std::pow(5.0, p - 3.0) / c.C_big, 1.0 / (p - 1.0)) /
        c.Cprime0;
  }
  bound.provenance = constants.provenance.empty() ? "{}" : constants.provenance;
  return bound;
}

ValidationReport validate_certificate(const DataPair& data,
                                      const CertifiedBound& bound, double eps,
                                      const GridSpec& grid,
                                      const ValidateOptions& options) {
  ValidationReport report;
  report.eps = eps;
  // eps = 0 certifies trivially at any horizon; use the grid's own range
  report.horizon = eps == 0.0 ? grid.t_max : bound.t_lower(eps);
  report.norm_cap = bound.norm_bound(eps);

  GridSpec g = grid;
  g.t_max = report.horizon;
  g.r_max = -1.0;

  auto [field, trace] = picard_iterate(data, eps, bound.p, report.horizon,
                                       options.l_max, g, options.workers);
  report.trace = trace;
  report.converged = trace.converged;
  report.max_norm = *std::max_element(trace.norms.begin(), trace.norms.end());
  report.norms_bounded = report.max_norm <= report.norm_cap + 1e-6;

  report.residual =
      picard_residual(data, eps, bound.p, field, options.workers);
  report.residual_cap = 1e-6 * (1.0 + trace.norms.back());
  report.residual_ok = report.residual <= report.residual_cap;

  report.coarse_norm = trace.norms.back();
  if (options.check_refinement) {
    GridSpec fine = g;
    fine.dr = 0.5 * g.dr;
    auto [field2, trace2] = picard_iterate(
        data, eps, bound.p, report.horizon, options.l_max, fine,
        options.workers);
    report.refined_norm = trace2.norms.back();
    const double scale = std::max(
        {std::abs(report.coarse_norm), std::abs(report.refined_norm), 1e-300});
    report.refinement_change =
        std::abs(report.refined_norm - report.coarse_norm) / scale;
    report.refinement_stable = report.refinement_change <= 0.05;
  }
  return report;
}

} // namespace wavelab
