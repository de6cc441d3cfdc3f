#include "wavelab/weights.hpp"

#include "wavelab/duhamel.hpp"
#include "wavelab/kernels.hpp"
#include "wavelab/parallel.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace wavelab {

namespace {

void require_radius(double k) {
  if (!(k > 0.0))
    throw std::invalid_argument("weights: data radius k must be positive");
}

double horizon_base(double T, double k) {
  require_radius(k);
  return (2.0 * T + 3.0 * k) / k;
}

} // namespace

double tau_plus(double r, double t, double k) {
  require_radius(k);
  return (t + r + 2.0 * k) / k;
}

double tau_minus(double r, double t, double k) {
  require_radius(k);
  return (t - r + 2.0 * k) / k;
}

double weight_value(int weight_id, double r, double t, double k, double p) {
  const double tp = tau_plus(r, t, k);
  switch (weight_id) {
  case 1:
    return std::sqrt(tp * tau_minus(r, t, k));
  case 2:
    return std::sqrt(tp) * std::pow(tau_minus(r, t, k), 1.5);
  case 3:
    return std::pow(tp, 0.5 * p - 1.0);
  default:
    throw std::invalid_argument("weight_value: weight_id must be 1, 2 or 3");
  }
}

NormReport weighted_norm(const SpacetimeField& field, int weight_id,
                         double p) {
  NormReport rep;
  rep.weight_id = weight_id;
  rep.horizon = field.t_max();
  for (std::size_t j = 0; j < field.nt(); ++j) {
    const double t = field.t_at(j);
    for (std::size_t i = 0; i < field.nr(); ++i) {
      const double u = field.at(i, j);
      if (u == 0.0)
        continue;
      const double r = field.r_at(i);
      if (tau_minus(r, t, field.k()) <= 0.0)
        throw std::domain_error(
            "weighted_norm: nonzero sample behind the backward cone");
      const double v = weight_value(weight_id, r, t, field.k(), p) *
                       std::fabs(u);
      if (v > rep.value) {
        rep.value = v;
        rep.argmax_r = r;
        rep.argmax_t = t;
      }
    }
  }
  return rep;
}

double growth_factor_w1(double T, double k, double p) {
  return std::pow(horizon_base(T, k), 3.0 - p);
}

double growth_factor_w3(double T, double k, double p) {
  return std::pow(horizon_base(T, k), 0.5 * gamma_exponent(p, 2));
}

double mixed_growth_factor(double T, double k, double p, double nu) {
  if (!(nu >= 0.0) || !(nu < p))
    throw std::invalid_argument("mixed_growth_factor: need 0 <= nu < p");
  const double base = horizon_base(T, k);
  const double edge = nu + 2.0 / 3.0;
  if (std::fabs(p - edge) <= 1e-12)
    return std::log(base) * std::pow(base, 0.5 * (7.0 / 3.0 - nu) * nu);
  if (p > edge)
    return std::pow(base, 0.5 * nu * (3.0 - p));
  return std::pow(base, 1.0 - 1.5 * p + (3.0 - 0.5 * p) * nu);
}

ComparisonReport check_comparison(double T, double k, double p) {
  ComparisonReport rep;
  const double g3 = growth_factor_w3(T, k, p);
  rep.mixed_one_lhs = mixed_growth_factor(T, k, p, 1.0);
  rep.mixed_one_rhs = std::pow(g3, 1.0 / p);
  rep.mixed_pm1_lhs = mixed_growth_factor(T, k, p, p - 1.0);
  rep.mixed_pm1_rhs = std::pow(g3, (p - 1.0) / (p + 1.0));
  rep.nu_zero_value = mixed_growth_factor(T, k, p, 0.0);
  rep.mixed_one_holds = rep.mixed_one_lhs <= rep.mixed_one_rhs;
  rep.mixed_pm1_holds = rep.mixed_pm1_lhs <= rep.mixed_pm1_rhs;
  rep.nu_zero_holds = std::fabs(rep.nu_zero_value - 1.0) <= 1e-12;
  return rep;
}

double AprioriReport::max_ratio() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < q_values.size(); ++i) {
    if (q_values[i] <= 0.0)
      return std::numeric_limits<double>::infinity();
    worst = std::max(worst, q_values[i + 1] / q_values[i]);
  }
  return worst;
}

std::string AprioriReport::to_json() const {
  nlohmann::json j{{"kind", kind},         {"p", p},
                   {"k", k},               {"nu", nu},
                   {"horizons", horizons}, {"Q", q_values}};
  return j.dump(2);
}

AprioriReport verify_apriori(const AprioriSpec& spec) {
  if (!(spec.p > 1.0) || !(spec.p < 2.0))
    throw std::invalid_argument("verify_apriori: need 1 < p < 2");
  require_radius(spec.k);
  if (spec.kind == AprioriKind::basic3 &&
      (!(spec.nu >= 0.0) || !(spec.nu < spec.p)))
    throw std::invalid_argument("verify_apriori: need 0 <= nu < p");

  const double k = spec.k, p = spec.p, nu = spec.nu;
  std::vector<double> horizons = spec.horizons;
  if (horizons.empty())
    horizons = {8.0 * k, 16.0 * k, 32.0 * k, 64.0 * k};
  if (!std::is_sorted(horizons.begin(), horizons.end()) ||
      horizons.front() <= 0.0)
    throw std::invalid_argument(
        "verify_apriori: horizons must be positive ascending");

  GridSpec gs;
  gs.dr = spec.dr > 0.0 ? spec.dr : k / 20.0;
  gs.dt = spec.dt > 0.0 ? spec.dt : k / 10.0;
  gs.t_max = horizons.back();

  const auto source = [&](double r, double t) {
    switch (spec.kind) {
    case AprioriKind::basic1:
      return std::pow(weight_value(1, r, t, k, p), -p);
    case AprioriKind::basic2:
      return std::pow(weight_value(3, r, t, k, p), -p);
    case AprioriKind::basic3:
      return std::pow(weight_value(2, r, t, k, p), -(p - nu)) *
             std::pow(weight_value(3, r, t, k, p), -nu);
    }
    return 0.0;
  };
  const auto field =
      SpacetimeField::tabulate(gs, k, source, true, spec.workers);
  const int lhs_weight = spec.kind == AprioriKind::basic1 ? 1 : 3;

  // probe nodes: per horizon, a fan of times down to k and radii spanning
  // the axis, the interior, and the edge of the support
  std::vector<std::pair<double, double>> probes;
  for (double T : horizons) {
    for (double t : {T, 0.75 * T, 0.5 * T, 0.25 * T, 4.0 * k, k}) {
      if (t <= 0.0 || t > T)
        continue;
      for (double r : {0.0, 0.25 * t, 0.5 * t, 0.75 * t,
                       std::max(0.0, t - 0.5 * k), t, t + 0.5 * k,
                       t + 0.9 * k}) {
        probes.emplace_back(r, t);
      }
    }
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  const double sup_src = field.max_abs();
  std::vector<double> numerators(probes.size());
  parallel_for(probes.size(), spec.workers, [&](std::size_t i) {
    const auto [r, t] = probes[i];
    const double tol =
        spec.tol_scale * sup_src * std::max(0.5 * t * t, 0.1);
    numerators[i] = duhamel_radial(field, r, t, tol) *
                    weight_value(lhs_weight, r, t, k, p) / (k * k);
  });

  const auto denom = [&](double T) {
    switch (spec.kind) {
    case AprioriKind::basic1:
      return growth_factor_w1(T, k, p);
    case AprioriKind::basic2:
      return growth_factor_w3(T, k, p);
    case AprioriKind::basic3:
      return mixed_growth_factor(T, k, p, nu);
    }
    return 1.0;
  };

  AprioriReport rep;
  switch (spec.kind) {
  case AprioriKind::basic1:
    rep.kind = "basic1";
    break;
  case AprioriKind::basic2:
    rep.kind = "basic2";
    break;
  case AprioriKind::basic3:
    rep.kind = "basic3";
    break;
  }
  rep.p = p;
  rep.k = k;
  rep.nu = nu;
  rep.horizons = horizons;
  for (double T : horizons) {
    double q = 0.0;
    const double d = denom(T);
    for (std::size_t i = 0; i < probes.size(); ++i) {
      if (probes[i].second <= T + 1e-12)
        q = std::max(q, numerators[i] / d);
    }
    rep.q_values.push_back(q);
  }
  return rep;
}

} // namespace wavelab
