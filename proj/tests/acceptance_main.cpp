// Acceptance gate: eleven sequential checks, one verdict line each, with the
// measured quantity printed next to its threshold. Exit status is the number
// of failed checks.

#include "support.hpp"

#include "wavelab/duhamel.hpp"
#include "wavelab/experiments.hpp"
#include "wavelab/fd_solver.hpp"
#include "wavelab/kernels.hpp"
#include "wavelab/linear_wave.hpp"
#include "wavelab/picard.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/radial_data.hpp"
#include "wavelab/spacetime_field.hpp"
#include "wavelab/weights.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

using namespace wavelab;

namespace {

std::string sci(double x, int digits = 3) {
  std::ostringstream os;
  os << std::setprecision(digits) << x;
  return os.str();
}

double loglog_slope(const std::vector<double>& xs,
                    const std::vector<double>& ys) {
  const std::size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(xs[i]), ly = std::log(std::fabs(ys[i]));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Inverse-sqrt window integrand rho/(sqrt(rho^2-a^2) sqrt(b^2-rho^2)); its
// integral over [a,b] is pi/2 for every 0 <= a < b.
SingularIntegrand window(double a, double b) {
  SingularIntegrand q;
  q.a = a;
  q.b = b;
  q.right_exponent = -0.5;
  if (a > 0.0) {
    q.left_exponent = -0.5;
    q.smooth_part = [a, b](double rho) {
      return rho / std::sqrt((rho + a) * (b + rho));
    };
  } else {
    q.left_exponent = 0.0;
    q.smooth_part = [b](double rho) { return 1.0 / std::sqrt(b + rho); };
  }
  return q;
}

// The three tabulated forcings exercised against the operator: a
// cone-supported taper, an oscillating envelope, and a drifting ridge.
SpacetimeField taper_field() {
  const GridSpec g{0.02, 0.04, 2.4, -1.0};
  return SpacetimeField::tabulate(
      g, 1.0,
      [](double r, double t) {
        const double x = r / (t + 1.0);
        if (x >= 1.0)
          return 0.0;
        const double w = 1.0 - x * x;
        return w * w * (1.0 + 0.5 * t);
      },
      true);
}

SpacetimeField wavy_field() {
  const GridSpec g{0.02, 0.04, 2.4, 5.0};
  return SpacetimeField::tabulate(
      g, 1.0,
      [](double r, double t) {
        return std::exp(-2.0 * r * r) * std::cos(3.0 * t + r);
      },
      false);
}

SpacetimeField ridge_field() {
  const GridSpec g{0.02, 0.04, 2.4, 5.0};
  return SpacetimeField::tabulate(
      g, 1.0,
      [](double r, double t) {
        const double s = r - 0.3 - 0.4 * t;
        return (1.0 + 0.5 * t) * std::exp(-1.5 * s * s);
      },
      false);
}

// State reused across the later criteria: the operator ladders feed the
// certificate constants, and the p = 1.5 sweeps feed both the inequality
// check and the scaling fits.
struct Shared {
  DataPair data_nz = make_data_family("bump_positive_g", 1.0, 1.0);
  DataPair data_mz = make_data_family("bump_meanzero_g", 1.0, 1.0);
  std::map<std::string, AprioriReport> ladders;
  std::optional<CertifiedBound> bound_nz, bound_mz;
  std::vector<SweepRecord> sweep_nz15, sweep_mz15;
};

double max_q(const Shared& sh, const std::string& label) {
  const auto& q = sh.ladders.at(label).q_values;
  return *std::max_element(q.begin(), q.end());
}

// Certificate constants assembled exactly the way the estimator does it at
// k = 1: decay-fit envelope plus safety * (largest ladder value), reusing the
// ladders already measured for criterion 7.
const CertifiedBound& ensure_bound(Shared& sh, bool mean_zero) {
  auto& slot = mean_zero ? sh.bound_mz : sh.bound_nz;
  if (!slot) {
    if (sh.ladders.size() != 5)
      throw std::runtime_error("operator ladders unavailable");
    const DataPair& data = mean_zero ? sh.data_mz : sh.data_nz;
    const DecayConstants decay = estimate_decay_constants(data);
    CertifiedConstants c;
    c.C0 = decay.c0_hat;
    c.C0tilde_term = decay.mean_term;
    c.C1_hat = 2.0 * max_q(sh, "basic1");
    c.C2_hat =
        2.0 * std::max({max_q(sh, "basic2"), max_q(sh, "basic3 nu=0"),
                        max_q(sh, "basic3 nu=0.5"), max_q(sh, "basic3 nu=1")});
    slot = certify_lifespan(data, c, 1.5);
  }
  return *slot;
}

void ensure_sweeps15(Shared& sh) {
  if (!sh.sweep_nz15.empty())
    return;
  const FdConfig cfg;
  SweepOptions onz, omz;
  onz.bound = &ensure_bound(sh, false);
  omz.bound = &ensure_bound(sh, true);
  sh.sweep_nz15 = sweep(sh.data_nz, 1.5, default_eps_ladder(), cfg, onz);
  sh.sweep_mz15 = sweep(sh.data_mz, 1.5, default_eps_ladder(), cfg, omz);
}

bool window_identity(std::string& detail) {
  testsupport::Rng rng(0xacce9701);
  QuadratureOptions opt;
  opt.tol = 1e-10;
  const double half_pi = 2.0 * std::atan(1.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    double a = (i % 10 == 0) ? 0.0 : rng.uniform(0.0, 50.0);
    double b = rng.uniform(0.0, 50.0);
    if (b < a)
      std::swap(a, b);
    if (b - a < 1e-3)
      b = a + 1e-3;
    worst =
        std::max(worst, std::fabs(integrate_singular(window(a, b), opt) - half_pi));
  }
  detail = "max |I - pi/2| " + sci(worst) + " over 100 windows (tol 1e-8)";
  return worst < 1e-8;
}

bool circle_vs_angular(std::string& detail) {
  testsupport::Rng rng(0xacce9702);
  const RadialProfile profiles[3] = {bump_profile(1.0, 1.0),
                                     bump_profile(1.7, 0.8),
                                     meanzero_profile(1.0, 1.0)};
  double worst = 0.0;
  for (const auto& b : profiles)
    for (int i = 0; i < 50; ++i) {
      const double r = rng.uniform(0.0, 3.0);
      const double rho = rng.uniform(1e-3, 3.0);
      const auto f = [&](double th) {
        return b(std::sqrt(r * r + rho * rho + 2.0 * r * rho * std::cos(th)));
      };
      const double direct = 2.0 * testsupport::gl20_composite(f, 0.0, M_PI, 64);
      worst =
          std::max(worst, std::fabs(circle_average(b, r, rho, 1e-9) - direct));
    }
  detail = "max deviation " + sci(worst) + " over 3x50 pairs (tol 1e-6)";
  return worst < 1e-6;
}

bool split_vs_direct(std::string& detail) {
  const SpacetimeField fields[3] = {taper_field(), wavy_field(), ridge_field()};
  testsupport::Rng rng(0xacce9703);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double r = rng.uniform(0.0, 2.2);
    const double t = rng.uniform(0.3, 2.4);
    for (const auto& f : fields) {
      const double direct = duhamel_direct(f, r, t, 1e-6);
      const double split = duhamel_radial(f, r, t, 1e-7);
      worst = std::max(worst,
                       std::fabs(split - direct) / (1.0 + std::fabs(direct)));
    }
  }

  const GridSpec flat_grid{0.05, 0.05, 2.4, 5.0};
  const auto flat = SpacetimeField::tabulate(
      flat_grid, 1.0, [](double, double) { return 1.0; }, false);
  const std::pair<double, double> pts[] = {
      {0.4, 1.2}, {1.0, 2.0}, {0.0, 2.4}, {1.8, 0.9}};
  double worst_flat = 0.0;
  for (const auto& [r, t] : pts)
    worst_flat = std::max(
        worst_flat, std::fabs(duhamel_radial(flat, r, t, 1e-8) - 0.5 * t * t));

  detail = "max rel dev " + sci(worst) + " over 3x20 nodes (tol 1e-4); " +
           "unit forcing vs t^2/2 err " + sci(worst_flat) + " (tol 1e-5)";
  return worst <= 1e-4 && worst_flat <= 1e-5;
}

bool caps_dominate(std::string& detail) {
  const SpacetimeField fields[2] = {taper_field(), wavy_field()};
  testsupport::Rng rng(0xacce9704);
  double min_margin = 1e300; // over nodes where the cap is not trivially zero
  int checked = 0;
  bool ok = true;
  const auto probe = [&](double part, double cap) {
    ok = ok && std::fabs(part) <= cap + 1e-6 * (1.0 + cap);
    if (cap > 0.0)
      min_margin = std::min(min_margin, cap - std::fabs(part));
    ++checked;
  };
  for (int i = 0; i < 25; ++i) {
    const double r = rng.uniform(0.05, 2.2);
    const double t = rng.uniform(0.1, 2.4);
    for (const auto& f : fields) {
      probe(duhamel_cone_part(f, r, t, 1e-8), cone_part_bound(f, r, t, 1e-8));
      if (t > r)
        probe(duhamel_core_part(f, r, t, 1e-8),
              core_part_bound(f, r, t, 1e-8));
    }
  }
  detail = "min cap margin " + sci(min_margin) + " over " +
           std::to_string(checked) + " piece evaluations (r >= 0.05)";
  return ok;
}

bool decay_dichotomy(Shared& sh, std::string& detail) {
  std::vector<double> ts, slow, fast;
  for (int i = 0; i < 8; ++i)
    ts.push_back(10.0 * std::pow(10.0, i / 7.0));
  const RadialProfile mz = meanzero_profile(1.0, 1.0);
  for (double t : ts) {
    slow.push_back(poisson_integral_dt(sh.data_nz.f, 0.0, t, 1e-10) +
                   poisson_integral(sh.data_nz.g, 0.0, t, 1e-10));
    fast.push_back(poisson_integral(mz, 0.0, t, 1e-12));
  }
  const double s_slow = loglog_slope(ts, slow);
  const double s_fast = loglog_slope(ts, fast);
  detail = "axis slopes over t in [10,100]: nonzero mean " + sci(s_slow, 4) +
           " (band [-1.1,-0.9]), zero mean " + sci(s_fast, 4) + " (cap -1.8)";
  return s_slow >= -1.1 && s_slow <= -0.9 && s_fast <= -1.8;
}

bool comparison_grid(std::string& detail) {
  double min_margin = 1e300;
  bool all = true;
  for (int j = 0; j <= 18; ++j) {
    const double p = (105 + 5 * j) / 100.0;
    for (int d = 0; d <= 6; ++d) {
      const auto rep = check_comparison(std::pow(10.0, d), 1.0, p);
      all = all && rep.all_hold();
      min_margin = std::min(
          {min_margin, rep.mixed_one_margin(), rep.mixed_pm1_margin()});
    }
  }
  detail = "19 exponents x 7 horizon decades, min margin " + sci(min_margin);
  return all && min_margin > 0.0;
}

bool ladders_bounded(Shared& sh, std::string& detail) {
  const struct {
    const char* label;
    AprioriKind kind;
    double nu;
  } entries[] = {
      {"basic1", AprioriKind::basic1, 0.0},
      {"basic2", AprioriKind::basic2, 0.0},
      {"basic3 nu=0", AprioriKind::basic3, 0.0},
      {"basic3 nu=0.5", AprioriKind::basic3, 0.5},
      {"basic3 nu=1", AprioriKind::basic3, 1.0},
  };
  double worst = 0.0;
  std::ostringstream per_kind;
  for (const auto& e : entries) {
    AprioriSpec spec;
    spec.kind = e.kind;
    spec.nu = e.nu; // p = 1.5, k = 1, horizons {8,16,32,64}, dr/dt defaults
    const AprioriReport rep = verify_apriori(spec);
    worst = std::max(worst, rep.max_ratio());
    per_kind << " " << e.label << " " << sci(rep.max_ratio(), 4) << ";";
    sh.ladders.emplace(e.label, rep);
  }
  detail = "max doubling ratio " + sci(worst, 4) + " (cap 1.2):" +
           per_kind.str();
  return worst <= 1.2;
}

bool iteration_under_smallness(Shared& sh, std::string& detail) {
  const CertifiedBound& bound = ensure_bound(sh, true);
  const double horizon = 8.0;
  double lo = 1e-14, hi = bound.eps0;
  if (bound.t_lower(lo) <= horizon)
    throw std::runtime_error("smallness window empty at the probe floor");
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (bound.t_lower(mid) >= horizon ? lo : hi) = mid;
  }
  const double eps = lo; // largest amplitude still admissible up to t = 8

  const GridSpec grid{0.02, 0.1, horizon, -1.0};
  const auto [fixed_point, trace] =
      picard_iterate(sh.data_mz, eps, 1.5, horizon, 25, grid);
  const double norm3 = weighted_norm(fixed_point, 3, 1.5).value;
  const double residual = picard_residual(sh.data_mz, eps, 1.5, fixed_point);
  const double cap = bound.norm_bound(eps) + 1e-6;

  double max_norm = norm3;
  for (double v : trace.norms)
    max_norm = std::max(max_norm, v);
  double worst_ratio = 0.0;
  for (double v : trace.contraction_ratios)
    worst_ratio = std::max(worst_ratio, v);

  const bool ratios_ok = worst_ratio <= 0.55;
  const bool norms_ok = max_norm <= cap;
  const bool residual_ok = residual <= 1e-6 * (1.0 + norm3);
  detail = "eps " + sci(eps) + ", stop l=" + std::to_string(trace.l_stop) +
           ", " + std::to_string(trace.contraction_ratios.size()) +
           " ratios (cap 0.55), max norm " + sci(max_norm) + " vs cap " +
           sci(cap) + ", residual " + sci(residual);
  return trace.converged && ratios_ok && norms_ok && residual_ok;
}

bool certified_below_blowup(Shared& sh, std::string& detail) {
  ensure_sweeps15(sh);
  int violations = 0, both = 0, total = 0;
  for (const auto* recs : {&sh.sweep_nz15, &sh.sweep_mz15})
    for (const auto& rec : *recs) {
      ++total;
      if (rec.inconsistent)
        ++violations;
      if (rec.t_blowup && rec.t_certified)
        ++both;
    }

  // The default ladder sits far above the validity threshold, so push two
  // amplitudes below it to make the comparison bite.
  const CertifiedBound& bound = ensure_bound(sh, false);
  const std::vector<double> sub = {0.9 * bound.eps0, 0.7 * bound.eps0};
  const FdConfig cfg;
  SweepOptions opt;
  opt.bound = &bound;
  const auto subrecs = sweep(sh.data_nz, 1.5, sub, cfg, opt);
  bool sub_ok = true;
  std::ostringstream os;
  for (const auto& rec : subrecs) {
    if (rec.inconsistent)
      ++violations;
    if (rec.t_blowup && rec.t_certified)
      os << " eps " << sci(rec.eps) << ": " << sci(*rec.t_certified, 4)
         << " <= " << sci(*rec.t_blowup, 6) << ";";
    else
      sub_ok = false;
  }
  detail = "default ladder: " + std::to_string(total) + " records, " +
           std::to_string(both) + " with both bounds, " +
           std::to_string(violations) + " violations; sub-threshold:" +
           os.str();
  return violations == 0 && sub_ok;
}

bool scaling_matches_theory(Shared& sh, std::string& detail) {
  ensure_sweeps15(sh);

  ConstantEstimationSpec quick;
  quick.ladder_horizons = {2.0, 4.0, 8.0, 16.0};
  quick.ladder_dr = 0.1;
  quick.ladder_dt = 0.2;
  const auto b13nz =
      certify_lifespan(sh.data_nz, estimate_constants(sh.data_nz, 1.3, quick), 1.3);
  const auto b13mz =
      certify_lifespan(sh.data_mz, estimate_constants(sh.data_mz, 1.3, quick), 1.3);

  const FdConfig cfg;
  SweepOptions onz, omz;
  onz.bound = &b13nz;
  omz.bound = &b13mz;
  const auto recs_nz13 = sweep(sh.data_nz, 1.3, default_eps_ladder(), cfg, onz);
  const auto recs_mz13 = sweep(sh.data_mz, 1.3, default_eps_ladder(), cfg, omz);

  const struct {
    const char* label;
    const std::vector<SweepRecord>* recs;
    LifespanCase case_id;
  } runs[] = {
      {"nz p1.5", &sh.sweep_nz15, LifespanCase::nonzero_mean},
      {"mz p1.5", &sh.sweep_mz15, LifespanCase::mean_zero},
      {"nz p1.3", &recs_nz13, LifespanCase::nonzero_mean},
      {"mz p1.3", &recs_mz13, LifespanCase::mean_zero},
  };
  bool ok = true;
  std::ostringstream os;
  for (const auto& run : runs) {
    const FitResult fit = fit_scaling(*run.recs, run.case_id);
    const double gap = std::fabs(fit.slope - fit.theory_slope);
    ok = ok && gap <= 0.05;
    os << " " << run.label << " " << sci(fit.slope, 4) << "/"
       << sci(fit.theory_slope, 4) << " gap " << sci(gap, 2) << ";";
  }
  detail = "slope/theory (gap cap 0.05):" + os.str();
  return ok;
}

bool fd_second_order(Shared& sh, std::string& detail) {
  struct Probe {
    double r, t;
  };
  std::vector<Probe> probes;
  for (double t : {0.5, 1.0, 1.5})
    for (double r : {0.0, 0.3, 0.6, 0.9, 1.2, 1.5, 1.8, 2.2}) {
      if (t == 1.0 && r < 0.4)
        continue; // focal point: the error constant there decays late
      probes.push_back({r, t});
    }
  std::vector<double> oracle;
  oracle.reserve(probes.size());
  for (const auto& q : probes)
    oracle.push_back(poisson_integral_dt(sh.data_nz.f, q.r, q.t, 1e-10) +
                     poisson_integral(sh.data_nz.g, q.r, q.t, 1e-10));

  const auto sup_err = [&](double dr) {
    FdConfig cfg(dr, dr / 2.0);
    cfg.nonlinear = false;
    cfg.snapshot_dt = 0.5;
    const FdResult res = fd_solve(sh.data_nz, 1.0, 1.5, cfg, 1.5);
    double worst = 0.0;
    for (std::size_t i = 0; i < probes.size(); ++i)
      worst = std::max(
          worst, std::fabs(res.field(probes[i].r, probes[i].t) - oracle[i]));
    return worst;
  };
  const double coarse = sup_err(0.005);
  const double fine = sup_err(0.0025);
  const double order = std::log2(coarse / fine);
  detail = "sup error " + sci(coarse) + " -> " + sci(fine) +
           " under step halving, observed order " + sci(order, 4) +
           " (floor 1.9)";
  return order >= 1.9;
}

} // namespace

int main() {
  std::cout << "acceptance suite: 11 criteria, p = 1.5 reference runs at k = 1\n";
  Shared sh;

  const struct {
    const char* name;
    std::function<bool(std::string&)> run;
  } criteria[] = {
      {"window quadrature identity", [](std::string& d) { return window_identity(d); }},
      {"circle average vs angular quadrature",
       [](std::string& d) { return circle_vs_angular(d); }},
      {"duhamel split vs direct definition",
       [](std::string& d) { return split_vs_direct(d); }},
      {"explicit caps dominate operator pieces",
       [](std::string& d) { return caps_dominate(d); }},
      {"axis decay dichotomy",
       [&](std::string& d) { return decay_dichotomy(sh, d); }},
      {"norm comparison grid",
       [](std::string& d) { return comparison_grid(d); }},
      {"operator growth ladders bounded",
       [&](std::string& d) { return ladders_bounded(sh, d); }},
      {"iteration under the smallness condition",
       [&](std::string& d) { return iteration_under_smallness(sh, d); }},
      {"certified bound below measured blow-up",
       [&](std::string& d) { return certified_below_blowup(sh, d); }},
      {"blow-up scaling matches theory",
       [&](std::string& d) { return scaling_matches_theory(sh, d); }},
      {"fd scheme second-order vs integral oracle",
       [&](std::string& d) { return fd_second_order(sh, d); }},
  };

  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
      pass = c.run(detail);
    } catch (const std::exception& err) {
      detail = std::string("exception: ") + err.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    std::ostringstream line;
    line << std::setw(2) << index << " [" << (pass ? "PASS" : "FAIL") << "] "
         << std::left << std::setw(42) << c.name << std::right << " " << detail
         << "  [" << std::fixed << std::setprecision(1) << secs << "s]";
    std::cout << line.str() << std::endl;
    failures += pass ? 0 : 1;
  }

  std::cout << (11 - failures) << "/11 criteria passed\n";
  return failures;
}
