#include "wavelab/duhamel.hpp"

#include "wavelab/parallel.hpp"
#include "wavelab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace wavelab {

double cone_slice_integral(double lambda, double r, double m) {
  if (lambda <= 0.0 || m <= 0.0 || r < 0.0)
    return 0.0;
  const double a = std::fabs(lambda - r);
  if (m <= a)
    return 0.0;
  const double b = lambda + r;
  const double u = std::min(b, m), v = std::max(b, m);
  const double span = (v - a) * (v + a);
  if (span <= 0.0)
    return 0.0;
  // complementary modulus, exact where v - u underflows against v
  const double kp2 = std::max((v - u) * (v + u) / span, 1e-300);
  double K;
  if (kp2 < 1e-8) {
    const double lg = 0.5 * std::log(16.0 / kp2);
    K = lg + 0.25 * kp2 * (lg - 1.0);
  } else {
    K = std::comp_ellint_1(std::sqrt(std::max(0.0, 1.0 - kp2)));
  }
  return K / std::sqrt(span);
}

namespace {

using Fn1 = std::function<double(double)>;

constexpr double kGl3Node = 0.7745966692414834;
constexpr double kGl3Side = 5.0 / 9.0, kGl3Mid = 8.0 / 9.0;

double gl3(const Fn1& g, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  return h * (kGl3Side * (g(c - h * kGl3Node) + g(c + h * kGl3Node)) +
              kGl3Mid * g(c));
}

// Integration aligned to the interpolation lattice: integrands built from a
// tabulated field are smooth inside a cell and only kinked at its edges, so
// one Gauss panel per cell integrates them to lattice accuracy. Adaptive
// subdivision would instead bisect every kink. `cell` is the lattice step
// (0 = no lattice); soft endpoints carry integrable singular/log behavior
// and get a sqrt substitution over a few cells, refined adaptively.
struct CellRule {
  double cell = 0.0;
  double tol = 1e-9; // endpoint panels only
};

double piece_integral(const Fn1& g, double lo, double hi, bool soft_lo,
                      bool soft_hi, const CellRule& rule) {
  if (!(hi - lo > 1e-14 * std::max(1.0, std::fabs(hi))))
    return 0.0;
  double a = lo, b = hi, total = 0.0;
  const double cap = 0.5 * (hi - lo);
  if (soft_lo) {
    const double span =
        rule.cell > 0.0 ? std::min(3.0 * rule.cell, cap) : cap;
    total += integrate_smooth(
        [&](double s) { return 2.0 * s * g(lo + s * s); }, 0.0,
        std::sqrt(span), {rule.tol, 2000});
    a = lo + span;
  }
  if (soft_hi) {
    const double span =
        rule.cell > 0.0 ? std::min(3.0 * rule.cell, cap) : cap;
    total += integrate_smooth(
        [&](double s) { return 2.0 * s * g(hi - s * s); }, 0.0,
        std::sqrt(span), {rule.tol, 2000});
    b = hi - span;
  }
  if (b <= a)
    return total;
  if (rule.cell <= 0.0)
    return total + integrate_smooth(g, a, b, {rule.tol, 4000});
  const long q0 = static_cast<long>(std::floor(a / rule.cell)) + 1;
  const long q1 = static_cast<long>(std::ceil(b / rule.cell)) - 1;
  double x0 = a;
  for (long q = q0; q <= q1; ++q) {
    const double x = q * rule.cell;
    if (x <= x0)
      continue;
    total += gl3(g, x0, x);
    x0 = x;
  }
  total += gl3(g, x0, b);
  return total;
}

// piecewise over interior cuts (kinks), soft flags apply to the outer ends
double cut_integral(const Fn1& g, double lo, double hi,
                    std::vector<double> cuts, bool soft_lo, bool soft_hi,
                    const CellRule& rule) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double x0 = std::max(cuts[i], lo), x1 = std::min(cuts[i + 1], hi);
    if (x1 <= x0)
      continue;
    total += piece_integral(g, x0, x1, soft_lo && x0 == lo,
                            soft_hi && x1 == hi, rule);
  }
  return total;
}

// time-slice integrals of the two decomposition pieces at backward time m
double cone_slice_sum(const SpacetimeField& psi, double r, double t, double m,
                      const CellRule& lam_rule) {
  const double tau = t - m;
  const double lo = std::fabs(m - r);
  const double hi = std::min(m + r, psi.support_radius(tau));
  if (hi <= lo)
    return 0.0;
  const auto g = [&](double lam) {
    return lam * psi(lam, tau) * cone_slice_integral(lam, r, m);
  };
  std::vector<double> cuts;
  if (lo < r && r < hi)
    cuts.push_back(r);
  return (2.0 / M_PI) * cut_integral(g, lo, hi, std::move(cuts),
                                     /*soft_lo=*/m > r, false, lam_rule);
}

double core_slice_sum(const SpacetimeField& psi, double r, double t, double m,
                      const CellRule& lam_rule) {
  const double tau = t - m;
  if (m <= r)
    return 0.0;
  const double cap = m - r;
  const double hi = std::min(cap, psi.support_radius(tau));
  if (hi <= 0.0)
    return 0.0;
  const auto g = [&](double lam) {
    return lam * psi(lam, tau) * cone_slice_integral(lam, r, m);
  };
  std::vector<double> cuts;
  if (r < hi)
    cuts.push_back(r);
  return (2.0 / M_PI) * cut_integral(g, 0.0, hi, std::move(cuts), false,
                                     /*soft_hi=*/hi == cap, lam_rule);
}

// tau-interval on which the cone part can be nonzero, plus interior kinks
void cone_tau_range(const SpacetimeField& psi, double r, double t,
                    double& tau0, double& tau1, std::vector<double>& cuts) {
  tau0 = 0.0;
  tau1 = t;
  if (psi.cone_supported()) {
    tau0 = std::max(0.0, 0.5 * (t - r - psi.k()));
    cuts.push_back(0.5 * (t + r - psi.k())); // upper clip switch
  } else {
    const double R = psi.r_max();
    tau0 = std::max(0.0, t - r - R);
    tau1 = t - std::max(0.0, r - R);
    cuts.push_back(t + r - R);
  }
  cuts.push_back(t - r);
}

struct OpRules {
  CellRule tau, lam;
};

OpRules make_rules(const SpacetimeField& psi, double tol, double range) {
  OpRules rules;
  rules.tau = {psi.grid().dt, 0.25 * tol};
  rules.lam = {psi.grid().dr, 0.25 * tol / std::max(range, 1e-3)};
  return rules;
}

} // namespace

double duhamel_cone_part(const SpacetimeField& psi, double r, double t,
                         double tol) {
  if (r <= 0.0)
    throw std::invalid_argument("duhamel_cone_part: needs r > 0");
  if (t <= 0.0)
    return 0.0;
  double tau0, tau1;
  std::vector<double> cuts;
  cone_tau_range(psi, r, t, tau0, tau1, cuts);
  if (tau1 <= tau0)
    return 0.0;
  const OpRules rules = make_rules(psi, tol, tau1 - tau0);
  return cut_integral(
      [&](double tau) {
        return cone_slice_sum(psi, r, t, t - tau, rules.lam);
      },
      tau0, tau1, std::move(cuts), false, false, rules.tau);
}

double duhamel_core_part(const SpacetimeField& psi, double r, double t,
                         double tol) {
  if (r < 0.0)
    throw std::invalid_argument("duhamel_core_part: needs r >= 0");
  if (t <= r)
    return 0.0;
  const double tau1 = t - r;
  std::vector<double> cuts;
  if (psi.cone_supported())
    cuts.push_back(0.5 * (t - r - psi.k())); // support-vs-window switch
  else
    cuts.push_back(t - r - psi.r_max());
  const OpRules rules = make_rules(psi, tol, tau1);
  return cut_integral(
      [&](double tau) {
        return core_slice_sum(psi, r, t, t - tau, rules.lam);
      },
      0.0, tau1, std::move(cuts), false, false, rules.tau);
}

double duhamel_radial(const SpacetimeField& psi, double r, double t,
                      double tol) {
  if (r < 0.0)
    throw std::invalid_argument("duhamel_radial: needs r >= 0");
  if (t <= 0.0)
    return 0.0;
  if (psi.cone_supported() && r >= t + psi.k())
    return 0.0;

  if (r == 0.0) {
    // polar form: inner integral int_0^min(m,S) rho psi / sqrt(m^2-rho^2)
    std::vector<double> cuts;
    if (psi.cone_supported())
      cuts.push_back(0.5 * (t - psi.k()));
    else
      cuts.push_back(t - psi.r_max());
    const OpRules rules = make_rules(psi, tol, t);
    const auto slice = [&](double tau) {
      const double m = t - tau;
      const double S = psi.support_radius(tau);
      const double hi = std::min(m, S);
      if (hi <= 0.0)
        return 0.0;
      const auto g = [&](double rho) {
        return rho * psi(rho, tau) / std::sqrt((m - rho) * (m + rho));
      };
      return piece_integral(g, 0.0, hi, false, /*soft_hi=*/hi == m,
                            rules.lam);
    };
    return cut_integral(slice, 0.0, t, std::move(cuts), false, false,
                        rules.tau);
  }
  return duhamel_cone_part(psi, r, t, 0.5 * tol) +
         duhamel_core_part(psi, r, t, 0.5 * tol);
}

double duhamel_direct(const SpacetimeField& psi, double r, double t,
                      double tol) {
  (void)tol; // deterministic panel counts tied to the lattice
  if (t <= 0.0)
    return 0.0;
  const double dr = psi.grid().dr, dt = psi.grid().dt;

  const auto composite = [](const Fn1& g, double a, double b, int panels) {
    double s = 0.0, x0 = a;
    const double h = (b - a) / panels;
    for (int q = 1; q <= panels; ++q) {
      const double x1 = (q == panels) ? b : a + q * h;
      s += gl3(g, x0, x1);
      x0 = x1;
    }
    return s;
  };

  const auto disc = [&](double tau) {
    const double m = t - tau;
    if (m <= 0.0)
      return 0.0;
    const auto ring = [&](double rho) {
      const int n_th = std::clamp(static_cast<int>(3.0 * rho / dr) + 1, 8,
                                  2000);
      return 2.0 * composite(
                       [&](double th) {
                         const double lam =
                             std::sqrt(r * r + rho * rho +
                                       2.0 * r * rho * std::cos(th));
                         return psi(lam, tau);
                       },
                       0.0, M_PI, n_th);
    };
    // s = sin(phi) soaks up (1-s^2)^{-1/2}
    const int n_phi =
        std::clamp(static_cast<int>(1.5 * m / dr) + 1, 8, 2000);
    return m / (2.0 * M_PI) *
           composite(
               [&](double phi) {
                 const double s = std::sin(phi);
                 return s * ring(m * s);
               },
               0.0, 0.5 * M_PI, n_phi);
  };
  const int n_tau = std::clamp(static_cast<int>(1.5 * t / dt) + 1, 8, 2000);
  return composite(disc, 0.0, t, n_tau);
}

double cone_part_bound(const SpacetimeField& psi, double r, double t,
                       double tol) {
  if (r <= 0.0)
    throw std::invalid_argument("cone_part_bound: needs r > 0");
  if (t <= 0.0)
    return 0.0;
  double tau0, tau1;
  std::vector<double> cuts;
  cone_tau_range(psi, r, t, tau0, tau1, cuts);
  if (tau1 <= tau0)
    return 0.0;
  const OpRules rules = make_rules(psi, tol, tau1 - tau0);
  const auto slice = [&](double tau) {
    const double m = t - tau;
    const double lo = std::fabs(m - r);
    const double hi = std::min(m + r, psi.support_radius(tau));
    if (hi <= lo)
      return 0.0;
    const double base = t - r - tau; // weight is 1/sqrt(lambda - base)
    const auto g = [&](double lam) {
      return lam * std::fabs(psi(lam, tau)) / std::sqrt(lam - base);
    };
    return piece_integral(g, lo, hi, /*soft_lo=*/base >= 0.0, false,
                          rules.lam);
  };
  return cut_integral(slice, tau0, tau1, std::move(cuts), false, false,
                      rules.tau) /
         std::sqrt(2.0 * r);
}

double core_part_bound(const SpacetimeField& psi, double r, double t,
                       double tol) {
  if (t <= r)
    return 0.0;
  const double tau1 = t - r;
  std::vector<double> cuts;
  if (psi.cone_supported())
    cuts.push_back(0.5 * (t - r - psi.k()));
  else
    cuts.push_back(t - r - psi.r_max());
  const OpRules rules = make_rules(psi, tol, tau1);
  const auto slice = [&](double tau) {
    const double cap = t - r - tau;
    const double hi = std::min(cap, psi.support_radius(tau));
    if (hi <= 0.0)
      return 0.0;
    const auto g = [&](double lam) {
      return lam * std::fabs(psi(lam, tau)) /
             std::sqrt((cap + lam) * (cap - lam));
    };
    return piece_integral(g, 0.0, hi, false, /*soft_hi=*/hi == cap,
                          rules.lam);
  };
  return cut_integral(slice, 0.0, tau1, std::move(cuts), false, false,
                      rules.tau);
}

SpacetimeField apply_duhamel(const SpacetimeField& psi, int workers,
                             double tol_scale) {
  SpacetimeField out(psi.grid(), psi.k(), psi.cone_supported());
  const double sup = psi.max_abs();
  if (sup == 0.0)
    return out;
  parallel_for(out.nt(), workers, [&](std::size_t j) {
    if (j == 0)
      return;
    const double t = out.t_at(j);
    const double tol = tol_scale * sup * std::max(0.5 * t * t, 0.1);
    for (std::size_t i = 0; i < out.nr(); ++i) {
      const double r = out.r_at(i);
      if (psi.cone_supported() && r >= t + psi.k())
        break;
      out.set(i, j, duhamel_radial(psi, r, t, tol));
    }
  });
  return out;
}

} // namespace wavelab
