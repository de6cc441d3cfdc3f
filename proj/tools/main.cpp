#include "CLI11.hpp"
#include "json.hpp"

#include "wavelab/duhamel.hpp"
#include "wavelab/experiments.hpp"
#include "wavelab/fd_solver.hpp"
#include "wavelab/kernels.hpp"
#include "wavelab/linear_wave.hpp"
#include "wavelab/picard.hpp"
#include "wavelab/quadrature.hpp"
#include "wavelab/radial_data.hpp"
#include "wavelab/weights.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct RunConfig {
  std::string subcommand;
  double p = 1.5;
  double k = 1.0;
  double eps = 0.0; // 0 = not given
  std::vector<double> eps_list;
  std::string data_family = "bump_positive_g";
  double grid_dr = 0.0; // 0 = subcommand default
  double grid_dt = 0.0;
  double t_max = 0.0;
  double ladder_max = 0.0; // certificate-constant estimation horizon
  double ladder_dr = 0.0;
  std::string out;
  int workers = 1;
  std::uint64_t seed = 12345;
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

// FNV-1a over the canonical semantic config. Output paths and the worker
// count stay out: parallelism and file placement must not change results.
std::string config_hash(const RunConfig& rc) {
  std::ostringstream canon;
  canon << "cmd=" << rc.subcommand << ";p=" << fmt(rc.p) << ";k=" << fmt(rc.k)
        << ";eps=" << fmt(rc.eps) << ";eps_list=";
  for (double e : rc.eps_list)
    canon << fmt(e) << " ";
  canon << ";data=" << rc.data_family << ";grid_dr=" << fmt(rc.grid_dr)
        << ";grid_dt=" << fmt(rc.grid_dt) << ";t_max=" << fmt(rc.t_max)
        << ";ladder_max=" << fmt(rc.ladder_max)
        << ";ladder_dr=" << fmt(rc.ladder_dr) << ";seed=" << rc.seed;
  const std::string s = canon.str();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

int usage_error(const std::string& msg) {
  std::cerr << "usage error: " << msg << "\n";
  return kExitUsage;
}

std::optional<std::string> validate(const RunConfig& rc) {
  if (!(rc.p > 1.0 && rc.p < 2.0))
    return "p must lie in (1,2), got " + fmt(rc.p);
  if (!(rc.k >= 1.0))
    return "k must be at least 1 (data support radius), got " + fmt(rc.k);
  if (rc.eps < 0.0)
    return "eps must be nonnegative, got " + fmt(rc.eps);
  for (std::size_t i = 0; i < rc.eps_list.size(); ++i) {
    if (!(rc.eps_list[i] > 0.0))
      return "eps-list entries must be positive";
    if (i > 0 && !(rc.eps_list[i] < rc.eps_list[i - 1]))
      return "eps-list must be strictly decreasing";
  }
  if (rc.data_family != "bump_positive_g" &&
      rc.data_family != "bump_meanzero_g" && rc.data_family != "f_only")
    return "data must be one of bump_positive_g, bump_meanzero_g, f_only; "
           "got " +
           rc.data_family;
  if (rc.grid_dr < 0.0 || rc.grid_dt < 0.0)
    return "grid steps must be positive when given";
  if (rc.grid_dr > 0.0 && rc.grid_dt > 0.0 && rc.grid_dt / rc.grid_dr > 0.5)
    return "grid-dt must not exceed grid-dr / 2";
  if (rc.t_max < 0.0)
    return "t-max must be positive when given";
  if (rc.workers < 1)
    return "workers must be at least 1";
  return std::nullopt;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path);
  if (!os)
    throw std::runtime_error("cannot open output path: " + path);
  return os;
}

// ---------------------------------------------------------------- verify --

struct CheckLine {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  std::string criterion;
  double wall_ms = 0.0;
};

double now_ms() {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

// rho/(sqrt(rho^2-a^2) sqrt(b^2-rho^2)) integrates to pi/2 on every window
// 0 <= a < b; the inverse-sqrt edge factors are split off analytically.
CheckLine check_beta_identity(std::mt19937_64& rng) {
  CheckLine line{"beta window identity", false, 0.0, "max |I - pi/2| < 1e-8"};
  const double t0 = now_ms();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  wavelab::QuadratureOptions opt;
  opt.tol = 1e-10;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double a = 49.0 * u01(rng);
    const double b = a + std::max(1e-3, (50.0 - a) * u01(rng));
    wavelab::SingularIntegrand q;
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
    worst = std::max(worst,
                     std::abs(wavelab::integrate_singular(q, opt) - M_PI / 2));
  }
  line.measured = worst;
  line.pass = worst < 1e-8;
  line.wall_ms = now_ms() - t0;
  return line;
}

CheckLine check_plane_wave(std::mt19937_64& rng, double k) {
  CheckLine line{"circle average vs angular quadrature", false, 0.0,
                 "max abs diff < 1e-6"};
  const double t0 = now_ms();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const wavelab::RadialProfile profiles[] = {
      wavelab::bump_profile(k, 1.0), wavelab::meanzero_profile(k, 1.0),
      wavelab::bump_profile(0.6 * k, 0.8)};
  double worst = 0.0;
  for (const auto& profile : profiles) {
    for (int i = 0; i < 18; ++i) {
      const double r = 0.02 + 2.5 * k * u01(rng);
      const double rho = 0.02 + 2.5 * k * u01(rng);
      const double avg = wavelab::circle_average(profile, r, rho);
      const double direct = wavelab::integrate_smooth(
          [&](double th) {
            return profile(
                std::sqrt(r * r + rho * rho - 2.0 * r * rho * std::cos(th)));
          },
          0.0, 2.0 * M_PI);
      worst = std::max(worst, std::abs(avg - direct));
    }
  }
  line.measured = worst;
  line.pass = worst < 1e-6;
  line.wall_ms = now_ms() - t0;
  return line;
}

CheckLine check_duhamel_split(std::mt19937_64& rng, double k) {
  CheckLine line{"duhamel split vs direct quadrature", false, 0.0,
                 "max rel diff < 1e-4"};
  const double t0 = now_ms();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  wavelab::GridSpec grid;
  grid.dr = 0.05 * k;
  grid.dt = 0.05 * k;
  grid.t_max = 2.0 * k;
  const wavelab::RadialProfile bump = wavelab::bump_profile(k, 1.0);
  const auto fixed = wavelab::SpacetimeField::tabulate(
      grid, k, [&](double r, double t) { return bump(r) * std::exp(-0.3 * t); });
  const auto spreading = wavelab::SpacetimeField::tabulate(
      grid, k,
      [&](double r, double t) { return bump(r / (1.0 + t / (2.0 * k))); });
  double worst = 0.0;
  for (const auto* psi : {&fixed, &spreading}) {
    for (int i = 0; i < 3; ++i) {
      const double t = (0.5 + 1.3 * u01(rng)) * k;
      const double r = 0.05 * k + (0.75 * (t + k) - 0.05 * k) * u01(rng);
      const double split = wavelab::duhamel_cone_part(*psi, r, t) +
                           wavelab::duhamel_core_part(*psi, r, t);
      const double direct = wavelab::duhamel_direct(*psi, r, t);
      worst = std::max(worst,
                       std::abs(split - direct) / (1.0 + std::abs(direct)));
    }
  }
  line.measured = worst;
  line.pass = worst < 1e-4;
  line.wall_ms = now_ms() - t0;
  return line;
}

CheckLine check_comparison_grid(double k) {
  CheckLine line{"mixed growth comparison grid", false, 0.0,
                 "min margin > 0 over p x T grid"};
  const double t0 = now_ms();
  double min_margin = 1e300;
  bool all = true;
  for (int pi = 1; pi <= 19; ++pi) {
    const double p = 1.0 + 0.05 * pi;
    for (int e = 0; e <= 6; ++e) {
      const double T = k * std::pow(10.0, e);
      const auto rep = wavelab::check_comparison(T, k, p);
      all = all && rep.all_hold();
      min_margin = std::min(
          {min_margin, rep.mixed_one_margin(), rep.mixed_pm1_margin()});
    }
  }
  line.measured = min_margin;
  line.pass = all && min_margin > 0.0;
  line.wall_ms = now_ms() - t0;
  return line;
}

CheckLine check_ladders(double p, double k, int workers) {
  CheckLine line{"a priori estimate ladders", false, 0.0,
                 "max Q(2T)/Q(T) <= 1.2 at T = 32k"};
  const double t0 = now_ms();
  double worst = 0.0;
  auto run = [&](wavelab::AprioriKind kind, double nu) {
    wavelab::AprioriSpec spec;
    spec.kind = kind;
    spec.p = p;
    spec.k = k;
    spec.nu = nu;
    spec.horizons = {32.0 * k, 64.0 * k};
    spec.dr = 0.1 * k;
    spec.dt = 0.2 * k;
    spec.workers = workers;
    worst = std::max(worst, wavelab::verify_apriori(spec).max_ratio());
  };
  run(wavelab::AprioriKind::basic1, 0.0);
  run(wavelab::AprioriKind::basic2, 0.0);
  for (double nu : {0.0, p - 1.0, 1.0})
    run(wavelab::AprioriKind::basic3, nu);
  line.measured = worst;
  line.pass = worst <= 1.2;
  line.wall_ms = now_ms() - t0;
  return line;
}

int run_verify(const RunConfig& rc) {
  std::mt19937_64 rng(rc.seed);
  std::vector<CheckLine> lines;
  lines.push_back(check_beta_identity(rng));
  lines.push_back(check_plane_wave(rng, rc.k));
  lines.push_back(check_duhamel_split(rng, rc.k));
  lines.push_back(check_comparison_grid(rc.k));
  lines.push_back(check_ladders(rc.p, rc.k, rc.workers));

  bool all = true;
  for (const auto& line : lines) {
    all = all && line.pass;
    std::cout << (line.pass ? "[PASS] " : "[FAIL] ") << line.name
              << "  measured=" << std::setprecision(6) << line.measured
              << "  (" << line.criterion << ")  [" << std::fixed
              << std::setprecision(0) << line.wall_ms << " ms]\n";
    std::cout.unsetf(std::ios::fixed);
  }
  std::cout << (all ? "all checks passed" : "some checks FAILED") << "\n";

  if (!rc.out.empty()) {
    nlohmann::json doc;
    doc["config"] = config_hash(rc);
    doc["checks"] = nlohmann::json::array();
    for (const auto& line : lines)
      doc["checks"].push_back({{"name", line.name},
                               {"pass", line.pass},
                               {"measured", line.measured},
                               {"criterion", line.criterion}});
    doc["pass"] = all;
    open_output(rc.out) << doc.dump(2) << "\n";
  }
  return all ? kExitOk : kExitCheckFailure;
}

// --------------------------------------------------------------- certify --

wavelab::ConstantEstimationSpec estimation_from(const RunConfig& rc) {
  wavelab::ConstantEstimationSpec est;
  est.workers = rc.workers;
  if (rc.ladder_dr > 0.0)
    est.ladder_dr = rc.ladder_dr;
  if (rc.ladder_max > 0.0)
    est.ladder_horizons = {rc.ladder_max / 8.0, rc.ladder_max / 4.0,
                           rc.ladder_max / 2.0, rc.ladder_max};
  return est;
}

int run_certify(const RunConfig& rc) {
  const auto data = wavelab::make_data_family(rc.data_family, rc.k, 1.0);
  const auto constants =
      wavelab::estimate_constants(data, rc.p, estimation_from(rc));
  const auto bound = wavelab::certify_lifespan(data, constants, rc.p);

  nlohmann::json doc = nlohmann::json::parse(bound.to_json());
  doc["config"] = config_hash(rc);
  if (rc.eps > 0.0) {
    try {
      doc["t_lower_at_eps"] = bound.t_lower(rc.eps);
    } catch (const wavelab::CertificateRangeError&) {
      doc["t_lower_at_eps"] = nullptr;
      doc["note"] = "eps above the certified amplitude range eps0";
    }
    doc["eps"] = rc.eps;
  }

  const std::string text = doc.dump(2);
  if (!rc.out.empty())
    open_output(rc.out) << text << "\n";
  else
    std::cout << text << "\n";
  std::cout << "certified: case="
            << (bound.case_id == wavelab::LifespanCase::mean_zero
                    ? "mean_zero"
                    : "nonzero_mean")
            << " eps0=" << bound.eps0 << "\n";
  return kExitOk;
}

// -------------------------------------------------------------- simulate --

int run_simulate(const RunConfig& rc) {
  if (rc.out.empty())
    return usage_error("simulate requires --out for the field export");
  if (!(rc.eps > 0.0))
    return usage_error("simulate requires --eps > 0");
  const double horizon = rc.t_max > 0.0 ? rc.t_max : 8.0 * rc.k;
  wavelab::FdConfig cfg;
  cfg.dr = rc.grid_dr > 0.0 ? rc.grid_dr : 0.02 * rc.k;
  cfg.dt = rc.grid_dt > 0.0 ? rc.grid_dt : cfg.dr / 2.0;
  const auto data = wavelab::make_data_family(rc.data_family, rc.k, 1.0);
  const auto res = wavelab::fd_solve(data, rc.eps, rc.p, cfg, horizon);

  wavelab::CsvMeta meta;
  meta.eps = rc.eps;
  meta.family = rc.data_family;
  meta.config_hash = config_hash(rc);
  auto os = open_output(rc.out);
  res.field.write_csv(os, meta);

  if (res.blowup_time)
    std::cout << "blow-up threshold crossed at t = " << *res.blowup_time
              << (res.hit_nan ? " (non-finite overflow)" : "") << "\n";
  else
    std::cout << "no blow-up before t = " << horizon << "\n";
  std::cout << "field written to " << rc.out << " ("
            << res.field.nr() * res.field.nt() << " nodes)\n";
  return kExitOk;
}

// ----------------------------------------------------------------- sweep --

int run_sweep(const RunConfig& rc) {
  const auto data = wavelab::make_data_family(rc.data_family, rc.k, 1.0);
  const std::vector<double> ladder =
      rc.eps_list.empty() ? wavelab::default_eps_ladder() : rc.eps_list;

  wavelab::FdConfig cfg;
  cfg.dr = rc.grid_dr > 0.0 ? rc.grid_dr : 0.02 * rc.k;
  cfg.dt = rc.grid_dt > 0.0 ? rc.grid_dt : cfg.dr / 2.0;

  wavelab::SweepOptions opt;
  opt.workers = rc.workers;
  opt.estimation = estimation_from(rc);
  if (rc.t_max > 0.0)
    opt.cap_limit = rc.t_max;

  const auto records = wavelab::sweep(data, rc.p, ladder, cfg, opt);

  std::optional<wavelab::FitResult> fit;
  std::string fit_note;
  try {
    fit = wavelab::fit_scaling(records, records.front().case_id);
  } catch (const std::invalid_argument& err) {
    fit_note = err.what();
  }

  const std::string base = rc.out.empty() ? std::string("sweep") : rc.out;
  const std::string hash = config_hash(rc);
  {
    auto os = open_output(base + ".csv");
    wavelab::write_records_csv(os, records, "config=" + hash);
  }
  {
    nlohmann::json doc;
    if (fit)
      doc = nlohmann::json::parse(wavelab::summary_json(records, *fit));
    else {
      doc = nlohmann::json::parse(
          wavelab::summary_json(records, wavelab::FitResult{}));
      doc.erase("fit");
      doc["fit_note"] = fit_note;
    }
    doc["config"] = hash;
    open_output(base + ".json") << doc.dump(2) << "\n";
  }

  int violations = 0;
  for (const auto& rec : records) {
    std::cout << "eps=" << rec.eps << "  T_blowup=";
    if (rec.t_blowup)
      std::cout << *rec.t_blowup;
    else
      std::cout << "-";
    std::cout << "  T_certified=";
    if (rec.t_certified)
      std::cout << *rec.t_certified;
    else
      std::cout << "-";
    if (rec.inconsistent) {
      std::cout << "  INCONSISTENT";
      ++violations;
    }
    if (!rec.note.empty())
      std::cout << "  (" << rec.note << ")";
    std::cout << "\n";
  }
  if (fit)
    std::cout << "fit: slope=" << fit->slope
              << " theory=" << fit->theory_slope << " r2=" << fit->r_squared
              << " n=" << fit->n_points << "\n";
  else
    std::cout << "fit skipped: " << fit_note << "\n";
  std::cout << "wrote " << base << ".csv and " << base << ".json\n";

  if (violations > 0) {
    std::cout << violations
              << " record(s) violate certified <= measured blow-up\n";
    return kExitCheckFailure;
  }
  return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
  RunConfig rc;
  CLI::App app{"numerical laboratory for lifespan bounds of 2D semilinear "
               "waves u_tt - Lap u = |u|^p"};
  app.set_config("--config", "", "key=value file; command-line flags win");
  app.add_option("--p", rc.p, "nonlinearity exponent, 1 < p < 2");
  app.add_option("--k", rc.k, "data support radius, k >= 1");
  app.add_option("--eps", rc.eps, "data amplitude");
  app.add_option("--eps-list", rc.eps_list,
                 "strictly decreasing amplitudes for sweeps")
      ->delimiter(',');
  app.add_option("--data", rc.data_family,
                 "bump_positive_g | bump_meanzero_g | f_only");
  app.add_option("--grid-dr", rc.grid_dr, "radial step");
  app.add_option("--grid-dt", rc.grid_dt, "time step");
  app.add_option("--t-max", rc.t_max, "horizon (simulate) or cap (sweep)");
  app.add_option("--ladder-max", rc.ladder_max,
                 "largest horizon for certificate-constant estimation");
  app.add_option("--ladder-dr", rc.ladder_dr,
                 "mesh for certificate-constant estimation");
  app.add_option("--out", rc.out, "output path (or prefix for sweep)");
  app.add_option("--workers", rc.workers, "parallelism budget");
  app.add_option("--seed", rc.seed, "seed for randomized checks");

  auto* verify =
      app.add_subcommand("verify", "run the identity/estimate check suite");
  auto* certify =
      app.add_subcommand("certify", "estimate constants, emit lifespan bound");
  auto* simulate =
      app.add_subcommand("simulate", "integrate the equation, export field");
  auto* sweepcmd =
      app.add_subcommand("sweep", "amplitude sweep with scaling fit");
  for (auto* sc : {verify, certify, simulate, sweepcmd})
    sc->fallthrough();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (verify->parsed())
    rc.subcommand = "verify";
  else if (certify->parsed())
    rc.subcommand = "certify";
  else if (simulate->parsed())
    rc.subcommand = "simulate";
  else
    rc.subcommand = "sweep";

  if (const auto problem = validate(rc))
    return usage_error(*problem);

  try {
    if (rc.subcommand == "verify")
      return run_verify(rc);
    if (rc.subcommand == "certify")
      return run_certify(rc);
    if (rc.subcommand == "simulate")
      return run_simulate(rc);
    return run_sweep(rc);
  } catch (const std::invalid_argument& e) {
    return usage_error(e.what());
  } catch (const std::exception& e) {
    nlohmann::json err;
    err["error"] = e.what();
    err["exit"] = kExitNumerical;
    std::cout << err.dump() << "\n";
    return kExitNumerical;
  }
}
