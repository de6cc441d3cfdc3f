#include "wavelab/experiments.hpp"

#include "wavelab/kernels.hpp"
#include "wavelab/parallel.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wavelab {

namespace {

const char* case_name(LifespanCase c) {
  return c == LifespanCase::mean_zero ? "mean_zero" : "nonzero_mean";
}

double theory_slope_for(LifespanCase c, double p) {
  if (c == LifespanCase::mean_zero)
    return -2.0 * p * (p - 1.0) / gamma_exponent(p, 2);
  return -(p - 1.0) / (3.0 - p);
}

SweepRecord run_entry(const DataPair& data, double p, double eps,
                      const FdConfig& cfg, const CertifiedBound& bound,
                      const SweepOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  SweepRecord rec;
  rec.eps = eps;
  rec.p = p;
  rec.k = data.k;
  rec.case_id = bound.case_id;
  rec.levels = cfg.refinement_levels;
  const double shrink = std::pow(0.5, cfg.refinement_levels - 1);
  rec.dr = cfg.dr * shrink;
  rec.dt = cfg.dt * shrink;

  try {
    rec.t_certified = bound.t_lower(eps);
  } catch (const CertificateRangeError&) {
    // amplitude above the certificate domain; measurement still proceeds
  }

  const double start_cap = opt.t_cap > 0.0 ? opt.t_cap : 8.0 * data.k;
  const double limit =
      opt.cap_limit > 0.0 ? opt.cap_limit : std::max(start_cap, 512.0 * data.k);
  double cap = std::min(start_cap, limit);
  for (;;) {
    bool exhausted = cap >= limit - 1e-12;
    try {
      const BlowupProbe probe = detect_blowup(data, eps, p, cfg, cap);
      if (probe.time) {
        rec.t_blowup = *probe.time;
        if (probe.hit_nan)
          rec.note = "crossing reached through a non-finite overflow";
        break;
      }
      if (exhausted) {
        std::ostringstream msg;
        msg << "no blow-up before t = " << cap;
        rec.note = msg.str();
        break;
      }
    } catch (const UnreliableMeasurementError& err) {
      if (exhausted) {
        rec.note = err.what();
        break;
      }
      // crossings disagreed near the cap; retry with more room
    }
    cap = std::min(2.0 * cap, limit);
  }

  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - started)
                    .count();
  return rec;
}

} // namespace

std::vector<double> default_eps_ladder() {
  return {0.8, 0.63, 0.5, 0.4, 0.32, 0.25, 0.2, 0.16};
}

std::vector<SweepRecord> sweep(const DataPair& data, double p,
                               const std::vector<double>& eps_list,
                               const FdConfig& cfg, const SweepOptions& opt) {
  if (eps_list.empty())
    throw std::invalid_argument("sweep: amplitude list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    if (!(eps_list[i] > 0.0))
      throw std::invalid_argument("sweep: amplitudes must be positive");
    if (i > 0 && !(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument(
          "sweep: amplitudes must be strictly decreasing");
  }

  std::optional<CertifiedBound> local;
  const CertifiedBound* bound = opt.bound;
  if (!bound) {
    local = certify_lifespan(data, estimate_constants(data, p, opt.estimation),
                             p);
    bound = &*local;
  }

  std::vector<SweepRecord> records(eps_list.size());
  parallel_for(eps_list.size(), opt.workers, [&](std::size_t i) {
    records[i] = run_entry(data, p, eps_list[i], cfg, *bound, opt);
  });
  annotate_consistency(records);
  return records;
}

void annotate_consistency(std::vector<SweepRecord>& records) {
  for (auto& rec : records) {
    if (rec.t_blowup && rec.t_certified && *rec.t_certified > *rec.t_blowup) {
      rec.inconsistent = true;
      if (!rec.note.empty())
        rec.note += "; ";
      rec.note += "certified lower bound exceeds the measured blow-up time";
    }
  }
}

FitResult fit_scaling(const std::vector<SweepRecord>& records,
                      LifespanCase case_id) {
  std::vector<double> xs, ys;
  double p_common = 0.0;
  for (const auto& rec : records) {
    if (!rec.t_blowup)
      continue;
    if (!(rec.eps > 0.0) || !(*rec.t_blowup > 0.0))
      throw std::invalid_argument(
          "fit_scaling: measured records must be positive");
    if (xs.empty())
      p_common = rec.p;
    else if (rec.p != p_common)
      throw std::invalid_argument("fit_scaling: records mix exponents");
    xs.push_back(std::log(rec.eps));
    ys.push_back(std::log(*rec.t_blowup));
  }
  if (xs.size() < 4)
    throw std::invalid_argument(
        "fit_scaling: need at least four measured records");

  const std::size_t n = xs.size();
  double xbar = 0.0, ybar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    xbar += xs[i];
    ybar += ys[i];
  }
  xbar /= n;
  ybar /= n;
  double sxx = 0.0, sxy = 0.0, sstot = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - xbar) * (xs[i] - xbar);
    sxy += (xs[i] - xbar) * (ys[i] - ybar);
    sstot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  if (!(sxx > 0.0))
    throw std::invalid_argument("fit_scaling: amplitudes are degenerate");

  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ssres = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ys[i] - (fit.intercept + fit.slope * xs[i]);
    ssres += d * d;
  }
  fit.r_squared = sstot > 0.0 ? 1.0 - ssres / sstot : 1.0;
  fit.r_squared = std::min(1.0, std::max(0.0, fit.r_squared));
  fit.theory_slope = theory_slope_for(case_id, p_common);
  fit.n_points = static_cast<int>(n);
  return fit;
}

std::string FitResult::to_json() const {
  nlohmann::json j;
  j["slope"] = slope;
  j["intercept"] = intercept;
  j["r_squared"] = r_squared;
  j["theory_slope"] = theory_slope;
  j["n_points"] = n_points;
  return j.dump();
}

void write_records_csv(std::ostream& os,
                       const std::vector<SweepRecord>& records,
                       const std::string& header_comment) {
  if (!header_comment.empty())
    os << "# " << header_comment << "\n";
  os << "eps,T_blowup,T_certified,case,p,k\n";
  os << std::setprecision(17);
  for (const auto& rec : records) {
    os << rec.eps << ",";
    if (rec.t_blowup)
      os << *rec.t_blowup;
    os << ",";
    if (rec.t_certified)
      os << *rec.t_certified;
    os << "," << case_name(rec.case_id) << "," << rec.p << "," << rec.k
       << "\n";
  }
}

std::vector<SweepRecord> read_records_csv(std::istream& is) {
  std::vector<SweepRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("eps,", 0) == 0)
      continue;
    std::vector<std::string> fields;
    std::istringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ','))
      fields.push_back(cell);
    if (fields.size() < 6)
      throw std::invalid_argument("read_records_csv: malformed row: " + line);
    SweepRecord rec;
    rec.eps = std::stod(fields[0]);
    if (!fields[1].empty())
      rec.t_blowup = std::stod(fields[1]);
    if (!fields[2].empty())
      rec.t_certified = std::stod(fields[2]);
    rec.case_id = fields[3] == "mean_zero" ? LifespanCase::mean_zero
                                           : LifespanCase::nonzero_mean;
    rec.p = std::stod(fields[4]);
    rec.k = std::stod(fields[5]);
    out.push_back(rec);
  }
  return out;
}

std::string summary_json(const std::vector<SweepRecord>& records,
                         const FitResult& fit) {
  nlohmann::json doc;
  doc["records"] = nlohmann::json::array();
  for (const auto& rec : records) {
    nlohmann::json j;
    j["eps"] = rec.eps;
    j["T_blowup"] =
        rec.t_blowup ? nlohmann::json(*rec.t_blowup) : nlohmann::json(nullptr);
    j["T_certified"] = rec.t_certified ? nlohmann::json(*rec.t_certified)
                                       : nlohmann::json(nullptr);
    j["case"] = case_name(rec.case_id);
    j["p"] = rec.p;
    j["k"] = rec.k;
    j["inconsistent"] = rec.inconsistent;
    if (!rec.note.empty())
      j["note"] = rec.note;
    j["mesh"] = {{"dr", rec.dr}, {"dt", rec.dt}, {"levels", rec.levels}};
    doc["records"].push_back(j);
  }
  doc["fit"] = nlohmann::json::parse(fit.to_json());
  return doc.dump(2);
}

} // namespace wavelab
