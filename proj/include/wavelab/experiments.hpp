#pragma once

#include "wavelab/fd_solver.hpp"
#include "wavelab/picard.hpp"
#include "wavelab/radial_data.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace wavelab {

// One amplitude in an eps-sweep: the measured blow-up time (if reachable),
// the certified lifespan lower bound (if eps is inside the certificate
// domain), and the mesh it was measured on. wall_ms is informational and
// deliberately kept out of every serialized form so outputs stay
// reproducible.
struct SweepRecord {
  double eps = 0.0;
  std::optional<double> t_blowup;
  std::optional<double> t_certified;
  LifespanCase case_id = LifespanCase::nonzero_mean;
  double p = 0.0;
  double k = 1.0;
  bool inconsistent = false; // certified bound exceeded the measurement
  std::string note;          // diagnostics for absent measurements
  double dr = 0.0, dt = 0.0; // finest mesh used
  int levels = 0;
  double wall_ms = 0.0;
};

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theory_slope = 0.0;
  int n_points = 0;

  std::string to_json() const;
};

// The documented sweep convention: quarter-decade spacing, large enough to
// blow up at desk-scale horizons, small enough that the power law shows.
std::vector<double> default_eps_ladder();

struct SweepOptions {
  double t_cap = 0.0;     // <= 0: adaptive, starts at 8k and doubles
  double cap_limit = 0.0; // <= 0: 512k; measurement reported absent beyond
  int workers = 1;
  const CertifiedBound* bound = nullptr; // reuse a precomputed certificate
  ConstantEstimationSpec estimation{};   // used when bound is absent
};

// Runs detect_blowup and the lifespan certificate for each amplitude.
// eps_list must be strictly decreasing and positive; per-entry failures are
// recorded in the entry, never fatal. Output order follows eps_list.
std::vector<SweepRecord> sweep(const DataPair& data, double p,
                               const std::vector<double>& eps_list,
                               const FdConfig& cfg,
                               const SweepOptions& opt = {});

// Marks records whose certified lower bound exceeds the measured blow-up
// time. Any such record would falsify the bound, so it is flagged rather
// than silently averaged away.
void annotate_consistency(std::vector<SweepRecord>& records);

// Least-squares fit of log T_blowup against log eps over records that carry
// a measurement. Needs at least four usable points of a single exponent.
FitResult fit_scaling(const std::vector<SweepRecord>& records,
                      LifespanCase case_id);

// "eps,T_blowup,T_certified,case,p,k" rows; absent values serialize as
// empty fields, doubles round-trip exactly. header_comment, when nonempty,
// is written first as "# <comment>".
void write_records_csv(std::ostream& os,
                       const std::vector<SweepRecord>& records,
                       const std::string& header_comment = "");
std::vector<SweepRecord> read_records_csv(std::istream& is);

// Deterministic aggregate: the records plus the fit, no timing data.
std::string summary_json(const std::vector<SweepRecord>& records,
                         const FitResult& fit);

} // namespace wavelab
