#pragma once

#include "wavelab/radial_data.hpp"
#include "wavelab/spacetime_field.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavelab {

// Mesh and run controls for the reference finite-difference solver.
// The explicit leapfrog scheme needs the stability margin dt/dr <= 1/2,
// enforced on construction and again on use.
struct FdConfig {
  FdConfig() = default;
  FdConfig(double dr_, double dt_, double r_max_ = -1.0,
           double blowup_threshold_ = 1e6, int refinement_levels_ = 2);

  double dr = 0.02;
  double dt = 0.01;
  double r_max = -1.0; // < 0: sized from the run horizon as t_max + 2k
  double blowup_threshold = 1e6;
  int refinement_levels = 2;
  bool nonlinear = true;    // false: drop |u|^p for linear reference runs
  double snapshot_dt = 0.0; // <= 0: stores about 256 rows

  double cfl() const { return dt / dr; }
};

struct FdResult {
  SpacetimeField field; // snapshot rows up to the last completed stride
  std::optional<double> blowup_time; // first sup-norm threshold crossing
  bool hit_nan = false; // the run died on a non-finite value
};

// Leapfrog integration of u_tt = u_rr + u_r/r + |u|^p from (eps f, eps g),
// with the origin handled by the symmetric limit (the radial Laplacian
// counts u_rr twice at r = 0) and the first step by a Taylor expansion.
// Stops early at the first sup-norm crossing of blowup_threshold.
FdResult fd_solve(const DataPair& data, double eps, double p,
                  const FdConfig& cfg, double t_max);

class UnreliableMeasurementError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct BlowupProbe {
  std::optional<double> time; // extrapolated crossing time
  std::vector<double> level_times;
  double spread = 0.0;
  double eps = 0.0;
  bool hit_nan = false;

  std::string to_json() const;
};

// Threshold-crossing time across refinement_levels meshes (dr and dt halved
// per level), Richardson-extrapolated in dt from the two finest levels.
// No crossing at the finest level means no measurement (time empty); level
// crossings spread over 25 percent raise UnreliableMeasurementError.
BlowupProbe detect_blowup(const DataPair& data, double eps, double p,
                          const FdConfig& cfg, double t_cap);

} // namespace wavelab
