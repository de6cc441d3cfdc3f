#include "wavelab/spacetime_field.hpp"

#include "wavelab/parallel.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace wavelab {

namespace {

std::size_t count_nodes(double extent, double step) {
  if (step <= 0.0 || extent < 0.0)
    throw std::invalid_argument("GridSpec: steps must be positive");
  return static_cast<std::size_t>(std::ceil(extent / step - 1e-9)) + 1;
}

} // namespace

SpacetimeField::SpacetimeField(const GridSpec& grid, double k, bool cone_supported)
    : grid_(grid), k_(k), cone_supported_(cone_supported) {
  if (k <= 0.0)
    throw std::invalid_argument("SpacetimeField: k must be positive");
  const double rmax = grid.r_max < 0.0 ? grid.t_max + k : grid.r_max;
  nr_ = count_nodes(rmax, grid.dr);
  nt_ = count_nodes(grid.t_max, grid.dt);
  v_.assign(nr_ * nt_, 0.0);
}

SpacetimeField SpacetimeField::tabulate(
    const GridSpec& grid, double k,
    const std::function<double(double, double)>& fn, bool cone_supported,
    int workers) {
  SpacetimeField f(grid, k, cone_supported);
  parallel_for(f.nt_, workers, [&](std::size_t j) {
    const double t = f.t_at(j);
    for (std::size_t i = 0; i < f.nr_; ++i) {
      const double r = f.r_at(i);
      if (cone_supported && r > t + k)
        continue;
      f.v_[j * f.nr_ + i] = fn(r, t);
    }
  });
  return f;
}

void SpacetimeField::set(std::size_t i, std::size_t j, double x) {
  if (cone_supported_ && r_at(i) > t_at(j) + k_ && x != 0.0)
    throw std::invalid_argument("SpacetimeField: nonzero value outside cone");
  v_[j * nr_ + i] = x;
}

bool SpacetimeField::inside_cone(std::size_t i, std::size_t j) const {
  return !cone_supported_ || r_at(i) <= t_at(j) + k_;
}

double SpacetimeField::support_radius(double tau) const {
  return cone_supported_ ? tau + k_ : r_max();
}

double SpacetimeField::operator()(double r, double t) const {
  const double slack = 1e-9 * std::max(1.0, t_max());
  if (t < -slack || t > t_max() + slack)
    throw std::out_of_range("SpacetimeField: t outside tabulated horizon");
  if (r < -1e-12)
    throw std::out_of_range("SpacetimeField: negative radius");
  if (r >= r_max())
    return 0.0;
  const double tc = std::min(std::max(t, 0.0), t_max());
  const double rc = std::max(r, 0.0);

  const double fi = rc / grid_.dr, fj = tc / grid_.dt;
  std::size_t i = std::min(static_cast<std::size_t>(fi), nr_ - 2);
  std::size_t j = std::min(static_cast<std::size_t>(fj), nt_ - 2);
  const double a = fi - i, b = fj - j;
  const double* row0 = &v_[j * nr_ + i];
  const double* row1 = row0 + nr_;
  return (1 - a) * (1 - b) * row0[0] + a * (1 - b) * row0[1] +
         (1 - a) * b * row1[0] + a * b * row1[1];
}

double SpacetimeField::max_abs() const {
  double m = 0.0;
  for (double x : v_)
    m = std::max(m, std::abs(x));
  return m;
}

SpacetimeField SpacetimeField::scaled(double factor) const {
  SpacetimeField out = *this;
  for (double& x : out.v_)
    x *= factor;
  return out;
}

void SpacetimeField::write_csv(std::ostream& os, const CsvMeta& meta) const {
  os << "# k=" << k_ << " eps=" << meta.eps << " data=" << meta.family
     << " config=" << meta.config_hash << "\n";
  os << "r,t,value\n";
  os.precision(17);
  for (std::size_t j = 0; j < nt_; ++j)
    for (std::size_t i = 0; i < nr_; ++i)
      os << r_at(i) << "," << t_at(j) << "," << at(i, j) << "\n";
}

} // namespace wavelab
