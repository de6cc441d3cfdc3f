#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace wavelab {

// Uniform radial-temporal mesh r_i = i*dr, t_j = j*dt. r_max < 0 means
// "cover the influence cone": r_max = t_max + k.
struct GridSpec {
  double dr = 0.02;
  double dt = 0.04;
  double t_max = 1.0;
  double r_max = -1.0;
};

struct CsvMeta {
  double eps = 0.0;
  std::string family;
  std::string config_hash;
};

// Tabulated field on the mesh with bilinear interpolation in between.
// cone_supported fields vanish for r > t + k and let the integral operators
// clip their integration ranges to the support.
class SpacetimeField {
public:
  SpacetimeField(const GridSpec& grid, double k, bool cone_supported = true);

  static SpacetimeField
  tabulate(const GridSpec& grid, double k,
           const std::function<double(double, double)>& fn,
           bool cone_supported = true, int workers = 1);

  double operator()(double r, double t) const;

  std::size_t nr() const { return nr_; }
  std::size_t nt() const { return nt_; }
  double r_at(std::size_t i) const { return i * grid_.dr; }
  double t_at(std::size_t j) const { return j * grid_.dt; }
  double at(std::size_t i, std::size_t j) const { return v_[j * nr_ + i]; }
  void set(std::size_t i, std::size_t j, double x);

  double k() const { return k_; }
  double t_max() const { return (nt_ - 1) * grid_.dt; }
  double r_max() const { return (nr_ - 1) * grid_.dr; }
  const GridSpec& grid() const { return grid_; }
  bool cone_supported() const { return cone_supported_; }

  // largest radius at which the field can be nonzero at time tau
  double support_radius(double tau) const;

  double max_abs() const;
  bool inside_cone(std::size_t i, std::size_t j) const;

  SpacetimeField scaled(double factor) const;

  // rows "r,t,value" preceded by a provenance header
  void write_csv(std::ostream& os, const CsvMeta& meta) const;

private:
  GridSpec grid_;
  double k_;
  bool cone_supported_;
  std::size_t nr_, nt_;
  std::vector<double> v_;
};

} // namespace wavelab
