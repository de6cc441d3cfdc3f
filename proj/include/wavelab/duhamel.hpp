#pragma once

#include "wavelab/spacetime_field.hpp"

namespace wavelab {

// Inner radial factor of the Duhamel decomposition: the rho-integral of the
// triangle kernel h against the backward-cone weight, clipped at radius m,
//   int_{|lambda-r|}^{min(lambda+r, m)} rho h(lambda,rho,r) / sqrt(m^2-rho^2) drho.
// Evaluates in closed form as a complete elliptic integral; diverges
// logarithmically as m -> lambda+r, returns 0 for an empty window.
double cone_slice_integral(double lambda, double r, double m);

// The two pieces of the radial Duhamel decomposition. The "cone" part
// collects sources whose backward cone rim is truncated by the integration
// disc; the "core" part collects sources seen in full.
double duhamel_cone_part(const SpacetimeField& psi, double r, double t,
                         double tol = 1e-6);
double duhamel_core_part(const SpacetimeField& psi, double r, double t,
                         double tol = 1e-6);

// cone + core for r > 0; polar shortcut at r = 0.
double duhamel_radial(const SpacetimeField& psi, double r, double t,
                      double tol = 1e-6);

// Reference evaluation straight from the definition (iterated polar
// quadrature over the unit disc). Slow; used to cross-check the
// decomposition only.
double duhamel_direct(const SpacetimeField& psi, double r, double t,
                      double tol = 1e-6);

// Explicit upper bounds for the two pieces (applied to |psi|):
//   cone: (1/sqrt(2r)) int_0^t dtau int lambda|psi| / sqrt(tau+lambda-t+r)
//   core: int_0^{(t-r)+} dtau int lambda|psi| / sqrt((t-r+lambda-tau)(t-r-tau-lambda))
double cone_part_bound(const SpacetimeField& psi, double r, double t,
                       double tol = 1e-6);
double core_part_bound(const SpacetimeField& psi, double r, double t,
                       double tol = 1e-6);

// Tabulates the operator on the forcing's own grid. The per-node quadrature
// tolerance is tol_scale * sup|psi| * max(t^2/2, 1/10), so the bilinear
// interpolation error of the field, not the quadrature, limits accuracy.
SpacetimeField apply_duhamel(const SpacetimeField& psi, int workers = 1,
                             double tol_scale = 1e-6);

} // namespace wavelab
