#pragma once

#include <string>
#include <vector>

#include "vertmart/geometry.hpp"

namespace vertmart {

// Named single-chart manifolds used across tests and experiments.
// All carry closed-form Christoffel symbols where available.

/// Flat R^2.
ChartedManifold euclidean_plane();

/// Flat 2-torus: Euclidean metric, both coordinates periodic with period 2*pi.
ChartedManifold flat_torus();

/// Unit sphere in polar chart (theta, phi): g = diag(1, sin^2(theta)).
/// Guard keeps theta away from the poles; phi is 2*pi-periodic.
ChartedManifold sphere_chart(double pole_margin = 0.05);

/// Hyperbolic upper half-plane, g = y^{-2} I, guarded to y > floor.
ChartedManifold half_plane(double y_floor = 0.05);

/// Flat circle (the compact abelian group used by the product bundle).
ChartedManifold circle();

/// Closed-form curvature of the sphere chart (the only corpus base with
/// nonvanishing curvature).
CurvatureField sphere_curvature();

ChartedManifold manifold_by_name(const std::string& name);
std::vector<std::string> manifold_names();

} // namespace vertmart
