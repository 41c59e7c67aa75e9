#pragma once

#include <functional>
#include <optional>

#include "vertmart/geometry.hpp"

namespace vertmart {

/// Submersion pi: E -> M presented in an adapted chart (x^1..x^m, v^1..v^k)
/// with pi(x, v) = x. Indices 0..m-1 are base, m..m+k-1 are fiber. The
/// vertical projector P_v (range = fiber coordinate directions, kernel = the
/// chosen horizontal complement) is part of the datum; constructors supply the
/// metric-orthogonal or connection-horizontal complement as appropriate.
struct AdaptedSubmersion {
    ChartedManifold base;   // dim m
    int fiber_dim = 0;      // k
    ChristoffelField ambient;  // symmetric connection on the (m+k)-dim chart
    std::function<Mat(const Point&)> vertical_projector;  // (m+k) x (m+k)

    std::vector<std::optional<double>> total_periodic;
    std::function<bool(const Point&)> total_guard;
    std::optional<MetricField> total_metric;  // present for Riemannian total spaces

    int base_dim() const { return base.dim; }
    int total_dim() const { return base.dim + fiber_dim; }
    bool in_domain(const Point& p) const { return !total_guard || total_guard(p); }

    /// View the total space as a charted manifold (requires total_metric).
    ChartedManifold total_manifold() const;

    /// Base-point coordinates of p (the chart form of pi).
    Point project_to_base(const Point& p) const { return p.head(base.dim); }
};

/// Fiber components of the vertically projected ambient connection,
/// Gv^a_{bc} = [P_v Gamma^E(D_bc)]^a. `fiber_fiber` is (k,k,k) and symmetric
/// in its lower pair; `fiber_base` is (k,k,m), stored unsymmetrized since the
/// lower index types differ. Contractions against symmetric increment
/// products count the mixed pair in both orders.
struct VerticalChristoffels {
    Tensor3 fiber_fiber;  // (k, k, k)
    Tensor3 fiber_base;   // (k, k, m)
};

/// Coefficients theta_a(x, v) of a vertical 1-form against dv^a in the
/// adapted chart. Canonical constructors produce chart coefficients of
/// intrinsically vertical covectors; free-form input is taken as-is and is
/// chart-relative.
struct VerticalForm {
    int fiber_dim = 0;
    std::function<Vec(const Point&)> eval;  // length k

    /// dv^a with constant coefficient 1 on one fiber index.
    static VerticalForm coordinate(int fiber_dim, int alpha);
};

VerticalChristoffels vertical_christoffels(const AdaptedSubmersion& sub, const Point& p);

/// Vertical projection of a second-order vector in the adapted chart: zero the
/// pure-base quadratic block and the base first-order block, keep the
/// fiber-fiber and mixed quadratic blocks, and pass the remaining first-order
/// part through P_v (which fixes fiber directions).
SecondOrderVector project_second_order(const AdaptedSubmersion& sub, const SecondOrderVector& L,
                                       const Point& p);

/// Vertical Meyer map on the projected second-order subspace: fiber components
/// of P_v Gamma^E applied to a projected L (full symmetric contraction over
/// the quadratic block).
Vec apply_vertical_connection(const AdaptedSubmersion& sub, const SecondOrderVector& projected,
                              const Point& p);
Vec apply_vertical_connection(const VerticalChristoffels& gv, int base_dim,
                              const SecondOrderVector& projected);

/// Horizontal lift of a base tangent vector through the complement datum:
/// H_p(u) = (I - P_v)(u, 0).
Vec horizontal_lift(const AdaptedSubmersion& sub, const Point& p, const Vec& base_vector);

struct AffineSubmersionReport {
    bool holds = false;
    double max_defect = 0.0;
};

/// Check h nabla^E_{H(X)} H(Y) = H(nabla^M_X Y) for constant-coefficient base
/// fields at random chart points. A failed identity reports false, not an
/// error.
AffineSubmersionReport validate_affine_submersion(const AdaptedSubmersion& sub, int samples,
                                                  const std::function<Point(int)>& sample_point,
                                                  double tol = 1e-5, uint64_t seed = 0);

} // namespace vertmart
