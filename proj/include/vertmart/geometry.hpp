#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vertmart/tensor.hpp"

namespace vertmart {

/// Chart coordinates of a point. Length equals the manifold dimension; for
/// periodic coordinates the stored representative lies in [0, period).
using Point = Vec;

/// Riemannian metric in a chart: g(x) and its inverse.
struct MetricField {
    int dim = 0;
    std::function<Mat(const Point&)> eval;      // symmetric positive definite
    std::function<Mat(const Point&)> inv_eval;  // g^{-1}(x)

    static MetricField euclidean(int dim);
    /// Wrap a closed-form metric; the inverse is computed by dense solve.
    static MetricField from_eval(int dim, std::function<Mat(const Point&)> g);
};

/// Christoffel symbols of a symmetric connection, stored dense as (k, i, j).
struct ChristoffelField {
    int dim = 0;
    std::function<Tensor3(const Point&)> eval;

    static ChristoffelField flat(int dim);
};

/// Single-chart manifold: metric, connection, optional periodic wrapping and
/// a chart-validity predicate. Coordinates with a period are reduced to the
/// fundamental domain; the guard marks where the chart (and metric) are sound.
struct ChartedManifold {
    int dim = 0;
    MetricField metric;
    ChristoffelField christoffels;
    std::vector<std::optional<double>> periodic;  // per-coordinate period
    std::function<bool(const Point&)> guard;       // default: everywhere valid

    bool in_domain(const Point& x) const { return !guard || guard(x); }
    Point wrap(Point x) const;
};

/// Differential operator of order <= 2 without constant term,
/// L = second_{AB} D_AB + first_A D_A, with a symmetric quadratic block.
struct SecondOrderVector {
    Vec first;   // length dim
    Mat second;  // dim x dim, symmetric

    static SecondOrderVector zero(int dim) {
        return {Vec::Zero(dim), Mat::Zero(dim, dim)};
    }
};

/// Two-jet of a smooth map at a point: value, Jacobian J^A_i and Hessian
/// H^A_{ij} (symmetric in the lower pair).
struct MapJet {
    Vec value;
    Mat jacobian;     // target_dim x domain_dim
    Tensor3 hessian;  // (target_dim, domain_dim, domain_dim)
};

/// Levi-Civita symbols at x from central differences of the metric:
/// G^k_{ij} = 1/2 g^{kl} (d_i g_{jl} + d_j g_{il} - d_l g_{ij}).
/// Throws DegenerateMetricError if g is not SPD on the stencil and
/// ChartBoundaryError if the stencil leaves the chart domain.
Tensor3 levi_civita(const MetricField& metric, const Point& x, double h = 1e-5,
                    const std::function<bool(const Point&)>& guard = nullptr);

/// Connection derived from a metric by finite differences (used when no
/// closed-form symbols are supplied).
ChristoffelField christoffels_from_metric(const MetricField& metric, double h = 1e-5,
                                          std::function<bool(const Point&)> guard = nullptr);

/// Quadratic (purely second-order) block of L. First-order part is discarded.
Mat square_operator(const SecondOrderVector& L);

/// Push-forward of a second-order vector through a two-jet:
/// second -> J a J^T, first_A -> J_{Ai} a_i + H_{Aij} a_ij.
SecondOrderVector pushforward_second_order(const MapJet& jet, const SecondOrderVector& L);

/// Meyer's linear map associated with a symmetric connection:
/// L = a_AB D_AB + a_A D_A  |->  (a_C + Gamma^C_{AB} a_AB) D_C.
Vec apply_connection(const Tensor3& christoffels, const SecondOrderVector& L);

/// Riemann tensor R^l_{ijk} with the convention
/// R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_{[X,Y]} Z, i.e.
/// R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{ir} G^r_{jk} - G^l_{jr} G^r_{ik}.
/// Result indexed as curvature(l, i, j*dim + k) is awkward; we return a rank-4
/// accessor instead.
struct CurvatureField {
    int dim = 0;
    // R(l, i, j, k) contracted storage: tensor(l, i, j*dim + k)
    std::function<Tensor3(const Point&)> eval;
    double entry(const Tensor3& t, int l, int i, int j, int k) const {
        return t(l, i, j * dim + k);
    }
};

CurvatureField curvature_from_christoffels(const ChristoffelField& gamma, double h = 1e-5);

/// Max defect of d_k g_ij - G^l_{ki} g_lj - G^l_{kj} g_il at x (metric
/// compatibility of the connection, via central differences).
double metric_compatibility_defect(const MetricField& metric, const ChristoffelField& gamma,
                                   const Point& x, double h = 1e-5);

} // namespace vertmart
