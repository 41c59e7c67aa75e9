#include "vertmart/corpus.hpp"

#include <cmath>

#include "vertmart/errors.hpp"

namespace vertmart {

namespace {
constexpr double kTwoPi = 2.0 * M_PI;
}

ChartedManifold euclidean_plane() {
    ChartedManifold m;
    m.dim = 2;
    m.metric = MetricField::euclidean(2);
    m.christoffels = ChristoffelField::flat(2);
    m.periodic = {std::nullopt, std::nullopt};
    return m;
}

ChartedManifold flat_torus() {
    ChartedManifold m;
    m.dim = 2;
    m.metric = MetricField::euclidean(2);
    m.christoffels = ChristoffelField::flat(2);
    m.periodic = {kTwoPi, kTwoPi};
    return m;
}

ChartedManifold sphere_chart(double pole_margin) {
    ChartedManifold m;
    m.dim = 2;
    m.metric.dim = 2;
    m.metric.eval = [](const Point& x) {
        Mat g = Mat::Zero(2, 2);
        const double s = std::sin(x[0]);
        g(0, 0) = 1.0;
        g(1, 1) = s * s;
        return g;
    };
    m.metric.inv_eval = [](const Point& x) {
        Mat g = Mat::Zero(2, 2);
        const double s = std::sin(x[0]);
        if (std::abs(s) < 1e-14) throw DegenerateMetricError("sphere chart metric degenerate at pole");
        g(0, 0) = 1.0;
        g(1, 1) = 1.0 / (s * s);
        return g;
    };
    m.christoffels.dim = 2;
    m.christoffels.eval = [](const Point& x) {
        Tensor3 G(2, 2, 2);
        const double s = std::sin(x[0]);
        const double c = std::cos(x[0]);
        G(0, 1, 1) = -s * c;                       // theta_{phi phi}
        G(1, 0, 1) = G(1, 1, 0) = c / s;           // phi_{theta phi}
        return G;
    };
    m.periodic = {std::nullopt, kTwoPi};
    m.guard = [pole_margin](const Point& x) {
        return x[0] > pole_margin && x[0] < M_PI - pole_margin;
    };
    return m;
}

ChartedManifold half_plane(double y_floor) {
    ChartedManifold m;
    m.dim = 2;
    m.metric.dim = 2;
    m.metric.eval = [](const Point& x) {
        const double y2 = x[1] * x[1];
        return (Mat::Identity(2, 2) / y2).eval();
    };
    m.metric.inv_eval = [](const Point& x) {
        const double y2 = x[1] * x[1];
        return (Mat::Identity(2, 2) * y2).eval();
    };
    m.christoffels.dim = 2;
    m.christoffels.eval = [](const Point& x) {
        Tensor3 G(2, 2, 2);
        const double iy = 1.0 / x[1];
        G(0, 0, 1) = G(0, 1, 0) = -iy;  // x_{xy}
        G(1, 0, 0) = iy;                // y_{xx}
        G(1, 1, 1) = -iy;               // y_{yy}
        return G;
    };
    m.periodic = {std::nullopt, std::nullopt};
    m.guard = [y_floor](const Point& x) { return x[1] > y_floor; };
    return m;
}

ChartedManifold circle() {
    ChartedManifold m;
    m.dim = 1;
    m.metric = MetricField::euclidean(1);
    m.christoffels = ChristoffelField::flat(1);
    m.periodic = {kTwoPi};
    return m;
}

CurvatureField sphere_curvature() {
    // Unit sphere: R^l_{ijk} with R(X,Y)Z = nabla_X nabla_Y Z - ... convention.
    // Nonzero entries in the polar chart follow from sectional curvature 1:
    // R(e_theta, e_phi)e_phi = sin^2 e_theta, R(e_theta, e_phi)e_theta = -e_phi.
    CurvatureField r;
    r.dim = 2;
    r.eval = [](const Point& x) {
        Tensor3 R(2, 2, 4);
        const double s2 = std::sin(x[0]) * std::sin(x[0]);
        // indices: (l, i, j*2 + k) for R^l_{ijk}
        R(0, 0, 1 * 2 + 1) = s2;     // R^theta_{theta phi phi}
        R(0, 1, 0 * 2 + 1) = -s2;    // R^theta_{phi theta phi}
        R(1, 0, 1 * 2 + 0) = -1.0;   // R^phi_{theta phi theta}
        R(1, 1, 0 * 2 + 0) = 1.0;    // R^phi_{phi theta theta}
        return R;
    };
    return r;
}

ChartedManifold manifold_by_name(const std::string& name) {
    if (name == "euclidean-plane") return euclidean_plane();
    if (name == "flat-torus") return flat_torus();
    if (name == "sphere-chart") return sphere_chart();
    if (name == "half-plane") return half_plane();
    if (name == "circle") return circle();
    throw ConfigError("unknown manifold: " + name);
}

std::vector<std::string> manifold_names() {
    return {"euclidean-plane", "flat-torus", "sphere-chart", "half-plane", "circle"};
}

} // namespace vertmart
