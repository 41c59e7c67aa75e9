#include "vertmart/submersion.hpp"

#include <cmath>

#include "vertmart/errors.hpp"
#include "vertmart/rng.hpp"

namespace vertmart {

ChartedManifold AdaptedSubmersion::total_manifold() const {
    if (!total_metric)
        throw PreconditionError("total_manifold: submersion carries no total-space metric");
    ChartedManifold m;
    m.dim = total_dim();
    m.metric = *total_metric;
    m.christoffels = ambient;
    m.periodic = total_periodic;
    m.guard = total_guard;
    return m;
}

VerticalForm VerticalForm::coordinate(int fiber_dim, int alpha) {
    VerticalForm f;
    f.fiber_dim = fiber_dim;
    f.eval = [fiber_dim, alpha](const Point&) {
        Vec v = Vec::Zero(fiber_dim);
        v[alpha] = 1.0;
        return v;
    };
    return f;
}

VerticalChristoffels vertical_christoffels(const AdaptedSubmersion& sub, const Point& p) {
    if (!sub.in_domain(p)) throw ChartBoundaryError("vertical_christoffels: point outside chart");
    const int m = sub.base_dim();
    const int k = sub.fiber_dim;
    const Tensor3 GE = sub.ambient.eval(p);
    const Mat Pv = sub.vertical_projector(p);

    VerticalChristoffels gv;
    gv.fiber_fiber = Tensor3(k, k, k);
    gv.fiber_base = Tensor3(k, k, m);

    const int n = m + k;
    Vec column(n);
    auto project_fiber = [&](int B, int C, auto&& sink) {
        for (int A = 0; A < n; ++A) column[A] = GE(A, B, C);
        const Vec proj = Pv * column;
        for (int a = 0; a < k; ++a) sink(a, proj[m + a]);
    };

    for (int b = 0; b < k; ++b)
        for (int c = 0; c <= b; ++c)
            project_fiber(m + b, m + c, [&](int a, double val) {
                gv.fiber_fiber(a, b, c) = val;
                gv.fiber_fiber(a, c, b) = val;
            });
    for (int b = 0; b < k; ++b)
        for (int j = 0; j < m; ++j)
            project_fiber(m + b, j, [&](int a, double val) { gv.fiber_base(a, b, j) = val; });
    return gv;
}

SecondOrderVector project_second_order(const AdaptedSubmersion& sub, const SecondOrderVector& L,
                                       const Point& p) {
    const int m = sub.base_dim();
    const int n = sub.total_dim();
    SecondOrderVector out = SecondOrderVector::zero(n);

    // quadratic block: drop base-base, keep fiber-fiber and (symmetrized) mixed
    for (int A = 0; A < n; ++A)
        for (int B = 0; B < n; ++B) {
            if (A < m && B < m) continue;
            out.second(A, B) = 0.5 * (L.second(A, B) + L.second(B, A));
        }

    // first-order block: base components dropped, fiber block through P_v
    Vec fiber_only = Vec::Zero(n);
    fiber_only.tail(n - m) = L.first.tail(n - m);
    out.first = sub.vertical_projector(p) * fiber_only;
    return out;
}

Vec apply_vertical_connection(const VerticalChristoffels& gv, int base_dim,
                              const SecondOrderVector& projected) {
    const int k = gv.fiber_fiber.dim0();
    const int m = base_dim;
    Vec out(k);
    for (int a = 0; a < k; ++a) {
        double s = projected.first[m + a];
        for (int b = 0; b < k; ++b) {
            for (int c = 0; c < k; ++c) s += gv.fiber_fiber(a, b, c) * projected.second(m + b, m + c);
            for (int j = 0; j < m; ++j)
                s += gv.fiber_base(a, b, j) *
                     (projected.second(m + b, j) + projected.second(j, m + b));
        }
        out[a] = s;
    }
    return out;
}

Vec apply_vertical_connection(const AdaptedSubmersion& sub, const SecondOrderVector& projected,
                              const Point& p) {
    return apply_vertical_connection(vertical_christoffels(sub, p), sub.base_dim(), projected);
}

Vec horizontal_lift(const AdaptedSubmersion& sub, const Point& p, const Vec& base_vector) {
    const int n = sub.total_dim();
    Vec ext = Vec::Zero(n);
    ext.head(sub.base_dim()) = base_vector;
    return ext - sub.vertical_projector(p) * ext;
}

AffineSubmersionReport validate_affine_submersion(const AdaptedSubmersion& sub, int samples,
                                                  const std::function<Point(int)>& sample_point,
                                                  double tol, uint64_t seed) {
    const int m = sub.base_dim();
    const int n = sub.total_dim();
    const double h = 1e-5;
    GaussianStream rng(seed, 0xAFF1);

    AffineSubmersionReport report;
    for (int s = 0; s < samples; ++s) {
        const Point p = sample_point(s);
        Vec X(m), Y(m);
        for (int i = 0; i < m; ++i) X[i] = rng.normal();
        for (int i = 0; i < m; ++i) Y[i] = rng.normal();

        // nabla^E_{H(X)} H(Y) at p for the constant base field Y:
        // directional derivative of the lift map plus the ambient symbols.
        const Vec HX = horizontal_lift(sub, p, X);
        Vec deriv = Vec::Zero(n);
        for (int A = 0; A < n; ++A) {
            if (std::abs(HX[A]) < 1e-300) continue;
            Point pp = p, pm = p;
            pp[A] += h;
            pm[A] -= h;
            deriv += HX[A] * (horizontal_lift(sub, pp, Y) - horizontal_lift(sub, pm, Y)) / (2.0 * h);
        }
        const Tensor3 GE = sub.ambient.eval(p);
        const Vec HY = horizontal_lift(sub, p, Y);
        Vec covar = deriv;
        for (int C = 0; C < n; ++C) {
            double acc = 0.0;
            for (int A = 0; A < n; ++A)
                for (int B = 0; B < n; ++B) acc += GE(C, A, B) * HX[A] * HY[B];
            covar[C] += acc;
        }
        const Mat Pv = sub.vertical_projector(p);
        const Vec horizontal_part = covar - Pv * covar;

        // H(nabla^M_X Y) for constant fields: lift of the base symbols' action.
        const Tensor3 GM = sub.base.christoffels.eval(sub.project_to_base(p));
        Vec base_cov = Vec::Zero(m);
        for (int kk = 0; kk < m; ++kk) {
            double acc = 0.0;
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) acc += GM(kk, i, j) * X[i] * Y[j];
            base_cov[kk] = acc;
        }
        const Vec lifted = horizontal_lift(sub, p, base_cov);

        report.max_defect = std::max(report.max_defect, (horizontal_part - lifted).lpNorm<Eigen::Infinity>());
    }
    report.holds = report.max_defect <= tol;
    return report;
}

} // namespace vertmart
