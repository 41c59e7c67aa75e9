#include "vertmart/geometry.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "vertmart/errors.hpp"

namespace vertmart {

MetricField MetricField::euclidean(int dim) {
    MetricField m;
    m.dim = dim;
    m.eval = [dim](const Point&) { return Mat::Identity(dim, dim); };
    m.inv_eval = [dim](const Point&) { return Mat::Identity(dim, dim); };
    return m;
}

MetricField MetricField::from_eval(int dim, std::function<Mat(const Point&)> g) {
    MetricField m;
    m.dim = dim;
    m.eval = g;
    m.inv_eval = [g](const Point& x) {
        const Mat gx = g(x);
        Eigen::LLT<Mat> llt(gx);
        if (llt.info() != Eigen::Success)
            throw DegenerateMetricError("metric not SPD at requested point");
        return llt.solve(Mat::Identity(gx.rows(), gx.cols())).eval();
    };
    return m;
}

ChristoffelField ChristoffelField::flat(int dim) {
    ChristoffelField c;
    c.dim = dim;
    c.eval = [dim](const Point&) { return Tensor3(dim, dim, dim); };
    return c;
}

Point ChartedManifold::wrap(Point x) const {
    for (int a = 0; a < dim && a < static_cast<int>(periodic.size()); ++a) {
        if (!periodic[a]) continue;
        const double p = *periodic[a];
        x[a] -= p * std::floor(x[a] / p);
    }
    return x;
}

namespace {

void check_spd(const Mat& g) {
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success)
        throw DegenerateMetricError("metric not SPD on finite-difference stencil");
}

} // namespace

Tensor3 levi_civita(const MetricField& metric, const Point& x, double h,
                    const std::function<bool(const Point&)>& guard) {
    if (h <= 0.0) throw PreconditionError("levi_civita: step size must be positive");
    const int n = metric.dim;

    // d_l g_ij by central differences; every stencil point must be valid.
    std::vector<Mat> dg(n);
    for (int l = 0; l < n; ++l) {
        Point xp = x, xm = x;
        xp[l] += h;
        xm[l] -= h;
        if (guard && (!guard(xp) || !guard(xm)))
            throw ChartBoundaryError("levi_civita: stencil leaves chart domain");
        const Mat gp = metric.eval(xp);
        const Mat gm = metric.eval(xm);
        check_spd(gp);
        check_spd(gm);
        dg[l] = (gp - gm) / (2.0 * h);
    }

    const Mat g = metric.eval(x);
    check_spd(g);
    const Mat ginv = metric.inv_eval(x);

    Tensor3 gamma(n, n, n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma(k, i, j) = 0.5 * s;
                gamma(k, j, i) = gamma(k, i, j);
            }
    return gamma;
}

ChristoffelField christoffels_from_metric(const MetricField& metric, double h,
                                          std::function<bool(const Point&)> guard) {
    ChristoffelField c;
    c.dim = metric.dim;
    c.eval = [metric, h, guard](const Point& x) { return levi_civita(metric, x, h, guard); };
    return c;
}

Mat square_operator(const SecondOrderVector& L) { return L.second; }

SecondOrderVector pushforward_second_order(const MapJet& jet, const SecondOrderVector& L) {
    const int n = static_cast<int>(jet.jacobian.cols());
    const int m = static_cast<int>(jet.jacobian.rows());
    if (L.first.size() != n || L.second.rows() != n || L.second.cols() != n)
        throw PreconditionError("pushforward_second_order: dimension mismatch");

    SecondOrderVector out;
    out.second = jet.jacobian * L.second * jet.jacobian.transpose();
    out.first = jet.jacobian * L.first;
    for (int A = 0; A < m; ++A) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) s += jet.hessian(A, i, j) * L.second(i, j);
        out.first[A] += s;
    }
    return out;
}

Vec apply_connection(const Tensor3& christoffels, const SecondOrderVector& L) {
    const int n = christoffels.dim0();
    Vec out = L.first;
    for (int c = 0; c < n; ++c) {
        double s = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) s += christoffels(c, a, b) * L.second(a, b);
        out[c] += s;
    }
    return out;
}

CurvatureField curvature_from_christoffels(const ChristoffelField& gamma, double h) {
    CurvatureField r;
    const int n = gamma.dim;
    r.dim = n;
    r.eval = [gamma, h, n](const Point& x) {
        std::vector<Tensor3> dG(n);
        for (int i = 0; i < n; ++i) {
            Point xp = x, xm = x;
            xp[i] += h;
            xm[i] -= h;
            const Tensor3 gp = gamma.eval(xp);
            const Tensor3 gm = gamma.eval(xm);
            Tensor3 d(n, n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    for (int c = 0; c < n; ++c) d(a, b, c) = (gp(a, b, c) - gm(a, b, c)) / (2.0 * h);
            dG[i] = d;
        }
        const Tensor3 G = gamma.eval(x);
        Tensor3 out(n, n, n * n);
        for (int l = 0; l < n; ++l)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double v = dG[i](l, j, k) - dG[j](l, i, k);
                        for (int rho = 0; rho < n; ++rho)
                            v += G(l, i, rho) * G(rho, j, k) - G(l, j, rho) * G(rho, i, k);
                        out(l, i, j * n + k) = v;
                    }
        return out;
    };
    return r;
}

double metric_compatibility_defect(const MetricField& metric, const ChristoffelField& gamma,
                                   const Point& x, double h) {
    const int n = metric.dim;
    const Mat g = metric.eval(x);
    const Tensor3 G = gamma.eval(x);
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        Point xp = x, xm = x;
        xp[k] += h;
        xm[k] -= h;
        const Mat dgk = (metric.eval(xp) - metric.eval(xm)) / (2.0 * h);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double v = dgk(i, j);
                for (int l = 0; l < n; ++l)
                    v -= G(l, k, i) * g(l, j) + G(l, k, j) * g(i, l);
                worst = std::max(worst, std::abs(v));
            }
    }
    return worst;
}

} // namespace vertmart
