#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vertmart/corpus.hpp>
#include <vertmart/errors.hpp>
#include <vertmart/geometry.hpp>

#include "test_support.hpp"

using namespace vertmart;

namespace {

Point pt(double a, double b) {
    Point p(2);
    p << a, b;
    return p;
}

// Apply a second-order operator to a scalar function by finite differences.
double apply_operator(const SecondOrderVector& L, const std::function<double(const Point&)>& f,
                      const Point& x, double h = 1e-4) {
    const int n = static_cast<int>(x.size());
    double out = 0.0;
    for (int i = 0; i < n; ++i) {
        Point xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        out += L.first[i] * (f(xp) - f(xm)) / (2.0 * h);
        for (int j = 0; j < n; ++j) {
            Point xpp = x, xpm = x, xmp = x, xmm = x;
            xpp[i] += h; xpp[j] += h;
            xpm[i] += h; xpm[j] -= h;
            xmp[i] -= h; xmp[j] += h;
            xmm[i] -= h; xmm[j] -= h;
            out += L.second(i, j) * (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h * h);
        }
    }
    return out;
}

} // namespace

TEST_CASE("levi_civita on the Euclidean plane vanishes") {
    const auto man = euclidean_plane();
    const Tensor3 G = levi_civita(man.metric, pt(0.37, -1.2));
    CHECK(G.max_abs() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("levi_civita matches the sphere closed form") {
    const auto man = sphere_chart();
    const Point x = pt(M_PI / 3.0, 0.4);
    const Tensor3 G = levi_civita(man.metric, x, 1e-5, man.guard);
    CHECK(G(0, 1, 1) == doctest::Approx(-std::sqrt(3.0) / 4.0).epsilon(1e-6));  // -sin cos
    CHECK(G(1, 0, 1) == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-6));   // cot
    CHECK(G(0, 1, 1) == doctest::Approx(-0.4330127).epsilon(1e-6));
    CHECK(G(1, 0, 1) == doctest::Approx(0.5773503).epsilon(1e-6));
}

TEST_CASE("levi_civita matches the half-plane closed form") {
    const auto man = half_plane();
    const Tensor3 G = levi_civita(man.metric, pt(0.0, 2.0), 1e-5, man.guard);
    CHECK(G(0, 0, 1) == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(G(1, 0, 0) == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(G(1, 1, 1) == doctest::Approx(-0.5).epsilon(1e-8));
}

TEST_CASE("finite-difference symbols agree with closed forms at random points") {
    GaussianStream rng(101, 0);
    for (const char* name : {"sphere-chart", "half-plane"}) {
        const auto man = manifold_by_name(name);
        for (int s = 0; s < 100; ++s) {
            const Point x = std::string(name) == "sphere-chart"
                                ? vmtest::uniform_vec(rng, {{0.4, M_PI - 0.4}, {0.0, 2.0 * M_PI}})
                                : vmtest::uniform_vec(rng, {{-2.0, 2.0}, {0.5, 3.0}});
            const Tensor3 fd = levi_civita(man.metric, x, 1e-5, man.guard);
            const Tensor3 cf = man.christoffels.eval(x);
            for (int k = 0; k < 2; ++k)
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        CHECK(fd(k, i, j) == doctest::Approx(cf(k, i, j)).epsilon(1e-6).scale(1.0));
        }
    }
}

TEST_CASE("symbols are exactly symmetric and metric compatible") {
    GaussianStream rng(102, 0);
    const auto man = sphere_chart();
    for (int s = 0; s < 100; ++s) {
        const Point x = vmtest::uniform_vec(rng, {{0.4, M_PI - 0.4}, {0.0, 2.0 * M_PI}});
        const Tensor3 G = levi_civita(man.metric, x, 1e-5, man.guard);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) CHECK(G(k, i, j) == G(k, j, i));
        CHECK(metric_compatibility_defect(man.metric, man.christoffels, x) < 1e-5);
    }
}

TEST_CASE("levi_civita error paths") {
    MetricField bad;
    bad.dim = 2;
    bad.eval = [](const Point&) {
        Mat g(2, 2);
        g << 1.0, 2.0, 2.0, 1.0;  // indefinite
        return g;
    };
    bad.inv_eval = bad.eval;
    CHECK_THROWS_AS(levi_civita(bad, pt(0, 0)), DegenerateMetricError);

    const auto man = half_plane(0.5);
    CHECK_THROWS_AS(levi_civita(man.metric, pt(0.0, 0.500001), 1e-4, man.guard),
                    ChartBoundaryError);
}

TEST_CASE("square_operator extracts the quadratic block") {
    SecondOrderVector L = SecondOrderVector::zero(2);
    L.first << 1.0, -2.0;
    CHECK(square_operator(L).norm() == 0.0);

    L.second(0, 0) = 1.0;
    L.first << 3.0, 0.0;  // D_11 + 3 D_1
    const Mat q = square_operator(L);
    CHECK(q(0, 0) == 1.0);
    CHECK(q(0, 1) == 0.0);
    CHECK(q(1, 0) == 0.0);
    CHECK(q(1, 1) == 0.0);
}

TEST_CASE("square_operator agrees with the product-rule definition") {
    GaussianStream rng(103, 0);
    for (int s = 0; s < 20; ++s) {
        SecondOrderVector L = SecondOrderVector::zero(2);
        Mat a(2, 2);
        a << rng.normal(), rng.normal(), 0.0, rng.normal();
        a(1, 0) = a(0, 1);
        L.second = a;
        L.first << rng.normal(), rng.normal();
        const Point x = vmtest::uniform_vec(rng, {{-1.0, 1.0}, {-1.0, 1.0}});

        auto f = [](const Point& p) { return p[0]; };
        auto g = [](const Point& p) { return p[1]; };
        auto fg = [](const Point& p) { return p[0] * p[1]; };
        const double ql =
            0.5 * (apply_operator(L, fg, x) -
                   f(x) * apply_operator(L, g, x) - g(x) * apply_operator(L, f, x));
        CHECK(ql == doctest::Approx(square_operator(L)(0, 1)).epsilon(1e-6));
    }
}

TEST_CASE("pushforward through the identity and linear jets") {
    MapJet id;
    id.value = pt(1.0, 2.0);
    id.jacobian = Mat::Identity(2, 2);
    id.hessian = Tensor3(2, 2, 2);

    SecondOrderVector L = SecondOrderVector::zero(2);
    L.first << 0.5, -1.0;
    L.second << 1.0, 0.25, 0.25, 2.0;
    const SecondOrderVector out = pushforward_second_order(id, L);
    CHECK((out.first - L.first).norm() == 0.0);
    CHECK((out.second - L.second).norm() == 0.0);

    MapJet lin;
    Mat J(2, 2);
    J << 2.0, 1.0, 0.0, 3.0;
    lin.value = pt(0, 0);
    lin.jacobian = J;
    lin.hessian = Tensor3(2, 2, 2);
    SecondOrderVector pure = SecondOrderVector::zero(2);
    pure.second << 1.0, 0.0, 0.0, 1.0;
    const SecondOrderVector mapped = pushforward_second_order(lin, pure);
    CHECK((mapped.second - J * pure.second * J.transpose()).norm() == doctest::Approx(0.0));
    CHECK(mapped.first.norm() == 0.0);
}

TEST_CASE("pushforward of D_11 through f(x) = x^2 at x = 1") {
    MapJet jet;
    jet.value = Vec::Constant(1, 1.0);
    jet.jacobian = Mat::Constant(1, 1, 2.0);
    jet.hessian = Tensor3(1, 1, 1);
    jet.hessian(0, 0, 0) = 2.0;

    SecondOrderVector L = SecondOrderVector::zero(1);
    L.second(0, 0) = 1.0;
    const SecondOrderVector out = pushforward_second_order(jet, L);
    CHECK(out.second(0, 0) == doctest::Approx(4.0));
    CHECK(out.first[0] == doctest::Approx(2.0));

    // oracle: L(g . f) on test polynomials
    auto f = [](const Point& p) { Point q(1); q[0] = p[0] * p[0]; return q; };
    for (double c1 : {1.0, -0.5}) {
        auto g = [c1](const Point& p) { return c1 * p[0] + 0.25 * p[0] * p[0]; };
        Point x = Vec::Constant(1, 1.0);
        auto gf = [&](const Point& p) { return g(f(p)); };
        const double direct = apply_operator(L, gf, x);
        const double through = apply_operator(out, g, f(x));
        CHECK(direct == doctest::Approx(through).epsilon(1e-5));
    }
}

TEST_CASE("pushforward satisfies the quadratic-conjugation property") {
    GaussianStream rng(104, 0);
    for (int s = 0; s < 100; ++s) {
        MapJet jet;
        jet.value = pt(rng.normal(), rng.normal());
        Mat J(2, 2);
        J << rng.normal(), rng.normal(), rng.normal(), rng.normal();
        jet.jacobian = J;
        Tensor3 H(2, 2, 2);
        for (int A = 0; A < 2; ++A)
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j <= i; ++j) {
                    H(A, i, j) = rng.normal();
                    H(A, j, i) = H(A, i, j);
                }
        jet.hessian = H;

        SecondOrderVector L = SecondOrderVector::zero(2);
        L.first << rng.normal(), rng.normal();
        Mat a(2, 2);
        a << rng.normal(), 0.0, 0.0, rng.normal();
        a(0, 1) = a(1, 0) = rng.normal();
        L.second = a;

        const Mat lhs = square_operator(pushforward_second_order(jet, L));
        const Mat rhs = jet.jacobian * square_operator(L) * jet.jacobian.transpose();
        CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("curvature by finite differences matches the sphere closed form") {
    const auto man = sphere_chart();
    const auto fd = curvature_from_christoffels(man.christoffels);
    const auto cf = sphere_curvature();
    GaussianStream rng(105, 0);
    for (int s = 0; s < 20; ++s) {
        const Point x = vmtest::uniform_vec(rng, {{0.5, M_PI - 0.5}, {0.0, 2.0 * M_PI}});
        const Tensor3 a = fd.eval(x);
        const Tensor3 b = cf.eval(x);
        for (int l = 0; l < 2; ++l)
            for (int i = 0; i < 2; ++i)
                for (int jk = 0; jk < 4; ++jk)
                    CHECK(a(l, i, jk) == doctest::Approx(b(l, i, jk)).epsilon(1e-5).scale(1.0));
    }
}

TEST_CASE("apply_connection reduces to the identity on first-order vectors") {
    const auto man = sphere_chart();
    const Point x = pt(1.1, 0.3);
    SecondOrderVector L = SecondOrderVector::zero(2);
    L.first << 2.0, -0.5;
    const Vec out = apply_connection(man.christoffels.eval(x), L);
    CHECK((out - L.first).norm() == 0.0);
}
