#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vertmart/corpus.hpp>
#include <vertmart/errors.hpp>
#include <vertmart/paths.hpp>
#include <vertmart/rng.hpp>

#include "test_support.hpp"

using namespace vertmart;

namespace {

Point pt(double a, double b) {
    Point p(2);
    p << a, b;
    return p;
}

} // namespace

TEST_CASE("philox reproduces the published known-answer vectors") {
    const auto zero = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(zero[0] == 0x6627e8d5u);
    CHECK(zero[1] == 0xe169c58du);
    CHECK(zero[2] == 0xbc57ac4cu);
    CHECK(zero[3] == 0x9b00dbd8u);

    const auto ones = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                        {0xffffffffu, 0xffffffffu});
    CHECK(ones[0] == 0x408f276du);
    CHECK(ones[1] == 0x41c83b0eu);
    CHECK(ones[2] == 0xa20bc7c6u);
    CHECK(ones[3] == 0x6d5451fdu);
}

TEST_CASE("gaussian stream moments are sane") {
    GaussianStream rng(7, 3);
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.normal();
        s += x;
        s2 += x * x;
    }
    CHECK(s / n == doctest::Approx(0.0).epsilon(0.02).scale(1.0));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sde with zero coefficients stays constant, pure drift is a line") {
    const Point x0 = pt(0.5, -0.25);
    const TimeGrid grid{0.0, 0.01, 100};
    auto zero_drift = [](const Point&) { return Vec::Zero(2); };
    auto zero_diff = [](const Point&) { return Mat::Zero(2, 2); };
    const SamplePath constant = simulate_sde(zero_drift, zero_diff, 2, x0, grid, 1, 0);
    CHECK((constant.values.back() - x0).norm() == 0.0);

    Vec c(2);
    c << 0.3, -0.1;
    const SamplePath line =
        simulate_sde([c](const Point&) { return c; }, zero_diff, 2, x0, grid, 1, 0);
    CHECK((line.values.back() - (x0 + c * 1.0)).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("unit-diffusion sde has unit terminal variance") {
    const TimeGrid grid{0.0, 1e-2, 100};
    auto drift = [](const Point&) { return Vec::Zero(1); };
    auto diff = [](const Point&) { return Mat::Identity(1, 1); };
    const int n_paths = 10000;
    std::vector<double> terminal(n_paths);
    for (int i = 0; i < n_paths; ++i)
        terminal[i] =
            simulate_sde(drift, diff, 1, Vec::Zero(1), grid, 42, i).values.back()[0];
    const MeanSe m = mean_se(terminal);
    std::vector<double> sq(n_paths);
    for (int i = 0; i < n_paths; ++i) sq[i] = terminal[i] * terminal[i];
    const MeanSe v = mean_se(sq);
    CHECK(std::abs(v.mean - 1.0) < 3.0 * v.se);
    CHECK(std::abs(m.mean) < 3.0 * m.se);
}

TEST_CASE("flat-torus BM wraps and keeps raw increments") {
    const auto man = flat_torus();
    const TimeGrid grid{0.0, 1e-3, 2000};
    const SamplePath path = simulate_bm(man, pt(0.1, 6.2), grid, 5, 0);
    REQUIRE(path.alive_to_horizon());
    for (const auto& v : path.values) {
        CHECK(v[0] >= 0.0);
        CHECK(v[0] < 2.0 * M_PI);
        CHECK(v[1] >= 0.0);
        CHECK(v[1] < 2.0 * M_PI);
    }
    for (const auto& d : path.increments) CHECK(d.lpNorm<Eigen::Infinity>() < 0.5);
}

TEST_CASE("quadratic covariation basics") {
    const TimeGrid grid{0.0, 1e-3, 1000};
    auto zero_diff = [](const Point&) { return Mat::Zero(2, 2); };

    const SamplePath constant =
        simulate_sde([](const Point&) { return Vec::Zero(2); }, zero_diff, 2, pt(1, 1), grid, 1, 0);
    const QuadraticCovariation qc0 = quadratic_covariation(constant);
    CHECK(qc0.cumulative.back().norm() == 0.0);

    Vec c(2);
    c << 2.0, 0.0;
    const SamplePath line = simulate_sde([c](const Point&) { return c; }, zero_diff, 2, pt(0, 0), grid, 1, 0);
    // finite-variation path: bracket c^2 t dt -> 0 with dt
    CHECK(quadratic_covariation(line).cumulative.back()(0, 0) ==
          doctest::Approx(4.0 * 1.0 * 1e-3).epsilon(1e-9));
}

TEST_CASE("BM bracket diagonal grows like t") {
    const auto man = euclidean_plane();
    const TimeGrid grid{0.0, 1e-3, 1000};
    const int n_paths = 200;
    std::vector<double> diag(n_paths);
    for (int i = 0; i < n_paths; ++i) {
        const SamplePath p = simulate_bm(man, pt(0, 0), grid, 99, i);
        const QuadraticCovariation qc = quadratic_covariation(p);
        diag[i] = qc.cumulative.back()(0, 0);
    }
    const MeanSe m = mean_se(diag);
    CHECK(std::abs(m.mean - 1.0) < 3.0 * std::max(m.se, 1e-12));
}

TEST_CASE("sphere BM respects the equator symmetry and the pole repulsion") {
    const auto man = sphere_chart();
    const TimeGrid grid{0.0, 1e-3, 500};
    const int n_paths = 2000;

    std::vector<double> from_equator;
    std::vector<double> from_third;
    for (int i = 0; i < n_paths; ++i) {
        const SamplePath a = simulate_bm(man, pt(M_PI / 2.0, 0.0), grid, 7, i);
        if (a.alive_to_horizon()) from_equator.push_back(a.values.back()[0] - M_PI / 2.0);
        const SamplePath b = simulate_bm(man, pt(M_PI / 3.0, 0.0), grid, 8, i);
        if (b.alive_to_horizon()) from_third.push_back(b.values.back()[0] - M_PI / 3.0);
    }
    const MeanSe eq = mean_se(from_equator);
    CHECK(std::abs(eq.mean) < 3.0 * eq.se);

    // mean drift at pi/3 is 1/2 cot(theta) > 0 toward the equator
    const MeanSe th = mean_se(from_third);
    CHECK(th.mean > 3.0 * th.se);
}

TEST_CASE("half-plane path truncates at the chart floor") {
    const auto man = half_plane(0.5);
    const TimeGrid grid{0.0, 1e-3, 5000};
    const SamplePath p = simulate_bm(man, pt(0.0, 0.55), grid, 3, 1);
    CHECK(p.alive_until < grid.n_steps);
    for (int n = 0; n <= p.alive_until; ++n) CHECK(p.values[n][1] > 0.5);
}

TEST_CASE("bm precondition errors") {
    const auto man = half_plane(0.5);
    CHECK_THROWS_AS(simulate_bm(man, pt(0.0, 0.2), TimeGrid{0, 1e-3, 10}, 1, 0),
                    PreconditionError);
}

TEST_CASE("ensembles are bit-identical across worker counts") {
    const auto man = sphere_chart();
    const TimeGrid grid{0.0, 1e-3, 200};
    auto factory = [&](uint64_t i) { return simulate_bm(man, pt(1.2, 0.7), grid, 77, i); };

    const Ensemble serial = simulate_ensemble_serial(factory, 64, 77);
    const Ensemble parallel = simulate_ensemble(factory, 64, 77, 4);
    const Ensemble parallel2 = simulate_ensemble(factory, 64, 77, 2);
    REQUIRE(serial.paths.size() == parallel.paths.size());
    for (size_t i = 0; i < serial.paths.size(); ++i) {
        CHECK(serial.paths[i].alive_until == parallel.paths[i].alive_until);
        for (size_t n = 0; n < serial.paths[i].values.size(); ++n) {
            CHECK((serial.paths[i].values[n] - parallel.paths[i].values[n]).norm() == 0.0);
            CHECK((serial.paths[i].values[n] - parallel2.paths[i].values[n]).norm() == 0.0);
        }
    }

    auto terminal = [](const SamplePath& p) { return p.values.back()[0]; };
    const auto a = map_paths(serial, terminal, 4);
    const auto b = map_paths_serial(serial, terminal);
    CHECK(a == b);
}
