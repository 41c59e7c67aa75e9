#include "vertmart/maps.hpp"

#include <cmath>

#include "vertmart/errors.hpp"

namespace vertmart {

SmoothMapJet SmoothMapJet::from_value(int domain_dim, int target_dim,
                                      std::function<Vec(const Point&)> value, double h) {
    SmoothMapJet jet;
    jet.domain_dim = domain_dim;
    jet.target_dim = target_dim;
    jet.value = value;
    jet.jacobian = [value, domain_dim, target_dim, h](const Point& y) {
        Mat J(target_dim, domain_dim);
        for (int i = 0; i < domain_dim; ++i) {
            Point yp = y, ym = y;
            yp[i] += h;
            ym[i] -= h;
            J.col(i) = (value(yp) - value(ym)) / (2.0 * h);
        }
        return J;
    };
    jet.hessian = [value, domain_dim, target_dim, h](const Point& y) {
        Tensor3 H(target_dim, domain_dim, domain_dim);
        const Vec f0 = value(y);
        for (int i = 0; i < domain_dim; ++i) {
            for (int j = 0; j <= i; ++j) {
                Vec d(target_dim);
                if (i == j) {
                    Point yp = y, ym = y;
                    yp[i] += h;
                    ym[i] -= h;
                    d = (value(yp) - 2.0 * f0 + value(ym)) / (h * h);
                } else {
                    Point ypp = y, ypm = y, ymp = y, ymm = y;
                    ypp[i] += h; ypp[j] += h;
                    ypm[i] += h; ypm[j] -= h;
                    ymp[i] -= h; ymp[j] += h;
                    ymm[i] -= h; ymm[j] -= h;
                    d = (value(ypp) - value(ypm) - value(ymp) + value(ymm)) / (4.0 * h * h);
                }
                for (int A = 0; A < target_dim; ++A) {
                    H(A, i, j) = d[A];
                    H(A, j, i) = d[A];
                }
            }
        }
        return H;
    };
    return jet;
}

namespace {

// Vertical projection of a first-order pushforward: base components dropped,
// fiber block kept (P_v fixes fiber directions).
Vec vertical_first_order(const AdaptedSubmersion& sub, const Vec& full) {
    return full.tail(sub.fiber_dim);
}

} // namespace

Tensor3 vertical_sff(const SmoothMapJet& phi, const AdaptedSubmersion& sub,
                     const ChristoffelField& conn_domain, const Point& y) {
    const int n = phi.domain_dim;
    const int k = sub.fiber_dim;
    const int m = sub.base_dim();
    const MapJet jet = phi.at(y);
    const Point p = jet.value;
    const VerticalChristoffels gv = vertical_christoffels(sub, p);
    const Tensor3 GN = conn_domain.eval(y);

    Tensor3 beta(k, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            SecondOrderVector L = SecondOrderVector::zero(n);
            L.second(i, j) += 0.5;
            L.second(j, i) += 0.5;

            const SecondOrderVector pushed = pushforward_second_order(jet, L);
            const SecondOrderVector proj = project_second_order(sub, pushed, p);
            const Vec term1 = apply_vertical_connection(gv, m, proj);

            Vec gn_vec(n);
            for (int c = 0; c < n; ++c) gn_vec[c] = 0.5 * (GN(c, i, j) + GN(c, j, i));
            const Vec term2 = vertical_first_order(sub, jet.jacobian * gn_vec);

            for (int a = 0; a < k; ++a) {
                beta(a, i, j) = term1[a] - term2[a];
                beta(a, j, i) = beta(a, i, j);
            }
        }
    return beta;
}

Vec tension_field(const SmoothMapJet& phi, const AdaptedSubmersion& sub,
                  const ChristoffelField& conn_domain, const MetricField& metric_domain,
                  const Point& y) {
    const Tensor3 beta = vertical_sff(phi, sub, conn_domain, y);
    const Mat ginv = metric_domain.inv_eval(y);
    const int n = phi.domain_dim;
    Vec tau = Vec::Zero(sub.fiber_dim);
    for (int a = 0; a < sub.fiber_dim; ++a)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) tau[a] += ginv(i, j) * beta(a, i, j);
    return tau;
}

HarmonicSectionReport is_harmonic_section(const SmoothMapJet& sigma, const AdaptedSubmersion& sub,
                                          const ChristoffelField& conn_base,
                                          const MetricField& metric_base,
                                          const std::function<Point(int)>& sample_point,
                                          int samples, double tol) {
    const int m = sub.base_dim();
    HarmonicSectionReport report;
    for (int s = 0; s < samples; ++s) {
        const Point y = sample_point(s);
        const Vec p = sigma.value(y);
        if ((p.head(m) - y).lpNorm<Eigen::Infinity>() > 1e-10)
            throw PreconditionError("is_harmonic_section: input is not a section (pi . sigma != id)");
        const Vec tau = tension_field(sigma, sub, conn_base, metric_base, y);
        report.max_tension = std::max(report.max_tension, tau.lpNorm<Eigen::Infinity>());
    }
    report.harmonic = report.max_tension <= tol;
    return report;
}

SamplePath map_path(const SmoothMapJet& phi, const SamplePath& path) {
    SamplePath out;
    out.grid = path.grid;
    out.alive_until = path.alive_until;
    out.values.reserve(path.alive_until + 1);
    out.increments.reserve(path.alive_until);
    out.values.push_back(phi.value(path.values[0]));
    for (int n = 0; n < path.alive_until; ++n) {
        const Vec next = phi.value(path.values[n + 1]);
        // base rows of the image increment are the raw source increments when
        // phi is a section; for general maps the value difference is used.
        out.increments.push_back(next - out.values.back());
        out.values.push_back(next);
    }
    return out;
}

namespace {

// Section-aware mapped path: reuse raw base increments (periodic-safe) and
// value differences on the fiber block.
SamplePath map_section_path(const SmoothMapJet& phi, const AdaptedSubmersion& sub,
                            const SamplePath& path) {
    const int m = sub.base_dim();
    SamplePath out = map_path(phi, path);
    for (int n = 0; n < path.alive_until; ++n)
        out.increments[n].head(m) = path.increments[n].head(m);
    return out;
}

bool is_section_of(const SmoothMapJet& phi, const AdaptedSubmersion& sub, const Point& probe) {
    if (phi.target_dim != sub.total_dim() || phi.domain_dim != sub.base_dim()) return false;
    const Vec p = phi.value(probe);
    return (p.head(sub.base_dim()) - probe).lpNorm<Eigen::Infinity>() <= 1e-10;
}

} // namespace

RealPath geometric_ito_residual(const SmoothMapJet& phi, const VerticalForm& theta,
                                const AdaptedSubmersion& sub, const ChristoffelField& conn_domain,
                                const SamplePath& path) {
    const int m = sub.base_dim();
    const SamplePath image = is_section_of(phi, sub, path.values[0])
                                 ? map_section_path(phi, sub, path)
                                 : map_path(phi, path);

    const RealPath lhs = vertical_ito_integral(theta, sub, image);

    // pullback of the (chart-relative) vertical form: (phi^* theta)_i = theta_a d_i phi^a
    auto pullback = [&](const Point& y) {
        const Mat J = phi.jacobian(y);
        const Vec th = theta.eval(phi.value(y));
        Vec eta = Vec::Zero(phi.domain_dim);
        for (int i = 0; i < phi.domain_dim; ++i)
            for (int a = 0; a < sub.fiber_dim; ++a) eta[i] += th[a] * J(m + a, i);
        return eta;
    };
    const RealPath mid = ito_integral(pullback, conn_domain, path);

    QuadraticForm half_beta;
    half_beta.dim = phi.domain_dim;
    half_beta.eval = [&](const Point& y) {
        const Tensor3 beta = vertical_sff(phi, sub, conn_domain, y);
        const Vec th = theta.eval(phi.value(y));
        Mat b = Mat::Zero(phi.domain_dim, phi.domain_dim);
        for (int a = 0; a < sub.fiber_dim; ++a)
            for (int i = 0; i < phi.domain_dim; ++i)
                for (int j = 0; j < phi.domain_dim; ++j) b(i, j) += 0.5 * th[a] * beta(a, i, j);
        return b;
    };
    const RealPath quad = integrate_quadratic(half_beta, path);

    RealPath r;
    r.grid = path.grid;
    r.alive_until = path.alive_until;
    r.values.resize(lhs.values.size());
    for (size_t i = 0; i < r.values.size(); ++i)
        r.values[i] = lhs.values[i] - mid.values[i] - quad.values[i];
    return r;
}

RealPath stratonovich_transfer_residual(const SmoothMapJet& phi, const VerticalForm& theta,
                                        const AdaptedSubmersion& sub, const SamplePath& path) {
    const int m = sub.base_dim();
    const SamplePath image = is_section_of(phi, sub, path.values[0])
                                 ? map_section_path(phi, sub, path)
                                 : map_path(phi, path);
    const RealPath lhs =
        vertical_stratonovich_integral(theta, sub, image, StratonovichRule::LeftPointBrackets);

    auto pullback = [&](const Point& y) {
        const Mat J = phi.jacobian(y);
        const Vec th = theta.eval(phi.value(y));
        Vec eta = Vec::Zero(phi.domain_dim);
        for (int i = 0; i < phi.domain_dim; ++i)
            for (int a = 0; a < sub.fiber_dim; ++a) eta[i] += th[a] * J(m + a, i);
        return eta;
    };

    RealPath r;
    r.grid = path.grid;
    r.alive_until = path.alive_until;
    r.values.reserve(path.alive_until + 1);
    r.values.push_back(0.0);
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Vec eta = pullback(path.values[n] + 0.5 * path.increments[n]);
        acc += eta.dot(path.increments[n]);
        r.values.push_back(lhs.values[n + 1] - acc);
    }
    return r;
}

HarmonicityTestResult stochastic_harmonicity_test(const SmoothMapJet& sigma,
                                                  const AdaptedSubmersion& sub,
                                                  const ChartedManifold& base, const Point& x0,
                                                  const TimeGrid& grid, int n_paths,
                                                  uint64_t master_seed, double z_crit,
                                                  int partitions, int jobs) {
    if (!is_section_of(sigma, sub, x0))
        throw PreconditionError("stochastic_harmonicity_test: map is not a section");

    const int k = sub.fiber_dim;
    const Ensemble ens = simulate_ensemble(
        [&](uint64_t i) { return simulate_bm(base, x0, grid, master_seed, i); }, n_paths,
        master_seed, jobs);

    // drift parts of sigma(B) and the running tension integral per path
    std::vector<std::vector<RealPath>> drift(n_paths);
    std::vector<Vec> tension_integral(n_paths, Vec::Zero(k));
    const int total = n_paths;
#pragma omp parallel for schedule(dynamic) if (jobs != 1)
    for (int i = 0; i < total; ++i) {
        const SamplePath image = map_section_path(sigma, sub, ens.paths[i]);
        drift[i] = drift_part(image, sub);
        Vec acc = Vec::Zero(k);
        for (int n = 0; n < ens.paths[i].alive_until; ++n)
            acc += tension_field(sigma, sub, base.christoffels, base.metric, ens.paths[i].values[n]) *
                   grid.dt;
        tension_integral[i] = acc;
    }

    HarmonicityTestResult result;
    result.measured_drift = Vec::Zero(k);
    result.measured_se = Vec::Zero(k);
    result.predicted_drift = Vec::Zero(k);
    result.predicted_se = Vec::Zero(k);
    for (int a = 0; a < k; ++a) {
        std::vector<RealPath> component;
        component.reserve(n_paths);
        std::vector<double> terminal;
        std::vector<double> predicted;
        for (int i = 0; i < n_paths; ++i) {
            component.push_back(drift[i][a]);
            if (ens.paths[i].alive_to_horizon()) {
                terminal.push_back(drift[i][a].values.back());
                predicted.push_back(0.5 * tension_integral[i][a]);
            }
        }
        result.reports.push_back(martingale_test(component, z_crit, partitions));
        const MeanSe md = mean_se(terminal);
        const MeanSe pd = mean_se(predicted);
        result.measured_drift[a] = md.mean;
        result.measured_se[a] = md.se;
        result.predicted_drift[a] = pd.mean;
        result.predicted_se[a] = pd.se;
    }
    return result;
}

} // namespace vertmart
