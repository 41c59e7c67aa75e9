#include "vertmart/martingale.hpp"

#include <algorithm>
#include <cmath>

#include "vertmart/errors.hpp"

namespace vertmart {

double MartingaleReport::max_abs_z() const {
    double m = std::abs(z_score);
    for (double z : interval_z) m = std::max(m, std::abs(z));
    return m;
}

std::vector<RealPath> drift_part(const SamplePath& path, const AdaptedSubmersion& sub) {
    const int m = sub.base_dim();
    const int k = sub.fiber_dim;

    std::vector<RealPath> out(k);
    for (int a = 0; a < k; ++a) {
        out[a].grid = path.grid;
        out[a].alive_until = path.alive_until;
        out[a].values.reserve(path.alive_until + 1);
        out[a].values.push_back(0.0);
    }
    Vec acc = Vec::Zero(k);
    for (int n = 0; n < path.alive_until; ++n) {
        const VerticalChristoffels gv = vertical_christoffels(sub, path.values[n]);
        acc += vertical_ito_increment(gv, m, path.increments[n]);
        for (int a = 0; a < k; ++a) out[a].values.push_back(acc[a]);
    }
    return out;
}

std::vector<RealPath> connection_drift_part(const SamplePath& path,
                                            const ChristoffelField& connection) {
    const int n_dim = path.dim();
    std::vector<RealPath> out(n_dim);
    for (int c = 0; c < n_dim; ++c) {
        out[c].grid = path.grid;
        out[c].alive_until = path.alive_until;
        out[c].values.push_back(0.0);
    }
    Vec acc = Vec::Zero(n_dim);
    for (int n = 0; n < path.alive_until; ++n) {
        const Tensor3 G = connection.eval(path.values[n]);
        const Vec& d = path.increments[n];
        for (int c = 0; c < n_dim; ++c) {
            double quad = 0.0;
            for (int a = 0; a < n_dim; ++a)
                for (int b = 0; b < n_dim; ++b) quad += G(c, a, b) * d[a] * d[b];
            acc[c] += d[c] + 0.5 * quad;
            out[c].values.push_back(acc[c]);
        }
    }
    return out;
}

namespace {

double z_of(const MeanSe& s) {
    if (s.se > 0.0) return s.mean / s.se;
    return s.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
}

} // namespace

MartingaleReport martingale_test(const std::vector<RealPath>& ensemble, double z_crit,
                                 int partitions, size_t min_paths) {
    std::vector<const RealPath*> usable;
    usable.reserve(ensemble.size());
    for (const auto& p : ensemble)
        if (p.alive_to_horizon()) usable.push_back(&p);

    MartingaleReport report;
    report.usable_paths = usable.size();
    report.truncated_fraction =
        ensemble.empty() ? 0.0
                         : 1.0 - static_cast<double>(usable.size()) / static_cast<double>(ensemble.size());
    report.low_confidence = report.truncated_fraction >= 0.20;
    if (usable.size() < min_paths)
        throw InsufficientSampleError("martingale_test: only " + std::to_string(usable.size()) +
                                      " paths alive to horizon");

    const int n_steps = usable.front()->grid.n_steps;
    std::vector<double> terminal(usable.size());
    for (size_t i = 0; i < usable.size(); ++i) terminal[i] = usable[i]->values.back();
    const MeanSe term = mean_se(terminal);
    report.estimate = term.mean;
    report.std_error = term.se;
    report.z_score = z_of(term);

    bool all_pass = std::abs(report.z_score) <= z_crit;
    for (int part = 0; part < partitions; ++part) {
        const int lo = static_cast<int>(std::llround(static_cast<double>(n_steps) * part / partitions));
        const int hi =
            static_cast<int>(std::llround(static_cast<double>(n_steps) * (part + 1) / partitions));
        std::vector<double> inc(usable.size());
        for (size_t i = 0; i < usable.size(); ++i)
            inc[i] = usable[i]->values[hi] - usable[i]->values[lo];
        const double z = z_of(mean_se(inc));
        report.interval_z.push_back(z);
        all_pass = all_pass && std::abs(z) <= z_crit;
    }
    report.pass = all_pass;
    return report;
}

RealPath brownian_check(const SamplePath& path, const ChartedManifold& man,
                        const QuadraticForm& b) {
    RealPath r;
    r.grid = path.grid;
    r.alive_until = path.alive_until;
    r.values.push_back(0.0);
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Point& x = path.values[n];
        const Vec& d = path.increments[n];
        const Mat bx = b.eval(x);
        const Mat ginv = man.metric.inv_eval(x);
        acc += d.dot(bx * d) - (ginv * bx).trace() * path.grid.dt;
        r.values.push_back(acc);
    }
    return r;
}

} // namespace vertmart
