#include "vertmart/paths.hpp"

#include <Eigen/Cholesky>
#include <omp.h>

#include "vertmart/errors.hpp"
#include "vertmart/rng.hpp"

namespace vertmart {

double Ensemble::truncated_fraction() const {
    if (paths.empty()) return 0.0;
    size_t truncated = 0;
    for (const auto& p : paths)
        if (!p.alive_to_horizon()) ++truncated;
    return static_cast<double>(truncated) / static_cast<double>(paths.size());
}

namespace {

Point wrap_point(Point x, const std::vector<std::optional<double>>& periodic) {
    for (size_t a = 0; a < periodic.size() && a < static_cast<size_t>(x.size()); ++a) {
        if (!periodic[a]) continue;
        const double p = *periodic[a];
        x[a] -= p * std::floor(x[a] / p);
    }
    return x;
}

} // namespace

SamplePath simulate_bm(const ChartedManifold& man, const Point& x0, const TimeGrid& grid,
                       uint64_t master_seed, uint64_t path_index) {
    if (!man.in_domain(x0)) throw PreconditionError("simulate_bm: x0 outside chart domain");
    if (grid.dt <= 0.0 || grid.n_steps < 1) throw PreconditionError("simulate_bm: bad time grid");

    const int n = man.dim;
    GaussianStream rng(master_seed, path_index);
    const double sqrt_dt = std::sqrt(grid.dt);

    SamplePath path;
    path.grid = grid;
    path.values.reserve(grid.n_steps + 1);
    path.increments.reserve(grid.n_steps);
    path.values.push_back(man.wrap(x0));
    path.alive_until = 0;

    for (int step = 0; step < grid.n_steps; ++step) {
        const Point& x = path.values.back();
        const Mat ginv = man.metric.inv_eval(x);
        Eigen::LLT<Mat> llt(ginv);
        if (llt.info() != Eigen::Success)
            throw DegenerateMetricError("simulate_bm: Cholesky of inverse metric failed");
        const Mat sigma = llt.matrixL();
        const Tensor3 G = man.christoffels.eval(x);

        Vec dw(n);
        for (int a = 0; a < n; ++a) dw[a] = rng.normal() * sqrt_dt;

        Vec drift = Vec::Zero(n);
        for (int i = 0; i < n; ++i) {
            double s = 0.0;
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k) s += ginv(j, k) * G(i, j, k);
            drift[i] = -0.5 * s;
        }

        const Vec delta = sigma * dw + drift * grid.dt;
        const Point next = man.wrap(x + delta);
        if (!man.in_domain(next)) break;  // chart exit: truncate at current index
        path.increments.push_back(delta);
        path.values.push_back(next);
        path.alive_until = step + 1;
    }
    return path;
}

SamplePath simulate_sde(const std::function<Vec(const Point&)>& drift,
                        const std::function<Mat(const Point&)>& diffusion, int noise_dim,
                        const Point& x0, const TimeGrid& grid, uint64_t master_seed,
                        uint64_t path_index, const std::vector<std::optional<double>>& periodic,
                        const std::function<bool(const Point&)>& guard) {
    if (grid.dt <= 0.0 || grid.n_steps < 1) throw PreconditionError("simulate_sde: bad time grid");
    if (guard && !guard(x0)) throw PreconditionError("simulate_sde: x0 outside domain");

    GaussianStream rng(master_seed, path_index);
    const double sqrt_dt = std::sqrt(grid.dt);

    SamplePath path;
    path.grid = grid;
    path.values.push_back(wrap_point(x0, periodic));
    path.alive_until = 0;

    for (int step = 0; step < grid.n_steps; ++step) {
        const Point& x = path.values.back();
        Vec dw(noise_dim);
        for (int a = 0; a < noise_dim; ++a) dw[a] = rng.normal() * sqrt_dt;
        const Vec delta = drift(x) * grid.dt + diffusion(x) * dw;
        const Point next = wrap_point(x + delta, periodic);
        if (guard && !guard(next)) break;
        path.increments.push_back(delta);
        path.values.push_back(next);
        path.alive_until = step + 1;
    }
    return path;
}

QuadraticCovariation quadratic_covariation(const SamplePath& path) {
    QuadraticCovariation qc;
    qc.grid = path.grid;
    const int n = path.dim();
    qc.cumulative.reserve(path.values.size());
    Mat acc = Mat::Zero(n, n);
    qc.cumulative.push_back(acc);
    for (int step = 0; step < path.alive_until; ++step) {
        const Vec& d = path.increments[step];
        acc += d * d.transpose();
        qc.cumulative.push_back(acc);
    }
    return qc;
}

Ensemble simulate_ensemble(const PathFactory& factory, int n_paths, uint64_t master_seed,
                           int jobs) {
    Ensemble ens;
    ens.master_seed = master_seed;
    ens.paths.resize(n_paths);
    if (jobs == 1) {
        for (int i = 0; i < n_paths; ++i) ens.paths[i] = factory(i);
        return ens;
    }
    if (jobs > 1) omp_set_num_threads(jobs);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n_paths; ++i) ens.paths[i] = factory(i);
    return ens;
}

Ensemble simulate_ensemble_serial(const PathFactory& factory, int n_paths, uint64_t master_seed) {
    Ensemble ens;
    ens.master_seed = master_seed;
    ens.paths.resize(n_paths);
    for (int i = 0; i < n_paths; ++i) ens.paths[i] = factory(i);
    return ens;
}

std::vector<double> map_paths(const Ensemble& ens,
                              const std::function<double(const SamplePath&)>& fn, int jobs) {
    std::vector<double> out(ens.paths.size());
    if (jobs == 1) {
        for (size_t i = 0; i < ens.paths.size(); ++i) out[i] = fn(ens.paths[i]);
        return out;
    }
    if (jobs > 1) omp_set_num_threads(jobs);
    const int n = static_cast<int>(ens.paths.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) out[i] = fn(ens.paths[i]);
    return out;
}

std::vector<double> map_paths_serial(const Ensemble& ens,
                                     const std::function<double(const SamplePath&)>& fn) {
    std::vector<double> out(ens.paths.size());
    for (size_t i = 0; i < ens.paths.size(); ++i) out[i] = fn(ens.paths[i]);
    return out;
}

} // namespace vertmart
