#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "vertmart/geometry.hpp"

namespace vertmart {

struct TimeGrid {
    double t0 = 0.0;
    double dt = 0.0;
    int n_steps = 0;

    double horizon() const { return t0 + dt * n_steps; }
    double time_at(int n) const { return t0 + dt * n; }
};

/// Discretized semimartingale in one chart. `values` hold wrapped chart
/// coordinates (valid for coefficient evaluation); `increments` hold the raw
/// per-step increments, which stay meaningful across periodic seams and feed
/// every bracket estimate. The path is usable through index `alive_until`.
struct SamplePath {
    TimeGrid grid;
    std::vector<Vec> values;      // n_steps + 1 entries
    std::vector<Vec> increments;  // n_steps entries; increments[n] = raw step n -> n+1
    int alive_until = 0;

    int dim() const { return values.empty() ? 0 : static_cast<int>(values.front().size()); }
    bool alive_to_horizon() const { return alive_until == grid.n_steps; }
};

/// Running bracket estimates [X^A, X^B]_t from summed increment products.
struct QuadraticCovariation {
    TimeGrid grid;
    std::vector<Mat> cumulative;  // n_steps + 1 symmetric matrices
};

struct Ensemble {
    std::vector<SamplePath> paths;
    uint64_t master_seed = 0;

    double truncated_fraction() const;
};

/// One Euler-Maruyama Brownian path on (M, g):
/// X_{n+1} = X_n + sigma(X_n) dW - 1/2 g^{jk} G^i_{jk} dt,  sigma sigma^T = g^{-1}.
/// Truncates at chart exit (alive_until marks the last valid index).
SamplePath simulate_bm(const ChartedManifold& man, const Point& x0, const TimeGrid& grid,
                       uint64_t master_seed, uint64_t path_index = 0);

/// Generic Euler-Maruyama path with user coefficient fields; `noise_dim`
/// columns of the diffusion matrix drive independent Brownian increments.
/// Optional wrapping/guard follow the conventions of SamplePath.
SamplePath simulate_sde(const std::function<Vec(const Point&)>& drift,
                        const std::function<Mat(const Point&)>& diffusion, int noise_dim,
                        const Point& x0, const TimeGrid& grid, uint64_t master_seed,
                        uint64_t path_index = 0,
                        const std::vector<std::optional<double>>& periodic = {},
                        const std::function<bool(const Point&)>& guard = nullptr);

QuadraticCovariation quadratic_covariation(const SamplePath& path);

using PathFactory = std::function<SamplePath(uint64_t path_index)>;

/// Simulate `n_paths` independent paths. Work is distributed with OpenMP when
/// jobs != 1; per-path RNG streams make the result bit-identical for any job
/// count. `simulate_ensemble_serial` is the plain-loop reference the tests and
/// the benchmark compare against.
Ensemble simulate_ensemble(const PathFactory& factory, int n_paths, uint64_t master_seed,
                           int jobs = 0);
Ensemble simulate_ensemble_serial(const PathFactory& factory, int n_paths, uint64_t master_seed);

/// Parallel map over an ensemble producing one scalar per path (index order
/// preserved). Serial variant kept as the reference implementation.
std::vector<double> map_paths(const Ensemble& ens,
                              const std::function<double(const SamplePath&)>& fn, int jobs = 0);
std::vector<double> map_paths_serial(const Ensemble& ens,
                                     const std::function<double(const SamplePath&)>& fn);

} // namespace vertmart
