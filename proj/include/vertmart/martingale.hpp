#pragma once

#include <string>
#include <vector>

#include "vertmart/integrals.hpp"

namespace vertmart {

/// Outcome of the statistical martingale test on an ensemble of scalar
/// processes: terminal mean, standard error, z = mean/se, per-interval
/// z-scores over a dyadic partition, and the pass verdict (all |z| <= z_crit).
struct MartingaleReport {
    double estimate = 0.0;
    double std_error = 0.0;
    double z_score = 0.0;
    std::vector<double> interval_z;  // one per dyadic subinterval
    bool pass = false;
    double truncated_fraction = 0.0;
    bool low_confidence = false;  // truncation above the 20% reporting limit
    size_t usable_paths = 0;

    double max_abs_z() const;
};

/// Candidate local-martingale parts of a path on E, one per fiber index:
/// M^a_t = X^a_t - X^a_0 + 1/2 int Gv~^a_{BC} d[X^B, X^C]
/// (symmetric contraction of the extended vertical symbols). Coincides with
/// the vertical Ito integral of the coordinate form dv^a by construction.
std::vector<RealPath> drift_part(const SamplePath& path, const AdaptedSubmersion& sub);

/// Classical chart version for a manifold with symmetric connection:
/// M^c_t = X^c_t - X^c_0 + 1/2 int G^c_{AB} d[X^A, X^B].
std::vector<RealPath> connection_drift_part(const SamplePath& path,
                                            const ChristoffelField& connection);

/// z-statistics over terminal values and dyadic-interval increments of the
/// candidate martingales. Paths not alive to the horizon are dropped; the
/// dropped fraction is reported and past 20% flags low confidence. Requires
/// at least `min_paths` usable paths.
MartingaleReport martingale_test(const std::vector<RealPath>& ensemble, double z_crit = 3.0,
                                 int partitions = 4, size_t min_paths = 100);

/// Residual of the Brownian trace identity along one path:
/// int b(dX, dX) - int g^{AB} b_AB (X_s) ds. Near zero for a genuine g-BM.
RealPath brownian_check(const SamplePath& path, const ChartedManifold& man,
                        const QuadraticForm& b);

} // namespace vertmart
