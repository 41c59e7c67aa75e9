#pragma once

#include "vertmart/integrals.hpp"
#include "vertmart/martingale.hpp"

namespace vertmart {

/// Two-jet presentation of a smooth map N -> E in charts: value, Jacobian
/// (target x domain) and Hessian (target, domain, domain), closed form or
/// finite differences. Sections of a submersion carry the identity base block.
struct SmoothMapJet {
    int domain_dim = 0;
    int target_dim = 0;
    std::function<Vec(const Point&)> value;
    std::function<Mat(const Point&)> jacobian;
    std::function<Tensor3(const Point&)> hessian;

    MapJet at(const Point& y) const { return {value(y), jacobian(y), hessian(y)}; }

    /// Jacobian/Hessian filled in by central differences of `value`.
    static SmoothMapJet from_value(int domain_dim, int target_dim,
                                   std::function<Vec(const Point&)> value, double h = 1e-5);
};

/// Vertical second fundamental form at y, indexed (fiber, domain, domain) and
/// symmetric in the domain pair. Computed by evaluating
/// a^v = Gv . (vertical projection of phi_*) - (vertical projection of phi_*) . G^N
/// on the quadratic basis vectors, so the result cannot drift from the
/// operator definition; the expanded coordinate formula is kept in the tests
/// as a cross-check.
Tensor3 vertical_sff(const SmoothMapJet& phi, const AdaptedSubmersion& sub,
                     const ChristoffelField& conn_domain, const Point& y);

/// Tension field tau^a(y) = g_N^{ij}(y) beta^a_{ij}(y).
Vec tension_field(const SmoothMapJet& phi, const AdaptedSubmersion& sub,
                  const ChristoffelField& conn_domain, const MetricField& metric_domain,
                  const Point& y);

struct HarmonicSectionReport {
    bool harmonic = false;
    double max_tension = 0.0;
};

/// Max tension norm over sampled base points; requires pi . sigma = id.
HarmonicSectionReport is_harmonic_section(const SmoothMapJet& sigma, const AdaptedSubmersion& sub,
                                          const ChristoffelField& conn_base,
                                          const MetricField& metric_base,
                                          const std::function<Point(int)>& sample_point,
                                          int samples, double tol = 1e-6);

/// Push a path through a map, keeping increments consistent across periodic
/// seams of the source chart (base increments are reused raw; fiber
/// increments come from consecutive mapped values).
SamplePath map_path(const SmoothMapJet& phi, const SamplePath& path);

/// Residual of the geometric Ito identity along one path:
/// int theta d^v phi(X) - int phi^* theta d^N X - 1/2 int beta^* theta (dX, dX).
RealPath geometric_ito_residual(const SmoothMapJet& phi, const VerticalForm& theta,
                                const AdaptedSubmersion& sub, const ChristoffelField& conn_domain,
                                const SamplePath& path);

/// Residual of the Stratonovich transfer identity:
/// int theta delta^v phi(X) - int (phi^* theta) delta X,
/// left-point sums on the mapped path against a midpoint evaluation of the
/// pullback form (the independent discretizations make the gap an O(dt)
/// quantity instead of an algebraic zero).
RealPath stratonovich_transfer_residual(const SmoothMapJet& phi, const VerticalForm& theta,
                                        const AdaptedSubmersion& sub, const SamplePath& path);

struct HarmonicityTestResult {
    std::vector<MartingaleReport> reports;  // one per fiber index
    Vec measured_drift;                     // mean terminal drift part per index
    Vec measured_se;
    Vec predicted_drift;                    // 1/2 ensemble mean of int tau ds
    Vec predicted_se;

    bool pass() const {
        for (const auto& r : reports)
            if (!r.pass) return false;
        return true;
    }
};

/// Simulate a base Brownian ensemble, push it through the section and test
/// the drift parts of the image for the martingale property. Also reports the
/// deterministic prediction of the drift from the tension field.
HarmonicityTestResult stochastic_harmonicity_test(const SmoothMapJet& sigma,
                                                  const AdaptedSubmersion& sub,
                                                  const ChartedManifold& base, const Point& x0,
                                                  const TimeGrid& grid, int n_paths,
                                                  uint64_t master_seed, double z_crit = 3.0,
                                                  int partitions = 4, int jobs = 0);

} // namespace vertmart
