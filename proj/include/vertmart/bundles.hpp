#pragma once

#include <string>
#include <vector>

#include "vertmart/maps.hpp"

namespace vertmart {

enum class TangentLiftKind { CompleteLift, Sasaki };

/// Tangent bundle TM in the induced chart (x^1..x^m, v^1..v^m) with the
/// connection realized numerically from the lift-frame rules (complete lift
/// or the Levi-Civita connection of the Sasaki metric) by changing frames,
/// rather than transcribing literature coordinate tables. The vertical
/// projector is the connection-horizontal complement; the total metric is the
/// Sasaki metric for either connection choice (it serves as the path source).
struct TangentBundleGeometry {
    ChartedManifold base;
    CurvatureField curvature;
    TangentLiftKind kind = TangentLiftKind::CompleteLift;
    AdaptedSubmersion sub;

    /// N^a_j(p) = G^a_{jb}(x) v^b, the connector block of the horizontal
    /// splitting (fiber x base).
    Mat connector(const Point& p) const;
};

TangentBundleGeometry tangent_bundle(const ChartedManifold& base, TangentLiftKind kind,
                                     std::optional<CurvatureField> curvature = std::nullopt);
TangentBundleGeometry complete_lift_bundle(const ChartedManifold& base,
                                           std::optional<CurvatureField> curvature = std::nullopt);
TangentBundleGeometry sasaki_bundle(const ChartedManifold& base,
                                    std::optional<CurvatureField> curvature = std::nullopt);

/// Vector field on the base presented with enough jets to act as a section
/// y -> (y, V(y)) of the tangent bundle.
struct SectionOfTM {
    std::string name;
    int dim = 0;
    std::function<Vec(const Point&)> value;
    std::function<Mat(const Point&)> jacobian;    // dV, m x m
    std::function<Tensor3(const Point&)> hessian; // (m, m, m)

    SmoothMapJet to_map_jet() const;

    static SectionOfTM from_field(std::string name, int dim,
                                  std::function<Vec(const Point&)> field, double h = 1e-5);
};

/// Covariant derivative matrix (nabla_j V)^a = d_j V^a + G^a_{jb} V^b at y.
/// Realizes the vertical projection of the section pushforward in the
/// connection-horizontal splitting.
Mat section_covariant_derivative(const TangentBundleGeometry& tb, const SectionOfTM& section,
                                 const Point& y);

/// Chart coefficients of the intrinsically vertical covector with the given
/// vertical-lift pairings: the dv-block is the constant coefficient vector,
/// while the dx-block (annihilating the horizontal subspace) is recovered
/// from the projector as P_v^T applied to the fiber extension.
VerticalForm canonical_vertical_form(const TangentBundleGeometry& tb, const Vec& coeffs);
Vec canonical_full_covector(const AdaptedSubmersion& sub, const Vec& coeffs, const Point& p);

struct TmCriterionReport {
    std::vector<MartingaleReport> combination;   // per canonical basis form
    bool base_is_martingale = false;
    std::vector<MartingaleReport> strat_defect;  // drift of delta^v X - (delta J)^v per form
    double truncated_fraction = 0.0;

    bool pass() const {
        for (const auto& r : combination)
            if (!r.pass) return false;
        return true;
    }
};

/// Vertical-martingale criterion on TM: for each canonical basis form, test
/// int theta delta^v X - int theta (delta J)^v + int theta^{v*} d^M J
/// for the martingale property. When the projected path J passes the
/// classical connection-martingale test, additionally reports the drift
/// statistics of the Stratonovich difference delta^v X - (delta J)^v.
TmCriterionReport tm_vertical_martingale_criterion(const TangentBundleGeometry& tb,
                                                   const std::vector<SamplePath>& ensemble,
                                                   double z_crit = 3.0, int partitions = 4);

/// Product principal bundle M x G with the block-diagonal metric and
/// connection; fibers are totally geodesic and the vertical symbols coincide
/// with the group symbols.
struct ProductPrincipalBundle {
    ChartedManifold base;
    ChartedManifold group;
    AdaptedSubmersion sub;
};

ProductPrincipalBundle product_principal_bundle(const ChartedManifold& base,
                                                const ChartedManifold& group);

struct PrincipalSplitReport {
    MartingaleReport vertical;  // worst-z verdict across fiber indices
    MartingaleReport group;     // worst-z verdict across group indices
    bool vertical_pass = false;
    bool group_pass = false;
    bool agree = false;
};

/// Coordinatewise split of paths on M x G: the vertical-martingale test on X
/// against the group-martingale test on the G-component. The two verdicts
/// must agree.
PrincipalSplitReport principal_split_test(const ProductPrincipalBundle& pb,
                                          const std::vector<SamplePath>& ensemble,
                                          double z_crit = 3.0, int partitions = 4);

// Corpus registry used by the CLI and the acceptance suite.
TangentBundleGeometry tangent_bundle_by_name(const std::string& name);
ProductPrincipalBundle principal_bundle_by_name(const std::string& name);
bool is_principal_bundle_name(const std::string& name);
SectionOfTM section_by_name(const std::string& name, const ChartedManifold& base);
std::vector<std::string> bundle_names();
std::vector<std::string> section_names();

} // namespace vertmart
