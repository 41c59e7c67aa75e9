#pragma once

#include "vertmart/paths.hpp"
#include "vertmart/submersion.hpp"

namespace vertmart {

/// Second-order form Theta = Theta_A d2x^A + Theta_AB dx^A . dx^B with a
/// symmetric quadratic block.
struct SecondOrderForm {
    int dim = 0;
    std::function<Vec(const Point&)> first;   // Theta_A
    std::function<Mat(const Point&)> second;  // Theta_AB, symmetric
};

/// Bilinear coefficient field b_AB(x); symmetry is not required (only the
/// symmetric part survives against brackets).
struct QuadraticForm {
    int dim = 0;
    std::function<Mat(const Point&)> eval;
};

/// Scalar process produced by an integral along one path; adapted and
/// truncated together with the source path.
struct RealPath {
    TimeGrid grid;
    std::vector<double> values;  // alive_until + 1 entries, values[0] = 0
    int alive_until = 0;

    double terminal() const { return values.empty() ? 0.0 : values.back(); }
    bool alive_to_horizon() const { return alive_until == grid.n_steps; }
};

/// Riemann-Ito sums with left-point coefficients:
/// sum Theta_A(X_n) dX^A + sum Theta_AB(X_n) dX^A dX^B.
RealPath integrate_second_order(const SecondOrderForm& theta, const SamplePath& path);

/// Quadratic integral sum b_AB(X_n) dX^A dX^B.
RealPath integrate_quadratic(const QuadraticForm& b, const SamplePath& path);

/// Connection Ito integral of a 1-form:
/// sum theta_C(X_n) (dX^C + 1/2 G^C_{AB}(X_n) dX^A dX^B).
RealPath ito_integral(const std::function<Vec(const Point&)>& theta,
                      const ChristoffelField& connection, const SamplePath& path);

/// Per-step vertical Ito increments, one entry per fiber index:
/// dX^a + 1/2 Gv^a_{bc} dX^b dX^c + Gv^a_{bj} dX^b dX^j
/// (fiber pair summed over both orders; mixed pair counted once at full
/// weight, i.e. the symmetric contraction of the extended symbols).
Vec vertical_ito_increment(const VerticalChristoffels& gv, int base_dim, const Vec& increment);

/// Vertical Ito integral of a vertical form along a path in the adapted chart.
RealPath vertical_ito_integral(const VerticalForm& theta, const AdaptedSubmersion& sub,
                               const SamplePath& path);

enum class StratonovichRule {
    LeftPointBrackets,  // explicit bracket corrections, left-point coefficients
    Midpoint,           // coefficients at X_n + dX/2, no explicit brackets
};

/// Vertical Stratonovich integral. The default follows the local formula
/// sum theta_a dX^a + 1/2 sum D_B theta_a dX^B dX^a with coefficient
/// derivatives by central differences (h = 1e-5) or a user-supplied closed
/// form. The midpoint rule is the independent discretization of the same
/// limit, used by the conversion residual study.
RealPath vertical_stratonovich_integral(const VerticalForm& theta, const AdaptedSubmersion& sub,
                                        const SamplePath& path,
                                        StratonovichRule rule = StratonovichRule::LeftPointBrackets,
                                        const std::function<Mat(const Point&)>& theta_jacobian = nullptr);

/// Running correction 1/2 int S(dX, dX) with
/// S_AB = D_A theta_B - theta_c Gv~^c_{AB}, where theta is extended by zero on
/// base covector slots and Gv~ is the symmetric extension of the vertical
/// symbols (base-base block zero). This is the exact discrete gap between the
/// left-point Stratonovich and Ito sums.
RealPath vertical_covariant_correction(const VerticalForm& theta, const AdaptedSubmersion& sub,
                                       const SamplePath& path,
                                       const std::function<Mat(const Point&)>& theta_jacobian = nullptr);

/// Stratonovich-minus-Ito conversion residual:
/// midpoint Stratonovich - (Ito + covariant correction). Vanishes with dt.
RealPath conversion_residual(const VerticalForm& theta, const AdaptedSubmersion& sub,
                             const SamplePath& path,
                             const std::function<Mat(const Point&)>& theta_jacobian = nullptr);

/// D_A theta_b by central differences of the coefficient field (rows: fiber
/// index, columns: chart direction).
Mat vertical_form_jacobian_fd(const VerticalForm& theta, const Point& p, double h = 1e-5);

} // namespace vertmart
