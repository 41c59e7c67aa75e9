#include "vertmart/bundles.hpp"

#include <cmath>

#include "vertmart/corpus.hpp"
#include "vertmart/errors.hpp"

namespace vertmart {

namespace {

Mat connector_matrix(const ChristoffelField& base_gamma, const Point& p, int m) {
    const Point x = p.head(m);
    const Vec v = p.tail(m);
    const Tensor3 G = base_gamma.eval(x);
    Mat N = Mat::Zero(m, m);
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < m; ++j) {
            double s = 0.0;
            for (int b = 0; b < m; ++b) s += G(a, j, b) * v[b];
            N(a, j) = s;
        }
    return N;
}

// Frame coefficients C^c_{ab} of the lift connection in the frame
// (h_1..h_m, V_1..V_m): horizontal lifts first, vertical lifts second.
Tensor3 frame_coefficients(TangentLiftKind kind, const Tensor3& G, const Tensor3& R, const Vec& v,
                           int m) {
    Tensor3 C(2 * m, 2 * m, 2 * m);
    auto Rv = [&](int l, int mu_contracted_slot, int i, int j) {
        // v^mu R^l_{mu i j}
        double s = 0.0;
        for (int mu = 0; mu < m; ++mu) s += v[mu] * R(l, mu, i * m + j);
        (void)mu_contracted_slot;
        return s;
    };

    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            // horizontal-horizontal
            for (int kk = 0; kk < m; ++kk) C(kk, i, j) = G(kk, i, j);
            for (int a = 0; a < m; ++a) {
                if (kind == TangentLiftKind::CompleteLift) {
                    // vertical correction (R(v, d_i) d_j) lifted vertically
                    C(m + a, i, j) = Rv(a, 0, i, j);
                } else {
                    // -1/2 (R(d_i, d_j) v) lifted vertically
                    double s = 0.0;
                    for (int mu = 0; mu < m; ++mu) s += R(a, i, j * m + mu) * v[mu];
                    C(m + a, i, j) = -0.5 * s;
                }
            }
            // horizontal-vertical and vertical-horizontal
            for (int b = 0; b < m; ++b) {
                C(m + b, i, m + j) = 0.0;  // filled below per fiber output index
            }
        }

    for (int i = 0; i < m; ++i)
        for (int b = 0; b < m; ++b) {
            // nabla_{h_i} V_b = (nabla_{d_i} d_b)^v (+ Sasaki horizontal term)
            for (int a = 0; a < m; ++a) C(m + a, i, m + b) = G(a, i, b);
            if (kind == TangentLiftKind::Sasaki) {
                for (int kk = 0; kk < m; ++kk) C(kk, i, m + b) = 0.5 * Rv(kk, 0, b, i);
                // nabla_{V_b} h_i = 1/2 (R(v, d_b) d_i)^h
                for (int kk = 0; kk < m; ++kk) C(kk, m + b, i) = 0.5 * Rv(kk, 0, b, i);
            }
        }
    return C;
}

struct FrameChangeContext {
    ChristoffelField base_gamma;
    CurvatureField curvature;
    TangentLiftKind kind;
    int m;
    double h = 1e-5;
};

// Coordinate symbols from the frame rules:
// G^C_{AB} = F^C_b d_A(S^b_B) + F^C_c C^c_{ab} S^a_A S^b_B, symmetrized.
Tensor3 tm_ambient_christoffels(const FrameChangeContext& ctx, const Point& p) {
    const int m = ctx.m;
    const int n = 2 * m;
    const Point x = p.head(m);
    const Vec v = p.tail(m);

    const Mat N = connector_matrix(ctx.base_gamma, p, m);
    Mat F = Mat::Identity(n, n);
    F.block(m, 0, m, m) = -N;
    Mat S = Mat::Identity(n, n);
    S.block(m, 0, m, m) = N;

    // d_A S: only the connector block varies. Base directions differentiate
    // the base symbols; fiber directions recover them directly.
    const Tensor3 G = ctx.base_gamma.eval(x);
    std::vector<Mat> dS(n, Mat::Zero(n, n));
    for (int j = 0; j < m; ++j) {
        Point xp = x, xm = x;
        xp[j] += ctx.h;
        xm[j] -= ctx.h;
        const Tensor3 Gp = ctx.base_gamma.eval(xp);
        const Tensor3 Gm = ctx.base_gamma.eval(xm);
        Mat dN = Mat::Zero(m, m);
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < m; ++i) {
                double s = 0.0;
                for (int b = 0; b < m; ++b) s += (Gp(a, i, b) - Gm(a, i, b)) / (2.0 * ctx.h) * v[b];
                dN(a, i) = s;
            }
        dS[j].block(m, 0, m, m) = dN;
    }
    for (int c = 0; c < m; ++c) {
        Mat dN = Mat::Zero(m, m);
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < m; ++i) dN(a, i) = G(a, i, c);
        dS[m + c].block(m, 0, m, m) = dN;
    }

    const Tensor3 C = frame_coefficients(ctx.kind, G, ctx.curvature.eval(x), v, m);

    Tensor3 out(n, n, n);
    for (int A = 0; A < n; ++A)
        for (int B = 0; B < n; ++B) {
            Vec col = Vec::Zero(n);
            // derivative term
            col += F * dS[A].col(B);
            // frame-coefficient term
            Vec cf = Vec::Zero(n);
            for (int c = 0; c < n; ++c) {
                double s = 0.0;
                for (int a = 0; a < n; ++a)
                    for (int b = 0; b < n; ++b) s += C(c, a, b) * S(a, A) * S(b, B);
                cf[c] = s;
            }
            col += F * cf;
            for (int Cc = 0; Cc < n; ++Cc) out(Cc, A, B) = col[Cc];
        }

    // the lift rules define a torsion-free connection; the antisymmetric part
    // is finite-difference noise
    Tensor3 sym(n, n, n);
    for (int Cc = 0; Cc < n; ++Cc)
        for (int A = 0; A < n; ++A)
            for (int B = 0; B < n; ++B) sym(Cc, A, B) = 0.5 * (out(Cc, A, B) + out(Cc, B, A));
    return sym;
}

} // namespace

Mat TangentBundleGeometry::connector(const Point& p) const {
    return connector_matrix(base.christoffels, p, base.dim);
}

TangentBundleGeometry tangent_bundle(const ChartedManifold& base, TangentLiftKind kind,
                                     std::optional<CurvatureField> curvature) {
    TangentBundleGeometry tb;
    tb.base = base;
    tb.kind = kind;
    tb.curvature = curvature ? *curvature : curvature_from_christoffels(base.christoffels);
    const int m = base.dim;

    FrameChangeContext ctx{base.christoffels, tb.curvature, kind, m};

    tb.sub.base = base;
    tb.sub.fiber_dim = m;
    tb.sub.ambient.dim = 2 * m;
    tb.sub.ambient.eval = [ctx](const Point& p) { return tm_ambient_christoffels(ctx, p); };

    const ChristoffelField base_gamma = base.christoffels;
    tb.sub.vertical_projector = [base_gamma, m](const Point& p) {
        Mat P = Mat::Zero(2 * m, 2 * m);
        P.block(m, 0, m, m) = connector_matrix(base_gamma, p, m);
        P.block(m, m, m, m) = Mat::Identity(m, m);
        return P;
    };

    tb.sub.total_periodic = base.periodic;
    tb.sub.total_periodic.resize(2 * m, std::nullopt);
    if (base.guard) {
        auto base_guard = base.guard;
        tb.sub.total_guard = [base_guard, m](const Point& p) { return base_guard(p.head(m)); };
    }

    // Sasaki metric blocks from the horizontal/vertical orthogonal splitting.
    const MetricField base_metric = base.metric;
    MetricField total;
    total.dim = 2 * m;
    total.eval = [base_metric, base_gamma, m](const Point& p) {
        const Mat g = base_metric.eval(p.head(m));
        const Mat N = connector_matrix(base_gamma, p, m);
        Mat G(2 * m, 2 * m);
        G.topLeftCorner(m, m) = g + N.transpose() * g * N;
        G.topRightCorner(m, m) = N.transpose() * g;
        G.bottomLeftCorner(m, m) = g * N;
        G.bottomRightCorner(m, m) = g;
        return G;
    };
    total.inv_eval = [base_metric, base_gamma, m](const Point& p) {
        const Mat gi = base_metric.inv_eval(p.head(m));
        const Mat N = connector_matrix(base_gamma, p, m);
        Mat G(2 * m, 2 * m);
        G.topLeftCorner(m, m) = gi;
        G.topRightCorner(m, m) = -gi * N.transpose();
        G.bottomLeftCorner(m, m) = -N * gi;
        G.bottomRightCorner(m, m) = gi + N * gi * N.transpose();
        return G;
    };
    tb.sub.total_metric = total;
    return tb;
}

TangentBundleGeometry complete_lift_bundle(const ChartedManifold& base,
                                           std::optional<CurvatureField> curvature) {
    return tangent_bundle(base, TangentLiftKind::CompleteLift, curvature);
}

TangentBundleGeometry sasaki_bundle(const ChartedManifold& base,
                                    std::optional<CurvatureField> curvature) {
    return tangent_bundle(base, TangentLiftKind::Sasaki, curvature);
}

SmoothMapJet SectionOfTM::to_map_jet() const {
    SmoothMapJet jet;
    const int m = dim;
    jet.domain_dim = m;
    jet.target_dim = 2 * m;
    auto V = value;
    auto dV = jacobian;
    auto d2V = hessian;
    jet.value = [V, m](const Point& y) {
        Vec p(2 * m);
        p.head(m) = y;
        p.tail(m) = V(y);
        return p;
    };
    jet.jacobian = [dV, m](const Point& y) {
        Mat J(2 * m, m);
        J.topRows(m) = Mat::Identity(m, m);
        J.bottomRows(m) = dV(y);
        return J;
    };
    jet.hessian = [d2V, m](const Point& y) {
        Tensor3 H(2 * m, m, m);
        const Tensor3 h = d2V(y);
        for (int a = 0; a < m; ++a)
            for (int i = 0; i < m; ++i)
                for (int j = 0; j < m; ++j) H(m + a, i, j) = h(a, i, j);
        return H;
    };
    return jet;
}

SectionOfTM SectionOfTM::from_field(std::string name, int dim,
                                    std::function<Vec(const Point&)> field, double h) {
    const SmoothMapJet jet = SmoothMapJet::from_value(dim, dim, field, h);
    SectionOfTM s;
    s.name = std::move(name);
    s.dim = dim;
    s.value = field;
    s.jacobian = jet.jacobian;
    s.hessian = jet.hessian;
    return s;
}

Mat section_covariant_derivative(const TangentBundleGeometry& tb, const SectionOfTM& section,
                                 const Point& y) {
    const int m = tb.base.dim;
    const Mat dV = section.jacobian(y);
    const Vec V = section.value(y);
    const Tensor3 G = tb.base.christoffels.eval(y);
    Mat out = dV;
    for (int a = 0; a < m; ++a)
        for (int j = 0; j < m; ++j)
            for (int b = 0; b < m; ++b) out(a, j) += G(a, j, b) * V[b];
    return out;
}

VerticalForm canonical_vertical_form(const TangentBundleGeometry& tb, const Vec& coeffs) {
    VerticalForm f;
    f.fiber_dim = tb.sub.fiber_dim;
    const Vec c = coeffs;
    f.eval = [c](const Point&) { return c; };
    return f;
}

Vec canonical_full_covector(const AdaptedSubmersion& sub, const Vec& coeffs, const Point& p) {
    Vec ext = Vec::Zero(sub.total_dim());
    ext.tail(sub.fiber_dim) = coeffs;
    return sub.vertical_projector(p).transpose() * ext;
}

namespace {

SamplePath base_part(const SamplePath& path, int m) {
    SamplePath out;
    out.grid = path.grid;
    out.alive_until = path.alive_until;
    out.values.reserve(path.values.size());
    out.increments.reserve(path.increments.size());
    for (const auto& v : path.values) out.values.push_back(v.head(m));
    for (int n = 0; n < path.alive_until; ++n) out.increments.push_back(path.increments[n].head(m));
    return out;
}

MartingaleReport worst_report(const std::vector<MartingaleReport>& rs) {
    MartingaleReport worst = rs.front();
    for (const auto& r : rs)
        if (r.max_abs_z() > worst.max_abs_z()) worst = r;
    bool all_pass = true;
    for (const auto& r : rs) all_pass = all_pass && r.pass;
    worst.pass = all_pass;
    return worst;
}

} // namespace

TmCriterionReport tm_vertical_martingale_criterion(const TangentBundleGeometry& tb,
                                                   const std::vector<SamplePath>& ensemble,
                                                   double z_crit, int partitions) {
    const int m = tb.base.dim;
    const AdaptedSubmersion& sub = tb.sub;
    TmCriterionReport report;

    // classical connection-martingale test on J = pi(X)
    {
        std::vector<std::vector<RealPath>> per_index(m);
        for (const auto& path : ensemble) {
            auto parts = connection_drift_part(base_part(path, m), tb.base.christoffels);
            for (int c = 0; c < m; ++c) per_index[c].push_back(std::move(parts[c]));
        }
        bool all = true;
        for (int c = 0; c < m; ++c) all = all && martingale_test(per_index[c], z_crit, partitions).pass;
        report.base_is_martingale = all;
    }

    for (int mu = 0; mu < sub.fiber_dim; ++mu) {
        Vec coeffs = Vec::Zero(sub.fiber_dim);
        coeffs[mu] = 1.0;
        const VerticalForm theta = canonical_vertical_form(tb, coeffs);

        std::vector<RealPath> combo;
        std::vector<RealPath> defect;
        combo.reserve(ensemble.size());
        defect.reserve(ensemble.size());
        for (const auto& path : ensemble) {
            const RealPath strat =
                vertical_stratonovich_integral(theta, sub, path, StratonovichRule::LeftPointBrackets);

            RealPath lift_term;  // int theta (delta J)^v
            RealPath ito_term;   // int theta^{v*} d^M J
            lift_term.grid = ito_term.grid = path.grid;
            lift_term.alive_until = ito_term.alive_until = path.alive_until;
            lift_term.values.push_back(0.0);
            ito_term.values.push_back(0.0);
            double acc_lift = 0.0, acc_ito = 0.0;
            for (int n = 0; n < path.alive_until; ++n) {
                const Point& p = path.values[n];
                const Vec th = theta.eval(p);
                const Vec dj = path.increments[n].head(m);
                // theta has constant coefficients, so the Stratonovich bracket
                // correction of the lift pairing vanishes identically
                acc_lift += th.dot(dj);
                const Tensor3 G = tb.base.christoffels.eval(p.head(m));
                double step = th.dot(dj);
                for (int c = 0; c < m; ++c) {
                    double quad = 0.0;
                    for (int i = 0; i < m; ++i)
                        for (int j = 0; j < m; ++j) quad += G(c, i, j) * dj[i] * dj[j];
                    step += 0.5 * th[c] * quad;
                }
                acc_ito += step;
                lift_term.values.push_back(acc_lift);
                ito_term.values.push_back(acc_ito);
            }

            RealPath c;
            c.grid = path.grid;
            c.alive_until = path.alive_until;
            c.values.resize(strat.values.size());
            RealPath d = c;
            for (size_t i = 0; i < c.values.size(); ++i) {
                c.values[i] = strat.values[i] - lift_term.values[i] + ito_term.values[i];
                d.values[i] = strat.values[i] - lift_term.values[i];
            }
            combo.push_back(std::move(c));
            defect.push_back(std::move(d));
        }
        report.combination.push_back(martingale_test(combo, z_crit, partitions));
        if (report.base_is_martingale)
            report.strat_defect.push_back(martingale_test(defect, z_crit, partitions));
    }
    report.truncated_fraction = report.combination.front().truncated_fraction;
    return report;
}

ProductPrincipalBundle product_principal_bundle(const ChartedManifold& base,
                                                const ChartedManifold& group) {
    ProductPrincipalBundle pb;
    pb.base = base;
    pb.group = group;
    const int m = base.dim;
    const int k = group.dim;
    const int n = m + k;

    pb.sub.base = base;
    pb.sub.fiber_dim = k;

    const ChristoffelField bg = base.christoffels;
    const ChristoffelField gg = group.christoffels;
    pb.sub.ambient.dim = n;
    pb.sub.ambient.eval = [bg, gg, m, k, n](const Point& p) {
        const Tensor3 gb = bg.eval(p.head(m));
        const Tensor3 ggr = gg.eval(p.tail(k));
        Tensor3 out(n, n, n);
        for (int c = 0; c < m; ++c)
            for (int a = 0; a < m; ++a)
                for (int b = 0; b < m; ++b) out(c, a, b) = gb(c, a, b);
        for (int c = 0; c < k; ++c)
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) out(m + c, m + a, m + b) = ggr(c, a, b);
        return out;
    };
    pb.sub.vertical_projector = [m, k, n](const Point&) {
        Mat P = Mat::Zero(n, n);
        P.block(m, m, k, k) = Mat::Identity(k, k);
        return P;
    };

    pb.sub.total_periodic = base.periodic;
    for (const auto& per : group.periodic) pb.sub.total_periodic.push_back(per);
    if (base.guard || group.guard) {
        auto bguard = base.guard;
        auto gguard = group.guard;
        pb.sub.total_guard = [bguard, gguard, m, k](const Point& p) {
            if (bguard && !bguard(p.head(m))) return false;
            if (gguard && !gguard(p.tail(k))) return false;
            return true;
        };
    }

    const MetricField bm = base.metric;
    const MetricField gm = group.metric;
    MetricField total;
    total.dim = n;
    total.eval = [bm, gm, m, k, n](const Point& p) {
        Mat G = Mat::Zero(n, n);
        G.topLeftCorner(m, m) = bm.eval(p.head(m));
        G.bottomRightCorner(k, k) = gm.eval(p.tail(k));
        return G;
    };
    total.inv_eval = [bm, gm, m, k, n](const Point& p) {
        Mat G = Mat::Zero(n, n);
        G.topLeftCorner(m, m) = bm.inv_eval(p.head(m));
        G.bottomRightCorner(k, k) = gm.inv_eval(p.tail(k));
        return G;
    };
    pb.sub.total_metric = total;
    return pb;
}

PrincipalSplitReport principal_split_test(const ProductPrincipalBundle& pb,
                                          const std::vector<SamplePath>& ensemble, double z_crit,
                                          int partitions) {
    const int m = pb.base.dim;
    const int k = pb.group.dim;

    std::vector<std::vector<RealPath>> vertical(k), group(k);
    for (const auto& path : ensemble) {
        auto vparts = drift_part(path, pb.sub);
        for (int a = 0; a < k; ++a) vertical[a].push_back(std::move(vparts[a]));

        SamplePath vpath;
        vpath.grid = path.grid;
        vpath.alive_until = path.alive_until;
        for (const auto& v : path.values) vpath.values.push_back(v.tail(k));
        for (int n = 0; n < path.alive_until; ++n)
            vpath.increments.push_back(path.increments[n].tail(k));
        auto gparts = connection_drift_part(vpath, pb.group.christoffels);
        for (int a = 0; a < k; ++a) group[a].push_back(std::move(gparts[a]));
    }

    std::vector<MartingaleReport> vr, gr;
    for (int a = 0; a < k; ++a) {
        vr.push_back(martingale_test(vertical[a], z_crit, partitions));
        gr.push_back(martingale_test(group[a], z_crit, partitions));
    }
    PrincipalSplitReport report;
    report.vertical = worst_report(vr);
    report.group = worst_report(gr);
    report.vertical_pass = report.vertical.pass;
    report.group_pass = report.group.pass;
    report.agree = report.vertical_pass == report.group_pass;
    return report;
}

TangentBundleGeometry tangent_bundle_by_name(const std::string& name) {
    if (name == "flat-torus-tm-complete") return complete_lift_bundle(flat_torus());
    if (name == "flat-torus-tm-sasaki") return sasaki_bundle(flat_torus());
    if (name == "sphere-tm-complete") return complete_lift_bundle(sphere_chart(), sphere_curvature());
    if (name == "sphere-tm-sasaki") return sasaki_bundle(sphere_chart(), sphere_curvature());
    throw ConfigError("unknown tangent bundle: " + name);
}

ProductPrincipalBundle principal_bundle_by_name(const std::string& name) {
    if (name == "torus-x-circle") return product_principal_bundle(flat_torus(), circle());
    throw ConfigError("unknown principal bundle: " + name);
}

bool is_principal_bundle_name(const std::string& name) { return name == "torus-x-circle"; }

SectionOfTM section_by_name(const std::string& name, const ChartedManifold& base) {
    const int m = base.dim;
    if (name == "zero")
        return SectionOfTM::from_field("zero", m, [m](const Point&) { return Vec::Zero(m); });
    if (name == "constant-field")
        return SectionOfTM::from_field("constant-field", m, [m](const Point&) {
            Vec v(m);
            for (int a = 0; a < m; ++a) v[a] = (a == 0) ? 0.7 : -0.3;
            return v;
        });
    if (name == "sin-field") {
        SectionOfTM s;
        s.name = name;
        s.dim = m;
        s.value = [m](const Point& y) {
            Vec v = Vec::Zero(m);
            v[0] = std::sin(y[0]);
            return v;
        };
        s.jacobian = [m](const Point& y) {
            Mat J = Mat::Zero(m, m);
            J(0, 0) = std::cos(y[0]);
            return J;
        };
        s.hessian = [m](const Point& y) {
            Tensor3 H(m, m, m);
            H(0, 0, 0) = -std::sin(y[0]);
            return H;
        };
        return s;
    }
    if (name == "cos-field")
        return SectionOfTM::from_field("cos-field", m, [m](const Point& y) {
            Vec v = Vec::Zero(m);
            v[0] = std::cos(y[0]);
            return v;
        });
    if (name == "phi-sin-field")
        return SectionOfTM::from_field("phi-sin-field", m, [m](const Point& y) {
            Vec v = Vec::Zero(m);
            v[m - 1] = std::sin(y[0]);
            return v;
        });
    throw ConfigError("unknown section: " + name);
}

std::vector<std::string> bundle_names() {
    return {"flat-torus-tm-complete", "flat-torus-tm-sasaki", "sphere-tm-complete",
            "sphere-tm-sasaki", "torus-x-circle"};
}

std::vector<std::string> section_names() {
    return {"zero", "constant-field", "sin-field", "cos-field", "phi-sin-field"};
}

} // namespace vertmart
