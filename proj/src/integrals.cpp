#include "vertmart/integrals.hpp"

namespace vertmart {

namespace {

RealPath make_real_path(const SamplePath& path) {
    RealPath r;
    r.grid = path.grid;
    r.alive_until = path.alive_until;
    r.values.reserve(path.alive_until + 1);
    r.values.push_back(0.0);
    return r;
}

} // namespace

RealPath integrate_second_order(const SecondOrderForm& theta, const SamplePath& path) {
    RealPath r = make_real_path(path);
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Point& x = path.values[n];
        const Vec& d = path.increments[n];
        acc += theta.first(x).dot(d);
        acc += d.dot(theta.second(x) * d);
        r.values.push_back(acc);
    }
    return r;
}

RealPath integrate_quadratic(const QuadraticForm& b, const SamplePath& path) {
    RealPath r = make_real_path(path);
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Vec& d = path.increments[n];
        acc += d.dot(b.eval(path.values[n]) * d);
        r.values.push_back(acc);
    }
    return r;
}

RealPath ito_integral(const std::function<Vec(const Point&)>& theta,
                      const ChristoffelField& connection, const SamplePath& path) {
    RealPath r = make_real_path(path);
    const int n_dim = path.dim();
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Point& x = path.values[n];
        const Vec& d = path.increments[n];
        const Vec th = theta(x);
        const Tensor3 G = connection.eval(x);
        double step = th.dot(d);
        for (int c = 0; c < n_dim; ++c) {
            double quad = 0.0;
            for (int a = 0; a < n_dim; ++a)
                for (int b = 0; b < n_dim; ++b) quad += G(c, a, b) * d[a] * d[b];
            step += 0.5 * th[c] * quad;
        }
        acc += step;
        r.values.push_back(acc);
    }
    return r;
}

Vec vertical_ito_increment(const VerticalChristoffels& gv, int base_dim, const Vec& increment) {
    const int k = gv.fiber_fiber.dim0();
    const int m = base_dim;
    Vec out(k);
    for (int a = 0; a < k; ++a) {
        double s = increment[m + a];
        for (int b = 0; b < k; ++b) {
            double fib = 0.0;
            for (int c = 0; c < k; ++c) fib += gv.fiber_fiber(a, b, c) * increment[m + c];
            s += 0.5 * fib * increment[m + b];
            double mix = 0.0;
            for (int j = 0; j < m; ++j) mix += gv.fiber_base(a, b, j) * increment[j];
            s += mix * increment[m + b];
        }
        out[a] = s;
    }
    return out;
}

RealPath vertical_ito_integral(const VerticalForm& theta, const AdaptedSubmersion& sub,
                               const SamplePath& path) {
    RealPath r = make_real_path(path);
    const int m = sub.base_dim();
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Point& x = path.values[n];
        const VerticalChristoffels gv = vertical_christoffels(sub, x);
        const Vec inc = vertical_ito_increment(gv, m, path.increments[n]);
        acc += theta.eval(x).dot(inc);
        r.values.push_back(acc);
    }
    return r;
}

Mat vertical_form_jacobian_fd(const VerticalForm& theta, const Point& p, double h) {
    const int n = static_cast<int>(p.size());
    const int k = theta.fiber_dim;
    Mat J(k, n);
    for (int A = 0; A < n; ++A) {
        Point pp = p, pm = p;
        pp[A] += h;
        pm[A] -= h;
        J.col(A) = (theta.eval(pp) - theta.eval(pm)) / (2.0 * h);
    }
    return J;
}

RealPath vertical_stratonovich_integral(const VerticalForm& theta, const AdaptedSubmersion& sub,
                                        const SamplePath& path, StratonovichRule rule,
                                        const std::function<Mat(const Point&)>& theta_jacobian) {
    RealPath r = make_real_path(path);
    const int m = sub.base_dim();
    const int k = sub.fiber_dim;
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Point& x = path.values[n];
        const Vec& d = path.increments[n];
        if (rule == StratonovichRule::Midpoint) {
            // midpoint built from the raw increment so periodic seams are safe
            const Vec th = theta.eval(x + 0.5 * d);
            for (int a = 0; a < k; ++a) acc += th[a] * d[m + a];
        } else {
            const Vec th = theta.eval(x);
            const Mat J = theta_jacobian ? theta_jacobian(x) : vertical_form_jacobian_fd(theta, x);
            for (int a = 0; a < k; ++a) {
                double s = th[a] * d[m + a];
                for (int B = 0; B < m + k; ++B) s += 0.5 * J(a, B) * d[B] * d[m + a];
                acc += s;
            }
        }
        r.values.push_back(acc);
    }
    return r;
}

RealPath vertical_covariant_correction(const VerticalForm& theta, const AdaptedSubmersion& sub,
                                       const SamplePath& path,
                                       const std::function<Mat(const Point&)>& theta_jacobian) {
    RealPath r = make_real_path(path);
    const int m = sub.base_dim();
    const int k = sub.fiber_dim;
    double acc = 0.0;
    for (int n = 0; n < path.alive_until; ++n) {
        const Point& x = path.values[n];
        const Vec& d = path.increments[n];
        const Vec th = theta.eval(x);
        const Mat J = theta_jacobian ? theta_jacobian(x) : vertical_form_jacobian_fd(theta, x);
        const VerticalChristoffels gv = vertical_christoffels(sub, x);

        // S_AB = D_A theta_B - theta_c Gv~^c_{AB}; base covector slots carry
        // no derivative term, base-base symbols vanish.
        double step = 0.0;
        for (int b = 0; b < k; ++b) {
            for (int A = 0; A < m + k; ++A) {
                double s = J(b, A);
                for (int c = 0; c < k; ++c) {
                    const double symbol = (A < m) ? gv.fiber_base(c, b, A)
                                                  : gv.fiber_fiber(c, A - m, b);
                    s -= th[c] * symbol;
                }
                step += s * d[A] * d[m + b];
            }
            // second slot on a base direction: only the symbol term survives
            for (int j = 0; j < m; ++j) {
                double s = 0.0;
                for (int c = 0; c < k; ++c) s -= th[c] * gv.fiber_base(c, b, j);
                step += s * d[m + b] * d[j];
            }
        }
        acc += 0.5 * step;
        r.values.push_back(acc);
    }
    return r;
}

RealPath conversion_residual(const VerticalForm& theta, const AdaptedSubmersion& sub,
                             const SamplePath& path,
                             const std::function<Mat(const Point&)>& theta_jacobian) {
    const RealPath strat =
        vertical_stratonovich_integral(theta, sub, path, StratonovichRule::Midpoint);
    const RealPath ito = vertical_ito_integral(theta, sub, path);
    const RealPath corr = vertical_covariant_correction(theta, sub, path, theta_jacobian);

    RealPath r;
    r.grid = path.grid;
    r.alive_until = path.alive_until;
    r.values.resize(strat.values.size());
    for (size_t i = 0; i < r.values.size(); ++i)
        r.values[i] = strat.values[i] - (ito.values[i] + corr.values[i]);
    return r;
}

} // namespace vertmart
