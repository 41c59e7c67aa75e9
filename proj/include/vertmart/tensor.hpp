#pragma once

#include <Eigen/Dense>
#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace vertmart {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Dense rank-3 tensor, row-major in index order (k, i, j).
/// Dimensions stay small (<= 6 per axis) so flat storage is fine.
class Tensor3 {
public:
    Tensor3() = default;
    Tensor3(int n0, int n1, int n2)
        : n0_(n0), n1_(n1), n2_(n2), data_(static_cast<size_t>(n0) * n1 * n2, 0.0) {}

    double& operator()(int a, int b, int c) { return data_[idx(a, b, c)]; }
    double operator()(int a, int b, int c) const { return data_[idx(a, b, c)]; }

    int dim0() const { return n0_; }
    int dim1() const { return n1_; }
    int dim2() const { return n2_; }

    std::span<const double> flat() const { return data_; }
    std::span<double> flat() { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    size_t idx(int a, int b, int c) const {
        assert(a >= 0 && a < n0_ && b >= 0 && b < n1_ && c >= 0 && c < n2_);
        return (static_cast<size_t>(a) * n1_ + b) * n2_ + c;
    }

    int n0_ = 0, n1_ = 0, n2_ = 0;
    std::vector<double> data_;
};

/// Deterministic pairwise (binary tree) summation over a path-indexed vector.
/// The result is independent of thread count because reduction happens after
/// all values are materialized in index order.
inline double pairwise_sum(std::span<const double> xs) {
    const size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const size_t h = n / 2;
    return pairwise_sum(xs.subspan(0, h)) + pairwise_sum(xs.subspan(h));
}

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;     // standard error of the mean
    size_t count = 0;
};

/// Mean and standard error via deterministic pairwise reductions.
inline MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    r.count = xs.size();
    if (r.count == 0) return r;
    r.mean = pairwise_sum(xs) / static_cast<double>(r.count);
    if (r.count < 2) return r;
    std::vector<double> sq(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        const double d = xs[i] - r.mean;
        sq[i] = d * d;
    }
    const double var = pairwise_sum(sq) / static_cast<double>(r.count - 1);
    r.se = std::sqrt(var / static_cast<double>(r.count));
    return r;
}

} // namespace vertmart
