#pragma once

#include <vertmart/rng.hpp>
#include <vertmart/tensor.hpp>

namespace vmtest {

inline double uniform(vertmart::GaussianStream& rng, double lo, double hi) {
    return lo + (hi - lo) * rng.next_unit();
}

inline vertmart::Vec uniform_vec(vertmart::GaussianStream& rng, std::initializer_list<std::pair<double, double>> ranges) {
    vertmart::Vec v(static_cast<int>(ranges.size()));
    int i = 0;
    for (const auto& [lo, hi] : ranges) v[i++] = uniform(rng, lo, hi);
    return v;
}

} // namespace vmtest
