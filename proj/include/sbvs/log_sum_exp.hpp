#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace sbvs {

/// log(exp(a) + exp(b)) without overflow. -inf is the additive identity.
inline double log_add(double a, double b) noexcept {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

/// log(sum_i exp(v_i)); -inf for an empty span.
inline double log_sum_exp(std::span<const double> v) noexcept {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : v) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double x : v) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

}  // namespace sbvs
