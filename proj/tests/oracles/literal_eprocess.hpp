#pragma once

// Direct evaluation of
//   E_i,t = sup_{r<=t} (1/(m-1)) sum_{j!=i} exp(lambda sum_{s<=r} d_ij,s - r/8)
// from the full loss history, recomputing every partial sum from scratch.
// Returned in log space.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>

namespace oracle {

/// history[s][i] = L_i at time s + 1; d_ij,s = L_i,s - L_j,s.
inline std::vector<double> literal_log_e(const std::vector<std::vector<double>>& history,
                                         double lambda) {
    const std::size_t t = history.size();
    const std::size_t m = history.front().size();
    std::vector<double> out(m, -INFINITY);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t r = 1; r <= t; ++r) {
            std::vector<double> exponents;
            for (std::size_t j = 0; j < m; ++j) {
                if (j == i) continue;
                double sum_d = 0.0;
                for (std::size_t s = 0; s < r; ++s) sum_d += history[s][i] - history[s][j];
                exponents.push_back(lambda * sum_d - static_cast<double>(r) / 8.0);
            }
            double hi = -INFINITY;
            for (double e : exponents) hi = std::max(hi, e);
            double acc = 0.0;
            for (double e : exponents) acc += std::exp(e - hi);
            const double log_term = hi + std::log(acc) - std::log(static_cast<double>(m - 1));
            out[i] = std::max(out[i], log_term);
        }
    }
    return out;
}

/// Same, from a history of pairwise difference matrices.
inline std::vector<double> literal_log_e_pairwise(const std::vector<Eigen::MatrixXd>& history,
                                                  double lambda) {
    const std::size_t t = history.size();
    const auto m = history.front().rows();
    std::vector<double> out(static_cast<std::size_t>(m), -INFINITY);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (std::size_t r = 1; r <= t; ++r) {
            double hi = -INFINITY;
            std::vector<double> exponents;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (j == i) continue;
                double sum_d = 0.0;
                for (std::size_t s = 0; s < r; ++s) sum_d += history[s](i, j);
                exponents.push_back(lambda * sum_d - static_cast<double>(r) / 8.0);
                hi = std::max(hi, exponents.back());
            }
            double acc = 0.0;
            for (double e : exponents) acc += std::exp(e - hi);
            auto& o = out[static_cast<std::size_t>(i)];
            o = std::max(o, hi + std::log(acc) - std::log(static_cast<double>(m - 1)));
        }
    }
    return out;
}

}  // namespace oracle
