#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sbvs/model_space.hpp"

namespace sbvs {

enum class Method { bvs, smcs, zero_out, mixed };

inline constexpr Method kMethods[] = {Method::bvs, Method::smcs, Method::zero_out, Method::mixed};

std::string_view to_string(Method method) noexcept;
Method parse_method(std::string_view name);

/// Per-covariate inclusion probabilities of one method over time.
/// probs[t][k] belongs to time first_t + t and covariate k + 1.
struct InclusionTrajectory {
    Method method = Method::bvs;
    long first_t = 1;
    std::vector<std::vector<double>> probs;
};

/// Posterior inclusion probability sum_{i : gamma_k = 1} post_i for each k.
/// Throws DataError when post is not a probability vector (|sum - 1| > 1e-9).
std::vector<double> bvs_inclusion(std::span<const double> post, const ModelSpace& space);

/// Fraction of the confidence set containing covariate k. All NaN for an
/// empty set.
std::vector<double> smcs_inclusion(std::span<const std::size_t> set, const ModelSpace& space);

struct ZeroOutResult {
    std::vector<double> probs;
    bool fell_back = false;  ///< set empty or carried < 1e-300 posterior mass
};

/// Posterior restricted to the confidence set and renormalized, then summed
/// per covariate. Falls back to bvs_inclusion when nothing survives.
ZeroOutResult zero_out(std::span<const double> post, std::span<const std::size_t> set,
                       const ModelSpace& space);

/// w p_smcs + (1 - w) p_bvs with w = set_size / m. With set_size == 0 the
/// result is p_bvs exactly, even where p_smcs is NaN.
std::vector<double> mixed_inclusion(std::span<const double> p_bvs, std::span<const double> p_smcs,
                                    std::size_t set_size, std::size_t m);

}  // namespace sbvs
