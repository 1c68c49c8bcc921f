#include "sbvs/inclusion.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sbvs/errors.hpp"

namespace sbvs {

std::string_view to_string(Method method) noexcept {
    switch (method) {
        case Method::bvs: return "bvs";
        case Method::smcs: return "smcs";
        case Method::zero_out: return "zero_out";
        case Method::mixed: return "mixed";
    }
    return "?";
}

Method parse_method(std::string_view name) {
    for (Method m : kMethods) {
        if (to_string(m) == name) return m;
    }
    throw DataError("unknown method '" + std::string(name) + "'");
}

std::vector<double> bvs_inclusion(std::span<const double> post, const ModelSpace& space) {
    if (post.size() != space.size()) throw ShapeError("posterior does not match model space");
    double total = 0.0;
    for (double v : post) {
        if (!(v >= 0.0)) throw DataError("posterior entries must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw DataError("posterior does not sum to one");

    const int p = space.p();
    std::vector<double> out(static_cast<std::size_t>(p), 0.0);
    for (std::size_t i = 0; i < post.size(); ++i) {
        for (int k = 0; k < p; ++k) {
            if ((i >> k) & 1U) out[static_cast<std::size_t>(k)] += post[i];
        }
    }
    for (double& v : out) v = std::min(v, 1.0);
    return out;
}

std::vector<double> smcs_inclusion(std::span<const std::size_t> set, const ModelSpace& space) {
    const auto p = static_cast<std::size_t>(space.p());
    if (set.empty()) return std::vector<double>(p, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> counts(p, 0);
    for (std::size_t i : set) {
        if (i >= space.size()) throw std::out_of_range("model index outside model space");
        for (std::size_t k = 0; k < p; ++k) counts[k] += (i >> k) & 1U;
    }
    std::vector<double> out(p);
    for (std::size_t k = 0; k < p; ++k) {
        out[k] = static_cast<double>(counts[k]) / static_cast<double>(set.size());
    }
    return out;
}

ZeroOutResult zero_out(std::span<const double> post, std::span<const std::size_t> set,
                       const ModelSpace& space) {
    if (post.size() != space.size()) throw ShapeError("posterior does not match model space");
    double mass = 0.0;
    for (std::size_t i : set) {
        if (i >= space.size()) throw std::out_of_range("model index outside model space");
        mass += post[i];
    }
    if (set.empty() || mass < 1e-300) return {bvs_inclusion(post, space), true};

    std::vector<double> restricted(post.size(), 0.0);
    for (std::size_t i : set) restricted[i] = post[i] / mass;
    return {bvs_inclusion(restricted, space), false};
}

std::vector<double> mixed_inclusion(std::span<const double> p_bvs, std::span<const double> p_smcs,
                                    std::size_t set_size, std::size_t m) {
    if (p_bvs.size() != p_smcs.size()) throw ShapeError("inclusion vectors differ in length");
    if (m == 0 || set_size > m) throw DataError("set size must lie in [0, m]");
    std::vector<double> out(p_bvs.begin(), p_bvs.end());
    if (set_size == 0) return out;
    const double w = static_cast<double>(set_size) / static_cast<double>(m);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = w * p_smcs[k] + (1.0 - w) * p_bvs[k];
    return out;
}

}  // namespace sbvs
