#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace sbvs {

inline constexpr int kMaxCovariates = 20;

/// Inclusion vector (gamma_1, ..., gamma_p) of one candidate regression.
///
/// The vector is stored as its model index: gamma_k is bit (k - 1) of the
/// index, so gamma_1 is the lowest bit and index 0 is the null model. The
/// intercept is not part of gamma; every model fits one.
class ModelVector {
public:
    ModelVector(int p, std::uint32_t index);

    /// Build from explicit 0/1 entries in covariate order.
    static ModelVector from_bits(std::span<const int> bits);
    static ModelVector from_bits(std::initializer_list<int> bits);

    int p() const noexcept { return p_; }
    std::uint32_t index() const noexcept { return index_; }

    /// Number of included covariates.
    int size() const noexcept;

    /// 0/1 entries in covariate order.
    std::vector<int> bits() const;

    /// Zero-based covariate positions included in the model, ascending.
    std::vector<int> covariates() const;

    friend bool operator==(const ModelVector&, const ModelVector&) = default;

private:
    int p_;
    std::uint32_t index_;
};

/// gamma_k == 1, with k one-based. Throws std::out_of_range for k outside [1, p].
bool includes(const ModelVector& gamma, int k);

/// All 2^p models of a p-covariate regression in index order.
class ModelSpace {
public:
    explicit ModelSpace(int p);

    int p() const noexcept { return p_; }
    std::size_t size() const noexcept { return m_; }

    ModelVector operator[](std::size_t i) const;
    std::vector<ModelVector> models() const;
    std::size_t index_of(const ModelVector& gamma) const;

private:
    int p_;
    std::size_t m_;
};

/// Throws SizeLimitError unless 1 <= p <= kMaxCovariates.
ModelSpace enumerate_models(int p);

}  // namespace sbvs
