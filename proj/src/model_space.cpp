#include "sbvs/model_space.hpp"

#include <bit>
#include <stdexcept>
#include <string>

#include "sbvs/errors.hpp"

namespace sbvs {

namespace {

void check_p(int p) {
    if (p < 1 || p > kMaxCovariates) {
        throw SizeLimitError("covariate count p=" + std::to_string(p) + " outside [1, " +
                             std::to_string(kMaxCovariates) + "]");
    }
}

}  // namespace

ModelVector::ModelVector(int p, std::uint32_t index) : p_(p), index_(index) {
    check_p(p);
    if (index >> p != 0) {
        throw std::out_of_range("model index " + std::to_string(index) + " exceeds 2^" +
                                std::to_string(p));
    }
}

ModelVector ModelVector::from_bits(std::span<const int> bits) {
    std::uint32_t index = 0;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k] != 0 && bits[k] != 1) {
            throw DataError("model vector entries must be 0 or 1");
        }
        index |= static_cast<std::uint32_t>(bits[k]) << k;
    }
    return ModelVector(static_cast<int>(bits.size()), index);
}

ModelVector ModelVector::from_bits(std::initializer_list<int> bits) {
    return from_bits(std::span<const int>(bits.begin(), bits.size()));
}

int ModelVector::size() const noexcept { return std::popcount(index_); }

std::vector<int> ModelVector::bits() const {
    std::vector<int> out(static_cast<std::size_t>(p_));
    for (int k = 0; k < p_; ++k) out[static_cast<std::size_t>(k)] = (index_ >> k) & 1U;
    return out;
}

std::vector<int> ModelVector::covariates() const {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (int k = 0; k < p_; ++k) {
        if ((index_ >> k) & 1U) out.push_back(k);
    }
    return out;
}

bool includes(const ModelVector& gamma, int k) {
    if (k < 1 || k > gamma.p()) {
        throw std::out_of_range("covariate index " + std::to_string(k) + " outside [1, " +
                                std::to_string(gamma.p()) + "]");
    }
    return ((gamma.index() >> (k - 1)) & 1U) != 0;
}

ModelSpace::ModelSpace(int p) : p_(p), m_(0) {
    check_p(p);
    m_ = std::size_t{1} << p;
}

ModelVector ModelSpace::operator[](std::size_t i) const {
    if (i >= m_) throw std::out_of_range("model index out of range");
    return ModelVector(p_, static_cast<std::uint32_t>(i));
}

std::vector<ModelVector> ModelSpace::models() const {
    std::vector<ModelVector> out;
    out.reserve(m_);
    for (std::size_t i = 0; i < m_; ++i) out.emplace_back(p_, static_cast<std::uint32_t>(i));
    return out;
}

std::size_t ModelSpace::index_of(const ModelVector& gamma) const {
    if (gamma.p() != p_) throw ShapeError("model vector length does not match model space");
    return gamma.index();
}

ModelSpace enumerate_models(int p) { return ModelSpace(p); }

}  // namespace sbvs
