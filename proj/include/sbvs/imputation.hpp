#pragma once

#include <vector>

#include <Eigen/Core>

#include "sbvs/data_gen.hpp"
#include "sbvs/random.hpp"

namespace sbvs {

struct ImputationConfig {
    int M = 50;       ///< completions per call
    int sweeps = 5;   ///< chained-equation passes per completion
    int min_n = 19;   ///< smallest sample the imputer accepts

    /// Throws ConfigError unless M >= 1, sweeps >= 1 and min_n > p + 2.
    void validate(int p) const;
};

struct ImputedSet {
    std::vector<Eigen::MatrixXd> completions;
    MissingDataset source;
};

/// Observed cells a covariate column needs before it can be imputed.
inline constexpr int kMinObservedPerColumn = 3;

/// Multiple imputation by chained equations with normal linear conditionals.
///
/// Each completion starts from column-wise draws N(observed mean, observed
/// variance) and then runs `sweeps` passes. In a pass every column with
/// missing cells is regressed, on its observed rows, on an intercept, y and
/// the other covariates (ridge 1e-8). Coefficients are drawn from
/// N(beta_hat, s^2 (Z'Z + ridge)^-1) and missing cells from the fitted
/// normal predictive. A column with fewer than p + 2 observed cells keeps
/// only the other covariates with the most observed cells so one residual
/// degree of freedom remains.
///
/// Completions use independent sub-streams seeded from `rng`.
/// Throws InsufficientDataError when n < min_n or a column has fewer than
/// kMinObservedPerColumn observed cells.
ImputedSet impute(const MissingDataset& data, const ImputationConfig& config, Rng& rng);

}  // namespace sbvs
