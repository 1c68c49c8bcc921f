#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbvs/bayes_lm.hpp"
#include "sbvs/data_gen.hpp"
#include "sbvs/imputation.hpp"
#include "sbvs/smcs.hpp"

namespace sbvs {

enum class Profile { desk, full };

Profile parse_profile(std::string_view name);

/// g = n at every time step, or a fixed value.
struct GRule {
    bool unit_information = true;
    double fixed = 0.0;

    double at(long n) const { return unit_information ? unit_information_g(n) : fixed; }
};

struct ExperimentConfig {
    int reps = 20;
    int n_max = 100;
    int n_min = 19;
    std::uint64_t base_seed = 20250101;
    int threads = 0;  ///< 0: hardware concurrency

    DgpConfig dgp = DgpConfig::reference();
    double rho = 0.5;  ///< equicorrelation used when no explicit covariance is given
    double missing_rate = 0.4;
    Missingness missingness = Missingness::mcar;

    ImputationConfig imp{10, 5, 19};
    SmcsConfig smcs;
    LossMode loss_mode = LossMode::cumulative;

    GRule g_rule;
    ModelPrior model_prior = ModelPrior::uniform;

    /// Desk: 20 replications with 10 imputations. Full: 100 with 50.
    static ExperimentConfig for_profile(Profile profile);

    long t_max() const noexcept { return n_max - n_min + 1; }

    /// Throws ConfigError when fields are inconsistent.
    void validate() const;

    /// Ordered key=value pairs; parse_config of their text reproduces *this.
    std::vector<std::pair<std::string, std::string>> to_key_values() const;
};

/// Applies `key=value` lines onto `base`. Blank lines and lines starting
/// with '#' are ignored; unknown keys raise ConfigError.
///
/// Keys: reps n_max n_min seed threads dgp.p dgp.beta dgp.sigma2 dgp.rho
/// dgp.cov missing.rate missing.mechanism imp.M imp.sweeps imp.min_n
/// smcs.alpha smcs.lambda smcs.varsigma smcs.loss bvs.g bvs.model_prior.
/// Lists are comma separated; dgp.cov is row major.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

/// "%.12g" decimal text.
std::string format_number(double v);

}  // namespace sbvs
