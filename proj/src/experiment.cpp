#include "sbvs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "sbvs/bayes_lm.hpp"
#include "sbvs/errors.hpp"
#include "sbvs/imputation.hpp"
#include "sbvs/random.hpp"
#include "sbvs/smcs.hpp"

namespace sbvs {

namespace {

// Sub-stream ids within one replication seed.
constexpr std::uint64_t kCovariateStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kMaskStream = 2;
constexpr std::uint64_t kImputationStreamBase = 1000;

bool is_active(double prob) { return prob >= 0.5; }

// 1 where the side of 0.5 changed relative to the previous non-NaN entry.
std::vector<int> crossing_indicators(std::span<const double> series) {
    std::vector<int> out(series.size(), 0);
    bool have_prev = false;
    bool prev = false;
    for (std::size_t t = 0; t < series.size(); ++t) {
        if (std::isnan(series[t])) continue;
        const bool side = is_active(series[t]);
        if (have_prev && side != prev) out[t] = 1;
        prev = side;
        have_prev = true;
    }
    return out;
}

std::vector<double> column(const InclusionTrajectory& traj, std::size_t k) {
    std::vector<double> out(traj.probs.size());
    for (std::size_t t = 0; t < out.size(); ++t) out[t] = traj.probs[t][k];
    return out;
}

bool is_subset(std::span<const std::size_t> inner, std::span<const std::size_t> outer) {
    return std::includes(outer.begin(), outer.end(), inner.begin(), inner.end());
}

}  // namespace

long count_crossings(std::span<const double> series) {
    if (series.empty()) throw DataError("cannot count crossings of an empty series");
    const auto marks = crossing_indicators(series);
    long total = 0;
    for (int v : marks) total += v;
    return total;
}

void ReplicationResult::summarize() {
    nan_dropped = false;
    for (Method m : kMethods) {
        const auto& traj = trajectory(m);
        const std::size_t p = traj.probs.empty() ? 0 : traj.probs.front().size();
        auto& cross = crossings[method_slot(m)];
        auto& fin = final_included[method_slot(m)];
        cross.assign(p, 0);
        fin.assign(p, 0);
        for (std::size_t k = 0; k < p; ++k) {
            const auto series = column(traj, k);
            if (std::any_of(series.begin(), series.end(), [](double v) { return std::isnan(v); })) {
                nan_dropped = true;
            }
            cross[k] = count_crossings(series);
            const double last = series.back();
            fin[k] = !std::isnan(last) && is_active(last) ? 1 : 0;
        }
    }
}

ReplicationResult run_replication(const ExperimentConfig& config, int rep) {
    config.validate();
    const std::uint64_t seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(rep));
    const DgpConfig& dgp = config.dgp;

    Rng cov_rng = make_rng(seed, kCovariateStream);
    const Eigen::MatrixXd X = gen_covariates(config.n_max, dgp.cov, cov_rng);
    Rng noise_rng = make_rng(seed, kNoiseStream);
    const Eigen::VectorXd y = gen_responses(X, dgp, noise_rng);
    Rng mask_rng = make_rng(seed, kMaskStream);
    const MissingDataset data = apply_missingness(X, config.missing_rate, config.missingness, mask_rng, y);

    const ModelSpace space = enumerate_models(dgp.p);
    const std::size_t m = space.size();
    const std::size_t true_index = dgp.true_model().index();

    ReplicationResult result;
    result.rep = rep;
    result.n_min = config.n_min;
    for (Method method : kMethods) {
        auto& traj = result.trajectories[method_slot(method)];
        traj.method = method;
        traj.first_t = 1;
        traj.probs.reserve(static_cast<std::size_t>(config.t_max()));
    }

    EProcessState state = EProcessState::fresh(m);
    std::vector<double> previous_log_bf(m, 0.0);
    std::vector<std::size_t> previous_set = confidence_set(state);
    std::vector<std::vector<double>> tables;

    for (int n = config.n_min; n <= config.n_max; ++n) {
        const long t = n - config.n_min + 1;
        const MissingDataset prefix = data.head(n);

        Rng imp_rng = make_rng(seed, kImputationStreamBase + static_cast<std::uint64_t>(n));
        ImputedSet imputed;
        try {
            imputed = impute(prefix, config.imp, imp_rng);
        } catch (const InsufficientDataError& e) {
            if (n == config.n_min) {
                throw ConfigError("replication " + std::to_string(rep) + ": imputation failed at n_min=" +
                                  std::to_string(n) + " (" + e.what() + "); use a larger n_min");
            }
            throw;
        }

        tables.clear();
        const double g = config.g_rule.at(n);
        const Eigen::VectorXd y_prefix = prefix.y;
        for (const auto& completion : imputed.completions) {
            tables.push_back(model_sweep(GramStats::from_data(completion, y_prefix), space, g));
        }
        const auto log_bf = average_over_imputations(tables);
        const auto post = posterior_model_probs(log_bf, space, config.model_prior);

        std::vector<double> loss_input = log_bf;
        if (config.loss_mode == LossMode::increment) {
            for (std::size_t i = 0; i < m; ++i) loss_input[i] -= previous_log_bf[i];
        }
        previous_log_bf = log_bf;
        state = step(std::move(state), loss_from_log_marginals(loss_input, t), config.smcs);
        const auto set = confidence_set(state);

        if (!is_subset(set, previous_set)) ++result.nested_violations;
        if (state.member[true_index] == 0) result.true_model_excluded = true;

        const auto p_bvs = bvs_inclusion(post, space);
        const auto p_smcs = smcs_inclusion(set, space);
        auto zo = zero_out(post, set, space);
        if (zo.fell_back) ++result.zero_out_fallbacks;
        auto p_mixed = mixed_inclusion(p_bvs, p_smcs, set.size(), m);

        result.trajectories[method_slot(Method::bvs)].probs.push_back(p_bvs);
        result.trajectories[method_slot(Method::smcs)].probs.push_back(p_smcs);
        result.trajectories[method_slot(Method::zero_out)].probs.push_back(std::move(zo.probs));
        result.trajectories[method_slot(Method::mixed)].probs.push_back(std::move(p_mixed));
        result.set_sizes.push_back(set.size());
        result.final_true_model_posterior = post[true_index];
        previous_set = set;
    }

    result.summarize();
    return result;
}

std::vector<ReplicationResult> run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto reps = static_cast<std::size_t>(config.reps);
    std::vector<ReplicationResult> results(reps);
    std::vector<std::exception_ptr> errors(reps);

    unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                          : std::max(1U, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(reps));

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            try {
                results[r] = run_replication(config, static_cast<int>(r));
            } catch (...) {
                errors[r] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

ExperimentSummary aggregate(std::span<const ReplicationResult> results) {
    if (results.empty()) throw DataError("nothing to aggregate");
    ExperimentSummary out;
    out.reps = static_cast<int>(results.size());
    const auto& first = results.front().trajectory(Method::bvs);
    const std::size_t p = first.probs.empty() ? 0 : first.probs.front().size();
    const std::size_t t_max = first.probs.size();
    out.p = static_cast<int>(p);
    const double reps = static_cast<double>(results.size());

    for (Method method : kMethods) {
        const std::size_t slot = method_slot(method);
        MethodSummary& s = out.methods[slot];
        s.mean_crossings.assign(p, 0.0);
        s.final_frequency.assign(p, 0.0);
        s.cumulative_total_mean.assign(t_max, 0.0);
        s.cumulative_total_sd.assign(t_max, 0.0);
        std::vector<double> cumulative_sq(t_max, 0.0);
        std::vector<double> totals;

        for (const auto& r : results) {
            const auto& traj = r.trajectories[slot];
            if (traj.probs.size() != t_max) throw ShapeError("replications differ in length");
            long total = 0;
            for (std::size_t k = 0; k < p; ++k) {
                s.mean_crossings[k] += static_cast<double>(r.crossings[slot][k]);
                s.final_frequency[k] += r.final_included[slot][k];
                total += r.crossings[slot][k];
            }
            totals.push_back(static_cast<double>(total));

            std::vector<long> per_t(t_max, 0);
            for (std::size_t k = 0; k < p; ++k) {
                const auto marks = crossing_indicators(column(traj, k));
                for (std::size_t t = 0; t < t_max; ++t) per_t[t] += marks[t];
            }
            long running = 0;
            for (std::size_t t = 0; t < t_max; ++t) {
                running += per_t[t];
                s.cumulative_total_mean[t] += static_cast<double>(running);
                cumulative_sq[t] += static_cast<double>(running) * static_cast<double>(running);
            }
        }

        for (auto& v : s.mean_crossings) v /= reps;
        for (auto& v : s.final_frequency) v /= reps;
        double sum = 0.0;
        for (double v : totals) sum += v;
        s.total_crossings_mean = sum / reps;
        double ss = 0.0;
        for (double v : totals) ss += (v - s.total_crossings_mean) * (v - s.total_crossings_mean);
        s.total_crossings_variance = results.size() > 1 ? ss / (reps - 1.0) : 0.0;
        for (std::size_t t = 0; t < t_max; ++t) {
            const double mean = s.cumulative_total_mean[t] / reps;
            s.cumulative_total_mean[t] = mean;
            const double var = results.size() > 1
                                   ? std::max(0.0, (cumulative_sq[t] - reps * mean * mean) / (reps - 1.0))
                                   : 0.0;
            s.cumulative_total_sd[t] = std::sqrt(var);
        }
    }

    double agreement = 0.0;
    double excluded = 0.0;
    for (const auto& r : results) {
        const auto& b = r.final_included[method_slot(Method::bvs)];
        const auto& z = r.final_included[method_slot(Method::zero_out)];
        for (std::size_t k = 0; k < p; ++k) agreement += b[k] == z[k] ? 1.0 : 0.0;
        out.nested_violations += r.nested_violations;
        excluded += r.true_model_excluded ? 1.0 : 0.0;
    }
    out.zero_out_bvs_agreement = agreement / reps;
    out.true_model_exclusion_rate = excluded / reps;
    return out;
}

}  // namespace sbvs
