#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "sbvs/config.hpp"
#include "sbvs/experiment.hpp"

namespace sbvs {

inline constexpr std::string_view kVersion = "1.0.0";
inline constexpr std::string_view kTrajectoriesHeader = "rep,n,t,method,covariate,prob,set_size";

/// One row per (rep, t, method, covariate) in that nesting order.
void write_trajectories_csv(std::ostream& out, std::span<const ReplicationResult> results);

/// Inverse of write_trajectories_csv; results come back summarized and
/// ordered by rep. Throws DataError on malformed input.
std::vector<ReplicationResult> read_trajectories_csv(std::istream& in);

/// Table-1 and Table-2 layout: table,method,x1..xp.
void write_tables_csv(std::ostream& out, const ExperimentSummary& summary);

/// Figure-2 layout: t,method,mean_total_crossings,sd_total_crossings.
void write_crossings_by_t_csv(std::ostream& out, const ExperimentSummary& summary, int n_min);

/// Stacked line plots (bvs, mixed, smcs, zero_out) of one replication.
/// Covariates in `active` are drawn green, others brown; covariates in
/// `emphasized` are drawn thicker. A dashed rule marks 0.5.
void write_replication_svg(std::ostream& out, const ReplicationResult& result,
                           std::span<const std::uint8_t> active,
                           std::span<const std::uint8_t> emphasized);

/// Config echo as key=value lines preceded by '#' metadata, so the
/// manifest itself is a valid config file.
void write_manifest(std::ostream& out, const ExperimentConfig& config);

/// Covariates drawn thick: those whose |beta| equals the largest |beta|.
std::vector<std::uint8_t> emphasized_covariates(const DgpConfig& dgp);
std::vector<std::uint8_t> active_covariates(const DgpConfig& dgp);

/// Writes trajectories.csv, tables.csv, crossings_by_t.csv, manifest.txt and
/// plots/rep_<k>.svg into `dir`. With no results only the CSV headers are
/// written. Throws IoError naming the failing path.
void emit_outputs(std::span<const ReplicationResult> results, const ExperimentConfig& config,
                  const std::filesystem::path& dir);

/// Writes tables.csv and crossings_by_t.csv for already loaded results.
void emit_tables(const ExperimentSummary& summary, int n_min, const std::filesystem::path& dir);

}  // namespace sbvs
