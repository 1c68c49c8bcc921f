#include "sbvs/output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <string>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "sbvs/errors.hpp"
#include "sbvs/random.hpp"

namespace sbvs {

namespace {

constexpr Method kTableOrder[] = {Method::bvs, Method::mixed, Method::smcs, Method::zero_out};

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = line.find(sep);
        out.push_back(line.substr(0, pos));
        if (pos == std::string_view::npos) break;
        line.remove_prefix(pos + 1);
    }
    return out;
}

template <typename Int>
Int parse_int(std::string_view s, long line_no) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("trajectories line " + std::to_string(line_no) + ": bad integer '" +
                        std::string(s) + "'");
    }
    return v;
}

double parse_prob(std::string_view s, long line_no) {
    if (s == "nan" || s == "NaN") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("trajectories line " + std::to_string(line_no) + ": bad number '" +
                        std::string(s) + "'");
    }
    return v;
}

}  // namespace

void write_trajectories_csv(std::ostream& out, std::span<const ReplicationResult> results) {
    out << kTrajectoriesHeader << '\n';
    for (const auto& r : results) {
        const std::size_t t_max = r.set_sizes.size();
        for (std::size_t t = 0; t < t_max; ++t) {
            const long n = r.n_min + static_cast<long>(t);
            for (Method m : kMethods) {
                const auto& probs = r.trajectory(m).probs[t];
                for (std::size_t k = 0; k < probs.size(); ++k) {
                    fmt::print(out, "{},{},{},{},{},{},{}\n", r.rep, n, t + 1, to_string(m), k + 1,
                               format_number(probs[k]), r.set_sizes[t]);
                }
            }
        }
    }
}

std::vector<ReplicationResult> read_trajectories_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTrajectoriesHeader) {
        throw DataError("trajectories CSV must start with header '" + std::string(kTrajectoriesHeader) + "'");
    }

    struct Builder {
        ReplicationResult result;
        std::size_t cells = 0;
        std::size_t p = 0;
    };
    std::map<int, Builder> reps;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != 7) {
            throw DataError("trajectories line " + std::to_string(line_no) + ": expected 7 fields");
        }
        const int rep = parse_int<int>(f[0], line_no);
        const long n = parse_int<long>(f[1], line_no);
        const long t = parse_int<long>(f[2], line_no);
        const Method method = parse_method(f[3]);
        const long k = parse_int<long>(f[4], line_no);
        const double prob = parse_prob(f[5], line_no);
        const auto set_size = parse_int<std::size_t>(f[6], line_no);
        if (t < 1 || k < 1) throw DataError("trajectories line " + std::to_string(line_no) + ": t and covariate start at 1");

        auto& b = reps[rep];
        auto& r = b.result;
        r.rep = rep;
        r.n_min = static_cast<int>(n - t + 1);
        const auto ti = static_cast<std::size_t>(t - 1);
        const auto ki = static_cast<std::size_t>(k - 1);
        b.p = std::max(b.p, ki + 1);
        auto& traj = r.trajectories[method_slot(method)];
        traj.method = method;
        if (traj.probs.size() <= ti) traj.probs.resize(ti + 1);
        if (traj.probs[ti].size() <= ki) {
            traj.probs[ti].resize(ki + 1, std::numeric_limits<double>::quiet_NaN());
        }
        traj.probs[ti][ki] = prob;
        if (r.set_sizes.size() <= ti) r.set_sizes.resize(ti + 1, 0);
        r.set_sizes[ti] = set_size;
        ++b.cells;
    }

    std::vector<ReplicationResult> out;
    out.reserve(reps.size());
    for (auto& [rep, b] : reps) {
        const std::size_t t_max = b.result.set_sizes.size();
        if (b.cells != t_max * kMethodCount * b.p) {
            throw DataError("trajectories for rep " + std::to_string(rep) + " are incomplete");
        }
        for (Method m : kMethods) {
            auto& traj = b.result.trajectories[method_slot(m)];
            traj.method = m;
            if (traj.probs.size() != t_max) {
                throw DataError("rep " + std::to_string(rep) + " lacks rows for a method");
            }
            for (const auto& row : traj.probs) {
                if (row.size() != b.p) throw DataError("rep " + std::to_string(rep) + " lacks covariates");
            }
        }
        b.result.summarize();
        out.push_back(std::move(b.result));
    }
    return out;
}

void write_tables_csv(std::ostream& out, const ExperimentSummary& summary) {
    out << "table,method";
    for (int k = 1; k <= summary.p; ++k) out << ",x" << k;
    out << '\n';
    auto rows = [&](std::string_view table, auto field) {
        for (Method m : kTableOrder) {
            out << table << ',' << to_string(m);
            for (double v : summary.method(m).*field) out << ',' << format_number(v);
            out << '\n';
        }
    };
    rows("mean_crossings", &MethodSummary::mean_crossings);
    rows("final_inclusion", &MethodSummary::final_frequency);
}

void write_crossings_by_t_csv(std::ostream& out, const ExperimentSummary& summary, int n_min) {
    out << "t,n,method,mean_total_crossings,sd_total_crossings\n";
    const std::size_t t_max = summary.method(Method::bvs).cumulative_total_mean.size();
    for (std::size_t t = 0; t < t_max; ++t) {
        for (Method m : kTableOrder) {
            const auto& s = summary.method(m);
            fmt::print(out, "{},{},{},{},{}\n", t + 1, n_min + static_cast<long>(t), to_string(m),
                       format_number(s.cumulative_total_mean[t]),
                       format_number(s.cumulative_total_sd[t]));
        }
    }
}

void write_replication_svg(std::ostream& out, const ReplicationResult& result,
                           std::span<const std::uint8_t> active,
                           std::span<const std::uint8_t> emphasized) {
    constexpr double kWidth = 640;
    constexpr double kPanelHeight = 200;
    constexpr double kLeft = 50;
    constexpr double kRight = 20;
    constexpr double kTop = 30;
    constexpr double kBottom = 30;
    constexpr double kGap = 20;
    const double panel_total = kTop + kPanelHeight + kBottom;
    const double height = static_cast<double>(std::size(kTableOrder)) * panel_total + kGap;

    const std::size_t t_max = result.set_sizes.size();
    const long n_first = result.n_min;
    const long n_last = result.n_min + static_cast<long>(t_max) - 1;
    const double span_n = std::max<long>(n_last - n_first, 1);

    fmt::print(out,
               "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
               "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{}\" height=\"{}\" "
               "viewBox=\"0 0 {} {}\">\n",
               kWidth, height, kWidth, height);
    out << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t panel = 0; panel < std::size(kTableOrder); ++panel) {
        const Method method = kTableOrder[panel];
        const double y0 = static_cast<double>(panel) * panel_total + kTop;
        const double x0 = kLeft;
        const double w = kWidth - kLeft - kRight;
        auto px = [&](long n) { return x0 + w * static_cast<double>(n - n_first) / span_n; };
        auto py = [&](double prob) { return y0 + kPanelHeight * (1.0 - prob); };

        out << "<g>\n";
        fmt::print(out, "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\">rep {}: {}</text>\n",
                   x0, y0 - 10, result.rep, to_string(method));
        fmt::print(out,
                   "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\" "
                   "stroke-width=\"1\"/>\n",
                   x0, y0, w, kPanelHeight);
        fmt::print(out,
                   "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#888\" stroke-width=\"1\" "
                   "stroke-dasharray=\"4,3\"/>\n",
                   x0, py(0.5), x0 + w, py(0.5));
        for (double tick : {0.0, 0.5, 1.0}) {
            fmt::print(out,
                       "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" "
                       "text-anchor=\"end\">{}</text>\n",
                       x0 - 5, py(tick) + 3, tick);
        }
        for (long n = ((n_first + 9) / 10) * 10; n <= n_last; n += 10) {
            fmt::print(out,
                       "<text x=\"{:.2f}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" "
                       "text-anchor=\"middle\">{}</text>\n",
                       px(n), y0 + kPanelHeight + 14, n);
        }

        const auto& traj = result.trajectory(method);
        const std::size_t p = traj.probs.empty() ? 0 : traj.probs.front().size();
        for (std::size_t k = 0; k < p; ++k) {
            const bool is_active = k < active.size() && active[k] != 0;
            const bool thick = k < emphasized.size() && emphasized[k] != 0;
            const char* colour = is_active ? "#2e8b57" : "#a0522d";
            std::string points;
            auto flush = [&] {
                if (!points.empty()) {
                    fmt::print(out,
                               "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"{}\" "
                               "stroke-opacity=\"0.85\" points=\"{}\"/>\n",
                               colour, thick ? 3.0 : 1.2, points);
                    points.clear();
                }
            };
            for (std::size_t t = 0; t < traj.probs.size(); ++t) {
                const double prob = traj.probs[t][k];
                if (std::isnan(prob)) {
                    flush();
                    continue;
                }
                if (!points.empty()) points += ' ';
                points += fmt::format("{:.2f},{:.2f}", px(n_first + static_cast<long>(t)), py(prob));
            }
            flush();
        }
        out << "</g>\n";
    }
    out << "</svg>\n";
}

void write_manifest(std::ostream& out, const ExperimentConfig& config) {
    fmt::print(out, "# sbvs {}\n", kVersion);
    out << "# threshold rule: prob >= 0.5 counts as active\n";
    out << "# replication seed: derive_seed(seed, rep) (splitmix64)\n";
    for (int r = 0; r < config.reps; ++r) {
        fmt::print(out, "# rep {} seed {}\n", r, derive_seed(config.base_seed, static_cast<std::uint64_t>(r)));
    }
    for (const auto& [key, value] : config.to_key_values()) out << key << '=' << value << '\n';
}

std::vector<std::uint8_t> active_covariates(const DgpConfig& dgp) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(dgp.p));
    for (int k = 0; k < dgp.p; ++k) out[static_cast<std::size_t>(k)] = dgp.beta(k) != 0.0;
    return out;
}

std::vector<std::uint8_t> emphasized_covariates(const DgpConfig& dgp) {
    const double top = dgp.beta.cwiseAbs().maxCoeff();
    std::vector<std::uint8_t> out(static_cast<std::size_t>(dgp.p));
    for (int k = 0; k < dgp.p; ++k) {
        out[static_cast<std::size_t>(k)] = top > 0.0 && std::abs(dgp.beta(k)) == top;
    }
    return out;
}

void emit_tables(const ExperimentSummary& summary, int n_min, const std::filesystem::path& dir) {
    const auto tables_path = dir / "tables.csv";
    auto tables = open_for_write(tables_path);
    write_tables_csv(tables, summary);
    finish(tables, tables_path);

    const auto by_t_path = dir / "crossings_by_t.csv";
    auto by_t = open_for_write(by_t_path);
    write_crossings_by_t_csv(by_t, summary, n_min);
    finish(by_t, by_t_path);
}

void emit_outputs(std::span<const ReplicationResult> results, const ExperimentConfig& config,
                  const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir / "plots", ec);
    if (ec) throw IoError("cannot create " + (dir / "plots").string() + ": " + ec.message());

    const auto traj_path = dir / "trajectories.csv";
    auto traj = open_for_write(traj_path);
    write_trajectories_csv(traj, results);
    finish(traj, traj_path);

    const auto manifest_path = dir / "manifest.txt";
    auto manifest = open_for_write(manifest_path);
    write_manifest(manifest, config);
    finish(manifest, manifest_path);

    if (results.empty()) {
        const auto tables_path = dir / "tables.csv";
        auto tables = open_for_write(tables_path);
        tables << "table,method";
        for (int k = 1; k <= config.dgp.p; ++k) tables << ",x" << k;
        tables << '\n';
        finish(tables, tables_path);
        const auto by_t_path = dir / "crossings_by_t.csv";
        auto by_t = open_for_write(by_t_path);
        by_t << "t,n,method,mean_total_crossings,sd_total_crossings\n";
        finish(by_t, by_t_path);
        return;
    }

    emit_tables(aggregate(results), config.n_min, dir);

    const auto active = active_covariates(config.dgp);
    const auto emphasized = emphasized_covariates(config.dgp);
    for (const auto& r : results) {
        const auto svg_path = dir / "plots" / fmt::format("rep_{}.svg", r.rep);
        auto svg = open_for_write(svg_path);
        write_replication_svg(svg, r, active, emphasized);
        finish(svg, svg_path);
    }
}

}  // namespace sbvs
