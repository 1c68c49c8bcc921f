#include "sbvs/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "sbvs/errors.hpp"

namespace sbvs {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
    double v = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                          "' is not a number");
    }
    return v;
}

template <typename Int>
Int to_int(std::string_view key, std::string_view text) {
    Int v{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                          "' is not an integer");
    }
    return v;
}

std::vector<double> to_list(std::string_view key, std::string_view text) {
    std::vector<double> out;
    while (true) {
        const auto comma = text.find(',');
        out.push_back(to_double(key, trim(text.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return out;
}

std::string join(const double* v, Eigen::Index count) {
    std::string out;
    for (Eigen::Index i = 0; i < count; ++i) {
        if (i > 0) out += ',';
        out += format_number(v[i]);
    }
    return out;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.12g}", v); }

Profile parse_profile(std::string_view name) {
    if (name == "desk") return Profile::desk;
    if (name == "full") return Profile::full;
    throw ConfigError("unknown profile '" + std::string(name) + "' (expected desk or full)");
}

ExperimentConfig ExperimentConfig::for_profile(Profile profile) {
    ExperimentConfig c;
    if (profile == Profile::full) {
        c.reps = 100;
        c.imp.M = 50;
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (reps < 1) throw ConfigError("reps must be >= 1");
    if (n_min >= n_max) throw ConfigError("n_min must be smaller than n_max");
    if (n_min < 1) throw ConfigError("n_min must be positive");
    if (threads < 0) throw ConfigError("threads must be >= 0");
    dgp.validate();
    if (!(missing_rate >= 0.0 && missing_rate < 1.0)) {
        throw ConfigError("missing.rate must lie in [0, 1)");
    }
    imp.validate(dgp.p);
    if (n_min < imp.min_n) {
        throw ConfigError("n_min=" + std::to_string(n_min) + " is below the imputer minimum imp.min_n=" +
                          std::to_string(imp.min_n) + "; raise n_min");
    }
    smcs.validate();
    if (!g_rule.unit_information && !(g_rule.fixed > 0.0)) throw ConfigError("bvs.g must be > 0");
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::to_key_values() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("reps", std::to_string(reps));
    kv.emplace_back("n_min", std::to_string(n_min));
    kv.emplace_back("n_max", std::to_string(n_max));
    kv.emplace_back("seed", std::to_string(base_seed));
    kv.emplace_back("dgp.p", std::to_string(dgp.p));
    kv.emplace_back("dgp.beta", join(dgp.beta.data(), dgp.beta.size()));
    kv.emplace_back("dgp.sigma2", format_number(dgp.sigma2));
    kv.emplace_back("dgp.rho", format_number(rho));
    const Eigen::MatrixXd row_major = dgp.cov.transpose();
    kv.emplace_back("dgp.cov", join(row_major.data(), row_major.size()));
    kv.emplace_back("missing.rate", format_number(missing_rate));
    kv.emplace_back("missing.mechanism", std::string(to_string(missingness)));
    kv.emplace_back("imp.M", std::to_string(imp.M));
    kv.emplace_back("imp.sweeps", std::to_string(imp.sweeps));
    kv.emplace_back("imp.min_n", std::to_string(imp.min_n));
    kv.emplace_back("smcs.alpha", format_number(smcs.alpha));
    if (smcs.varsigma) {
        kv.emplace_back("smcs.varsigma", format_number(*smcs.varsigma));
    } else {
        kv.emplace_back("smcs.lambda", format_number(smcs.lambda));
    }
    kv.emplace_back("smcs.loss", std::string(to_string(loss_mode)));
    kv.emplace_back("bvs.g", g_rule.unit_information ? "n" : format_number(g_rule.fixed));
    kv.emplace_back("bvs.model_prior", std::string(to_string(model_prior)));
    return kv;
}

ExperimentConfig parse_config(std::string_view text, ExperimentConfig base) {
    std::map<std::string, std::string, std::less<>> values;
    int line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        const auto line = trim(text.substr(0, eol));
        text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected key=value");
        }
        values[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
    }

    ExperimentConfig c = std::move(base);
    auto take = [&](std::string_view key) -> std::optional<std::string> {
        auto it = values.find(key);
        if (it == values.end()) return std::nullopt;
        std::string v = it->second;
        values.erase(it);
        return v;
    };

    if (auto v = take("reps")) c.reps = to_int<int>("reps", *v);
    if (auto v = take("n_min")) c.n_min = to_int<int>("n_min", *v);
    if (auto v = take("n_max")) c.n_max = to_int<int>("n_max", *v);
    if (auto v = take("seed")) c.base_seed = to_int<std::uint64_t>("seed", *v);
    if (auto v = take("threads")) c.threads = to_int<int>("threads", *v);

    const auto p_text = take("dgp.p");
    const auto beta_text = take("dgp.beta");
    const auto rho_text = take("dgp.rho");
    const auto cov_text = take("dgp.cov");
    if (p_text) {
        c.dgp.p = to_int<int>("dgp.p", *p_text);
        if (c.dgp.p < 1 || c.dgp.p > kMaxCovariates) throw SizeLimitError("dgp.p out of range");
    }
    if (beta_text) {
        const auto beta = to_list("dgp.beta", *beta_text);
        c.dgp.beta = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
    } else if (c.dgp.beta.size() != c.dgp.p) {
        throw ConfigError("dgp.beta must be given when dgp.p changes");
    }
    if (rho_text) c.rho = to_double("dgp.rho", *rho_text);
    if (cov_text) {
        const auto cov = to_list("dgp.cov", *cov_text);
        if (cov.size() != static_cast<std::size_t>(c.dgp.p * c.dgp.p)) {
            throw ConfigError("dgp.cov needs p*p entries");
        }
        c.dgp.cov = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                   Eigen::RowMajor>>(cov.data(), c.dgp.p, c.dgp.p);
    } else if (rho_text || p_text) {
        c.dgp.cov = equicorrelated(c.dgp.p, c.rho);
    }
    if (auto v = take("dgp.sigma2")) c.dgp.sigma2 = to_double("dgp.sigma2", *v);

    if (auto v = take("missing.rate")) c.missing_rate = to_double("missing.rate", *v);
    if (auto v = take("missing.mechanism")) c.missingness = parse_missingness(*v);

    if (auto v = take("imp.M")) c.imp.M = to_int<int>("imp.M", *v);
    if (auto v = take("imp.sweeps")) c.imp.sweeps = to_int<int>("imp.sweeps", *v);
    if (auto v = take("imp.min_n")) c.imp.min_n = to_int<int>("imp.min_n", *v);

    if (auto v = take("smcs.alpha")) c.smcs.alpha = to_double("smcs.alpha", *v);
    const auto lambda_text = take("smcs.lambda");
    const auto varsigma_text = take("smcs.varsigma");
    if (varsigma_text) {
        const double vs = to_double("smcs.varsigma", *varsigma_text);
        if (!(vs > 0.0)) throw ConfigError("smcs.varsigma must be > 0");
        c.smcs.varsigma = vs;
        c.smcs.lambda = 1.0 / (8.0 * vs * vs);
    }
    if (lambda_text) {
        const double lambda = to_double("smcs.lambda", *lambda_text);
        if (!varsigma_text) c.smcs.varsigma.reset();
        c.smcs.lambda = lambda;
    }
    if (auto v = take("smcs.loss")) c.loss_mode = parse_loss_mode(*v);

    if (auto v = take("bvs.g")) {
        if (*v == "n") {
            c.g_rule = GRule{};
        } else {
            c.g_rule = GRule{false, to_double("bvs.g", *v)};
        }
    }
    if (auto v = take("bvs.model_prior")) c.model_prior = parse_model_prior(*v);

    if (!values.empty()) throw ConfigError("unknown config key '" + values.begin()->first + "'");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), std::move(base));
}

}  // namespace sbvs
