#ifndef BAMG_EXPERIMENT_CONFIG_HPP
#define BAMG_EXPERIMENT_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bamg/core/types.hpp"

namespace bamg {

/// Parses an angle given either as radians ("0.785") or as a pi fraction
/// ("pi/4", "-pi/8", "2pi/3", "pi").
inline real_t parse_angle(const std::string& text) {
    const real_t pi = 3.14159265358979323846;
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += std::tolower(c);
    if (s.empty()) throw std::invalid_argument("parse_angle: empty string");
    const auto pos = s.find("pi");
    if (pos == std::string::npos) return std::stod(s);
    real_t sign = 1.0;
    std::string pre = s.substr(0, pos);
    if (!pre.empty() && pre.back() == '-') {
        sign = -1.0;
        pre.pop_back();
    } else if (!pre.empty() && pre.back() == '+') {
        pre.pop_back();
    }
    real_t factor = pre.empty() ? 1.0 : std::stod(pre);
    real_t denom = 1.0;
    std::string post = s.substr(pos + 2);
    if (!post.empty()) {
        if (post[0] != '/') throw std::invalid_argument("parse_angle: cannot parse " + text);
        denom = std::stod(post.substr(1));
    }
    return sign * factor * pi / denom;
}

/// Full experiment configuration; the defaults are the two-level protocol
/// used throughout the experiments (delta = 0.7, nu = 5, theta_ad = 0.5,
/// k = 8 test vectors relaxed 40 sweeps, eta = 100, 2+2 smoothing,
/// d_LS = d + 2).
struct ExperimentConfig {
    std::vector<index_t> n_values{32};
    std::vector<real_t> alpha_values{0.0};
    std::vector<real_t> epsilon_values{1.0};

    index_t d = 2;
    real_t theta_ad = 0.5;
    index_t caliber = 4;
    index_t d_ls = 0; // 0 means "d + 2"
    real_t gamma = 1.5;
    real_t truncation = 0.15;
    index_t max_candidates = 12;
    index_t nu = 5;
    real_t delta = 0.7;
    index_t max_stages = 20;
    index_t k = 8;
    index_t tv_relax_count = 40;
    index_t eta = 100;
    index_t pre_sweeps = 2;
    index_t post_sweeps = 2;
    bool uniform_weights = true;    // uniform 1/k; reciprocal Rayleigh quotients optional
    std::string cr_rate_estimate = "last_ratio"; // full_window | skip_first | last_ratio
    bool direct_ls_form = false;    // default: residual-corrected targets
    bool cr_random_start = false;   // default: constant CR start vector

    std::vector<std::uint64_t> seeds{1};

    std::string out_csv;     // empty: do not write
    std::string pattern_dir; // empty: no per-cell pattern export

    index_t effective_d_ls() const { return d_ls > 0 ? d_ls : d + 2; }

    void validate() const {
        if (!(theta_ad > 0.0 && theta_ad < 1.0))
            throw std::invalid_argument("config: theta_ad must be in (0,1)");
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("config: delta must be in (0,1)");
        if (!(gamma > 1.0)) throw std::invalid_argument("config: gamma must be > 1");
        if (d < 1 || caliber < 1 || nu < 1 || k < 2 || eta < 2)
            throw std::invalid_argument("config: parameter out of range");
        if (seeds.empty()) throw std::invalid_argument("config: at least one seed required");
        if (cr_rate_estimate != "full_window" && cr_rate_estimate != "skip_first" &&
            cr_rate_estimate != "last_ratio")
            throw std::invalid_argument("config: unknown cr_rate_estimate");
        for (real_t e : epsilon_values)
            if (!(e >= 0.0 && e <= 1.0))
                throw std::invalid_argument("config: epsilon must be in [0,1]");
        for (index_t n : n_values)
            if (n < 2) throw std::invalid_argument("config: N must be >= 2");
    }
};

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).template get<std::decay_t<decltype(field)>>();
    };
    get("n_values", c.n_values);
    if (j.contains("alpha_values")) {
        c.alpha_values.clear();
        for (const auto& a : j.at("alpha_values")) {
            if (a.is_string())
                c.alpha_values.push_back(parse_angle(a.get<std::string>()));
            else
                c.alpha_values.push_back(a.get<real_t>());
        }
    }
    get("epsilon_values", c.epsilon_values);
    get("d", c.d);
    get("theta_ad", c.theta_ad);
    get("caliber", c.caliber);
    get("d_ls", c.d_ls);
    get("gamma", c.gamma);
    get("truncation", c.truncation);
    get("max_candidates", c.max_candidates);
    get("nu", c.nu);
    get("delta", c.delta);
    get("max_stages", c.max_stages);
    get("k", c.k);
    get("tv_relax_count", c.tv_relax_count);
    get("eta", c.eta);
    get("pre_sweeps", c.pre_sweeps);
    get("post_sweeps", c.post_sweeps);
    get("uniform_weights", c.uniform_weights);
    get("cr_rate_estimate", c.cr_rate_estimate);
    get("direct_ls_form", c.direct_ls_form);
    get("cr_random_start", c.cr_random_start);
    get("seeds", c.seeds);
    get("out_csv", c.out_csv);
    get("pattern_dir", c.pattern_dir);
    c.validate();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

} // namespace bamg

#endif
