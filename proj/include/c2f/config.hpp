#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "c2f/baselines.hpp"
#include "c2f/ddpg.hpp"
#include "c2f/errors.hpp"
#include "c2f/objective.hpp"
#include "c2f/phy.hpp"
#include "c2f/scenario.hpp"

namespace c2f {

struct EvalConfig {
    int n_draws = 100;        // small-scale draws per reported interval metric
    int n_eval_episodes = 5;
    int n_seeds = 1;          // replicates per sweep cell

    void validate() const {
        if (n_draws < 1) throw ConfigError("eval: n_draws must be >= 1");
        if (n_eval_episodes < 1) throw ConfigError("eval: n_eval_episodes must be >= 1");
        if (n_seeds < 1) throw ConfigError("eval: n_seeds must be >= 1");
    }
};

// One experiment: scenario + objective + agent + baselines + output plumbing.
struct ExperimentConfig {
    std::uint64_t seed = 1;  // master seed; sub-streams are derived per component
    ScenarioConfig scenario;
    ObjectiveConfig objective;
    EnergyParams energy;
    AgentConfig agent;
    BaselineConfig baseline;
    std::vector<BaselineMethod> compare_methods;
    bool compare_random_anchor = true;
    std::string compare_checkpoint;  // defaults to <output_dir>/checkpoint.json
    EvalConfig eval;
    std::string output_dir = "out";
    int checkpoint_every = 100;
    int reward_draws = 1;  // small-scale draws behind each training reward

    void validate() const {
        scenario.validate();
        objective.validate();
        energy.validate();
        agent.validate();
        baseline.validate();
        eval.validate();
        if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be >= 1");
        if (reward_draws < 1) throw ConfigError("reward_draws must be >= 1");
        if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
        if (is_rate_constrained(objective.objective_case) && objective.r_th <= 0.0)
            throw ConfigError("objective: rate-constrained case requires r_th > 0");
    }
};

namespace detail {

template <typename T>
T get_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config key '" + key + "': " + e.what());
    }
}

inline UserPlacement placement_from_string(const std::string& s) {
    if (s == "uniform") return UserPlacement::kUniform;
    if (s == "two_hotspot") return UserPlacement::kTwoHotspot;
    throw ConfigError("scenario: unknown user_placement '" + s + "'");
}

}  // namespace detail

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    using detail::get_or;
    ExperimentConfig cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);

    if (j.contains("scenario")) {
        const auto& s = j.at("scenario");
        auto& sc = cfg.scenario;
        sc.area_side = get_or(s, "area_side", sc.area_side);
        sc.num_users = get_or(s, "K", sc.num_users);
        sc.num_aps = get_or(s, "L", sc.num_aps);
        sc.num_subnetworks = get_or(s, "M", sc.num_subnetworks);
        sc.intervals = get_or(s, "T", sc.intervals);
        sc.interval_duration = get_or(s, "interval_duration", sc.interval_duration);
        sc.v_max = get_or(s, "v_max", sc.v_max);
        sc.path_loss_exponent = get_or(s, "alpha", sc.path_loss_exponent);
        sc.shadow_std_db = get_or(s, "sigma_sh_db", sc.shadow_std_db);
        if (s.contains("noise_dbm")) sc.noise_power_w = dbm_to_watts(s.at("noise_dbm").get<double>());
        sc.dynamic_users = get_or(s, "dynamic_users", sc.dynamic_users);
        sc.user_change_max = get_or(s, "k_change_max", sc.user_change_max);
        sc.user_placement =
            detail::placement_from_string(get_or<std::string>(s, "user_placement", "uniform"));
        sc.hotspot_std = get_or(s, "hotspot_std", sc.hotspot_std);
        sc.hotspot_weight = get_or(s, "hotspot_weight", sc.hotspot_weight);
    }
    cfg.scenario.seed = derive_seed(cfg.seed, "scenario");

    if (j.contains("objective")) {
        const auto& o = j.at("objective");
        cfg.objective.objective_case =
            objective_case_from_string(get_or<std::string>(o, "case", "RATE_BALANCE"));
        cfg.objective.r_th = get_or(o, "r_th", cfg.objective.r_th);
        cfg.objective.reward_scale =
            get_or(o, "reward_scale", ObjectiveConfig::default_reward_scale(cfg.objective.objective_case));
    } else {
        cfg.objective.reward_scale = ObjectiveConfig::default_reward_scale(cfg.objective.objective_case);
    }

    if (j.contains("energy")) {
        const auto& e = j.at("energy");
        cfg.energy.p_tx = detail::get_or(e, "p_tx", cfg.energy.p_tx);
        cfg.energy.tau = detail::get_or(e, "tau", cfg.energy.tau);
        cfg.energy.p_c = detail::get_or(e, "p_c", cfg.energy.p_c);
        cfg.energy.p_fix = detail::get_or(e, "p_fix", cfg.energy.p_fix);
        cfg.energy.p_b = detail::get_or(e, "p_b", cfg.energy.p_b);
    }

    if (j.contains("agent")) {
        const auto& a = j.at("agent");
        auto& ag = cfg.agent;
        ag.lr_actor = get_or(a, "lr_actor", ag.lr_actor);
        ag.lr_critic = get_or(a, "lr_critic", ag.lr_critic);
        ag.soft_update = get_or(a, "soft_update", ag.soft_update);
        ag.discount = get_or(a, "discount", ag.discount);
        ag.sigma_max = get_or(a, "sigma_max", ag.sigma_max);
        ag.sigma_min = get_or(a, "sigma_min", ag.sigma_min);
        ag.sigma_decay = get_or(a, "sigma_decay", ag.sigma_decay);
        ag.batch_size = get_or(a, "batch", ag.batch_size);
        ag.buffer_capacity = get_or(a, "capacity", ag.buffer_capacity);
        ag.episodes = get_or(a, "episodes", ag.episodes);
        ag.actor_hidden = get_or(a, "actor_hidden", ag.actor_hidden);
        ag.critic_hidden = get_or(a, "critic_hidden", ag.critic_hidden);
        ag.adam_beta1 = get_or(a, "adam_beta1", ag.adam_beta1);
        ag.adam_beta2 = get_or(a, "adam_beta2", ag.adam_beta2);
        ag.adam_eps = get_or(a, "adam_eps", ag.adam_eps);
        ag.gamma_db_min = get_or(a, "gamma_db_min", ag.gamma_db_min);
        ag.gamma_db_max = get_or(a, "gamma_db_max", ag.gamma_db_max);
        ag.actor_final_scale = get_or(a, "actor_final_scale", ag.actor_final_scale);
    }

    if (j.contains("baseline")) {
        const auto& b = j.at("baseline");
        cfg.baseline.method =
            baseline_method_from_string(get_or<std::string>(b, "method", "USER_KMEANS"));
        cfg.baseline.ap_selection_ratio = get_or(b, "ap_selection_ratio", cfg.baseline.ap_selection_ratio);
        cfg.baseline.max_iters = get_or(b, "max_iters", cfg.baseline.max_iters);
        cfg.baseline.tol = get_or(b, "tol", cfg.baseline.tol);
        cfg.baseline.seed = get_or(b, "seed", cfg.baseline.seed);
    }

    if (j.contains("compare")) {
        const auto& c = j.at("compare");
        if (c.contains("methods")) {
            for (const auto& name : c.at("methods"))
                cfg.compare_methods.push_back(baseline_method_from_string(name.get<std::string>()));
        }
        cfg.compare_random_anchor = get_or(c, "random_anchor", cfg.compare_random_anchor);
        cfg.compare_checkpoint = get_or<std::string>(c, "checkpoint", "");
    }
    if (cfg.compare_methods.empty()) {
        cfg.compare_methods = uses_ap_selection(cfg.objective.objective_case)
                                  ? std::vector<BaselineMethod>{BaselineMethod::kUcrApsel,
                                                                BaselineMethod::kUcApsel}
                                  : std::vector<BaselineMethod>{BaselineMethod::kUserKmeans,
                                                                BaselineMethod::kApGmm,
                                                                BaselineMethod::kGraphSpectral};
    }

    if (j.contains("eval")) {
        const auto& e = j.at("eval");
        cfg.eval.n_draws = get_or(e, "n_draws", cfg.eval.n_draws);
        cfg.eval.n_eval_episodes = get_or(e, "n_eval_episodes", cfg.eval.n_eval_episodes);
        cfg.eval.n_seeds = get_or(e, "n_seeds", cfg.eval.n_seeds);
    }

    cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir);
    cfg.checkpoint_every = get_or(j, "checkpoint_every", cfg.checkpoint_every);
    cfg.reward_draws = get_or(j, "reward_draws", cfg.reward_draws);

    if (const char* env_dir = std::getenv("C2F_OUTPUT_DIR"); env_dir != nullptr && *env_dir != '\0')
        cfg.output_dir = env_dir;

    cfg.validate();
    return cfg;
}

// Parse a JSON file; parse errors are reported with line/column context.
inline nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    try {
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("parse error in '" + path + "' at line " + std::to_string(line) +
                          ", column " + std::to_string(col) + ": " + e.what());
    }
}

inline ExperimentConfig load_config_file(const std::string& path) {
    return config_from_json(load_json_file(path));
}

// Re-key every component stream off a new master seed.
inline void set_master_seed(ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.seed = seed;
    cfg.scenario.seed = derive_seed(seed, "scenario");
}

}  // namespace c2f
