#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "c2f/config.hpp"
#include "c2f/env.hpp"

namespace c2f::harness {

namespace fs = std::filesystem;
using nlohmann::json;

// Full-precision decimal so CSV rows survive a round trip.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string metrics_csv_row(const MetricsRecord& r) {
    std::string row;
    row += std::to_string(r.t);
    row += ',' + fmt(r.r_sum) + ',' + fmt(r.rho) + ',' + fmt(r.rho_u) + ',' + fmt(r.rho_b);
    row += ',' + std::to_string(r.c_max);
    row += ',' + fmt(r.p_tot) + ',' + fmt(r.eta_ee);
    row += ',' + std::string(r.feasible ? "1" : "0");
    row += ',' + std::to_string(r.handovers);
    row += ',' + fmt(r.reward);
    return row;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

inline json agent_config_to_json(const AgentConfig& a) {
    return json{{"lr_actor", a.lr_actor},
                {"lr_critic", a.lr_critic},
                {"soft_update", a.soft_update},
                {"discount", a.discount},
                {"sigma_max", a.sigma_max},
                {"sigma_min", a.sigma_min},
                {"sigma_decay", a.sigma_decay},
                {"batch", a.batch_size},
                {"capacity", a.buffer_capacity},
                {"episodes", a.episodes},
                {"actor_hidden", a.actor_hidden},
                {"critic_hidden", a.critic_hidden},
                {"adam_beta1", a.adam_beta1},
                {"adam_beta2", a.adam_beta2},
                {"adam_eps", a.adam_eps},
                {"gamma_db_min", a.gamma_db_min},
                {"gamma_db_max", a.gamma_db_max},
                {"actor_final_scale", a.actor_final_scale}};
}

inline AgentConfig agent_config_from_json(const json& j) {
    AgentConfig a;
    a.lr_actor = j.at("lr_actor");
    a.lr_critic = j.at("lr_critic");
    a.soft_update = j.at("soft_update");
    a.discount = j.at("discount");
    a.sigma_max = j.at("sigma_max");
    a.sigma_min = j.at("sigma_min");
    a.sigma_decay = j.at("sigma_decay");
    a.batch_size = j.at("batch");
    a.buffer_capacity = j.at("capacity");
    a.episodes = j.at("episodes");
    a.actor_hidden = j.at("actor_hidden").get<std::vector<int>>();
    a.critic_hidden = j.at("critic_hidden").get<std::vector<int>>();
    a.adam_beta1 = j.at("adam_beta1");
    a.adam_beta2 = j.at("adam_beta2");
    a.adam_eps = j.at("adam_eps");
    a.gamma_db_min = j.at("gamma_db_min");
    a.gamma_db_max = j.at("gamma_db_max");
    a.actor_final_scale = j.at("actor_final_scale");
    return a;
}

inline json replay_to_json(const ReplayBuffer& buffer) {
    json j;
    j["capacity"] = buffer.capacity();
    json entries = json::array();
    for (size_t i = 0; i < buffer.size(); ++i) {
        const Experience& e = buffer.chronological(i);
        entries.push_back(json{{"s", std::vector<double>(e.state.begin(), e.state.end())},
                               {"a", std::vector<double>(e.action.begin(), e.action.end())},
                               {"r", e.reward},
                               {"n", std::vector<double>(e.next_state.begin(), e.next_state.end())}});
    }
    j["entries"] = std::move(entries);
    return j;
}

inline ReplayBuffer replay_from_json(const json& j) {
    ReplayBuffer buffer(j.at("capacity").get<size_t>());
    for (const auto& je : j.at("entries")) {
        Experience e;
        const auto s = je.at("s").get<std::vector<double>>();
        const auto a = je.at("a").get<std::vector<double>>();
        const auto n = je.at("n").get<std::vector<double>>();
        e.state = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
        e.action = Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
        e.next_state = Eigen::Map<const Eigen::VectorXd>(n.data(), static_cast<Eigen::Index>(n.size()));
        e.reward = je.at("r");
        buffer.insert(std::move(e));
    }
    return buffer;
}

// Top level carries the actor (layer_sizes/weights/biases/activation), so a
// checkpoint doubles as a plain policy file; the rest enables exact resume.
inline json checkpoint_to_json(const TrainerState& st, const AgentConfig& agent, std::uint64_t seed) {
    json j = mlp_to_json<json>(st.actor);
    j["agent_config"] = agent_config_to_json(agent);
    j["episodes_trained"] = st.episodes_done;
    j["seed"] = seed;
    j["critic"] = mlp_to_json<json>(st.critic);
    j["target_actor"] = mlp_to_json<json>(st.target_actor);
    j["target_critic"] = mlp_to_json<json>(st.target_critic);
    j["adam_actor"] = adam_to_json<json>(st.adam_actor);
    j["adam_critic"] = adam_to_json<json>(st.adam_critic);
    j["replay"] = replay_to_json(st.buffer);
    return j;
}

struct Checkpoint {
    TrainerState state;
    AgentConfig agent;
    std::uint64_t seed = 0;
};

inline Checkpoint checkpoint_from_json(const json& j) {
    Checkpoint c;
    c.state.actor = mlp_from_json<json>(j);
    c.state.critic = mlp_from_json<json>(j.at("critic"));
    c.state.target_actor = mlp_from_json<json>(j.at("target_actor"));
    c.state.target_critic = mlp_from_json<json>(j.at("target_critic"));
    c.state.adam_actor = adam_from_json<json>(j.at("adam_actor"));
    c.state.adam_critic = adam_from_json<json>(j.at("adam_critic"));
    c.state.buffer = replay_from_json(j.at("replay"));
    c.state.episodes_done = j.at("episodes_trained");
    c.agent = agent_config_from_json(j.at("agent_config"));
    c.seed = j.at("seed");
    return c;
}

inline void save_checkpoint(const fs::path& path, const TrainerState& st, const AgentConfig& agent,
                            std::uint64_t seed) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write checkpoint '" + path.string() + "'");
    out << checkpoint_to_json(st, agent, seed);
}

inline Checkpoint load_checkpoint(const fs::path& path) {
    return checkpoint_from_json(load_json_file(path.string()));
}

// Inference needs only the top-level actor keys.
inline Mlp load_actor(const fs::path& path) { return mlp_from_json<json>(load_json_file(path.string())); }

// ---------------------------------------------------------------------------
// Shared run plumbing
// ---------------------------------------------------------------------------

inline bool objective_has_weight(const ExperimentConfig& cfg) {
    return uses_ap_selection(cfg.objective.objective_case);
}

inline int expected_action_dim(const ExperimentConfig& cfg) {
    return action_dim(cfg.scenario.num_subnetworks, objective_has_weight(cfg));
}

inline int expected_state_dim(const ExperimentConfig& cfg) {
    return cfg.scenario.num_aps + expected_action_dim(cfg);
}

inline void check_actor_widths(const Mlp& actor, const ExperimentConfig& cfg) {
    if (actor.input_size() != expected_state_dim(cfg) || actor.output_size() != expected_action_dim(cfg))
        throw ConfigError("checkpoint/config width mismatch: actor is " +
                          std::to_string(actor.input_size()) + "->" + std::to_string(actor.output_size()) +
                          ", config expects " + std::to_string(expected_state_dim(cfg)) + "->" +
                          std::to_string(expected_action_dim(cfg)) + " (L=" +
                          std::to_string(cfg.scenario.num_aps) + ", |A|=" +
                          std::to_string(expected_action_dim(cfg)) + ")");
}

struct TrainRun {
    TrainerState state;
    std::vector<EpisodeLogRow> log;  // full history including pre-resume rows
};

// Train (or resume) one agent, streaming the episode log and rolling
// checkpoint into output_dir.
inline TrainRun run_training(const ExperimentConfig& cfg, bool resume) {
    fs::create_directories(cfg.output_dir);
    const fs::path ckpt_path = fs::path(cfg.output_dir) / "checkpoint.json";
    const fs::path log_path = fs::path(cfg.output_dir) / "training_log.csv";

    TrainRun run;
    if (resume && fs::exists(ckpt_path)) {
        Checkpoint c = load_checkpoint(ckpt_path);
        run.state = std::move(c.state);
        check_actor_widths(run.state.actor, cfg);
    } else {
        Rng init_rng(derive_seed(cfg.seed, "agent_init"));
        run.state = init_trainer(cfg.agent, expected_state_dim(cfg), expected_action_dim(cfg), init_rng);
    }

    const bool fresh = run.state.episodes_done == 0;
    std::ofstream log(log_path, fresh ? std::ios::trunc : std::ios::app);
    if (!log) throw ConfigError("cannot write training log '" + log_path.string() + "'");
    if (fresh) log << "episode,mean_reward,sigma,buffer_fill\n";

    auto env_factory = [&cfg](long e) {
        return OwnedTapeEnv(
            make_tape(cfg.scenario, derive_seed(cfg.scenario.seed, "episode", static_cast<std::uint64_t>(e))),
            &cfg.scenario, &cfg.objective, &cfg.energy, &cfg.agent, cfg.reward_draws);
    };
    auto on_episode = [&](const EpisodeLogRow& row, const TrainerState& st) {
        log << row.episode << ',' << fmt(row.mean_reward) << ',' << fmt(row.sigma) << ','
            << row.buffer_fill << '\n';
        log.flush();
        if ((row.episode + 1) % cfg.checkpoint_every == 0 && row.episode + 1 < cfg.agent.episodes)
            save_checkpoint(ckpt_path, st, cfg.agent, cfg.seed);
    };

    run.log = train(run.state, cfg.agent, env_factory, cfg.seed, cfg.agent.episodes, on_episode);
    save_checkpoint(ckpt_path, run.state, cfg.agent, cfg.seed);
    return run;
}

struct EvalAggregate {
    long intervals = 0;
    double mean_reward = 0.0;
    double mean_r_sum = 0.0;
    double mean_rho = 0.0;
    double mean_rho_u = 0.0;
    double mean_rho_b = 0.0;
    double mean_c_max = 0.0;
    double mean_p_tot = 0.0;
    double mean_eta_ee = 0.0;
    double feasible_frac = 0.0;
    long handovers_total = 0;
};

inline EvalAggregate aggregate_records(const std::vector<MetricsRecord>& records) {
    EvalAggregate a;
    a.intervals = static_cast<long>(records.size());
    if (records.empty()) return a;
    for (const auto& r : records) {
        a.mean_reward += r.reward;
        a.mean_r_sum += r.r_sum;
        a.mean_rho += r.rho;
        a.mean_rho_u += r.rho_u;
        a.mean_rho_b += r.rho_b;
        a.mean_c_max += static_cast<double>(r.c_max);
        a.mean_p_tot += r.p_tot;
        a.mean_eta_ee += r.eta_ee;
        a.feasible_frac += r.feasible ? 1.0 : 0.0;
        a.handovers_total += r.handovers;
    }
    const auto n = static_cast<double>(records.size());
    a.mean_reward /= n;
    a.mean_r_sum /= n;
    a.mean_rho /= n;
    a.mean_rho_u /= n;
    a.mean_rho_b /= n;
    a.mean_c_max /= n;
    a.mean_p_tot /= n;
    a.mean_eta_ee /= n;
    a.feasible_frac /= n;
    return a;
}

inline std::string aggregate_csv_fields(const EvalAggregate& a) {
    return std::to_string(a.intervals) + ',' + fmt(a.mean_reward) + ',' + fmt(a.mean_r_sum) + ',' +
           fmt(a.mean_rho) + ',' + fmt(a.mean_rho_u) + ',' + fmt(a.mean_rho_b) + ',' +
           fmt(a.mean_c_max) + ',' + fmt(a.mean_p_tot) + ',' + fmt(a.mean_eta_ee) + ',' +
           fmt(a.feasible_frac) + ',' + std::to_string(a.handovers_total);
}

inline const char* kAggregateHeader =
    "intervals,mean_reward,mean_r_sum,mean_rho,mean_rho_u,mean_rho_b,mean_c_max,mean_p_tot,"
    "mean_eta_ee,feasible_frac,handovers_total";

struct EvalResult {
    std::vector<std::vector<MetricsRecord>> episodes;
    EvalAggregate pooled;
};

// Roll the frozen policy over n fresh eval tapes, write per-interval rows and
// per-episode aggregates.
inline EvalResult run_eval(const ExperimentConfig& cfg, const Mlp& actor) {
    check_actor_widths(actor, cfg);
    fs::create_directories(cfg.output_dir);
    std::ofstream intervals(fs::path(cfg.output_dir) / "eval_intervals.csv");
    std::ofstream episodes(fs::path(cfg.output_dir) / "eval_episodes.csv");
    intervals << "episode," << MetricsRecord::csv_header() << '\n';
    episodes << "episode," << kAggregateHeader << '\n';

    const std::uint64_t eval_seed = derive_seed(cfg.seed, "eval");
    const bool has_weight = objective_has_weight(cfg);

    EvalResult result;
    std::vector<MetricsRecord> pooled;
    for (int i = 0; i < cfg.eval.n_eval_episodes; ++i) {
        const EpisodeTape tape =
            make_tape(cfg.scenario, derive_seed(eval_seed, "episode", static_cast<std::uint64_t>(i)));
        PolicyPartitioner policy(&actor, &cfg.scenario, &cfg.agent, has_weight);
        auto records = roll_tape(tape, cfg.scenario, cfg.objective, cfg.energy, cfg.eval.n_draws, policy);
        for (const auto& r : records) intervals << i << ',' << metrics_csv_row(r) << '\n';
        episodes << i << ',' << aggregate_csv_fields(aggregate_records(records)) << '\n';
        pooled.insert(pooled.end(), records.begin(), records.end());
        result.episodes.push_back(std::move(records));
    }
    result.pooled = aggregate_records(pooled);
    return result;
}

// ---------------------------------------------------------------------------
// Commands (return process exit codes)
// ---------------------------------------------------------------------------

inline int cmd_train(const std::string& config_path, bool resume) {
    const ExperimentConfig cfg = load_config_file(config_path);
    run_training(cfg, resume);
    return 0;
}

inline int cmd_eval(const std::string& config_path, const std::string& checkpoint_path) {
    const ExperimentConfig cfg = load_config_file(config_path);
    const Mlp actor = load_actor(checkpoint_path);
    run_eval(cfg, actor);
    return 0;
}

// Evaluate the trained policy and every configured baseline on identical
// frozen tapes; one row per (method, episode).
inline int cmd_compare(const std::string& config_path, const std::string& checkpoint_override = "") {
    const ExperimentConfig cfg = load_config_file(config_path);
    std::string ckpt = !checkpoint_override.empty() ? checkpoint_override : cfg.compare_checkpoint;
    if (ckpt.empty()) ckpt = (fs::path(cfg.output_dir) / "checkpoint.json").string();
    const Mlp actor = load_actor(ckpt);
    check_actor_widths(actor, cfg);

    fs::create_directories(cfg.output_dir);
    std::ofstream out(fs::path(cfg.output_dir) / "compare.csv");
    out << "method,episode,tape_hash," << kAggregateHeader << '\n';

    const std::uint64_t eval_seed = derive_seed(cfg.seed, "eval");
    const bool has_weight = objective_has_weight(cfg);

    for (int i = 0; i < cfg.eval.n_eval_episodes; ++i) {
        const EpisodeTape tape =
            make_tape(cfg.scenario, derive_seed(eval_seed, "episode", static_cast<std::uint64_t>(i)));
        const std::uint64_t tape_hash_value = hash_tape(tape);

        auto emit = [&](const std::string& name, const std::vector<MetricsRecord>& records) {
            out << name << ',' << i << ',' << tape_hash_value << ','
                << aggregate_csv_fields(aggregate_records(records)) << '\n';
        };

        PolicyPartitioner policy(&actor, &cfg.scenario, &cfg.agent, has_weight);
        emit("DDPG_C2F",
             roll_tape(tape, cfg.scenario, cfg.objective, cfg.energy, cfg.eval.n_draws, policy));

        for (const BaselineMethod method : cfg.compare_methods) {
            BaselineConfig bl = cfg.baseline;
            bl.method = method;
            auto fn = [&](const NetworkState& state, int) {
                return run_baseline(state, cfg.scenario.num_subnetworks, bl);
            };
            emit(to_string(method),
                 roll_tape(tape, cfg.scenario, cfg.objective, cfg.energy, cfg.eval.n_draws, fn));
        }

        if (cfg.compare_random_anchor) {
            RandomAnchorPartitioner random_policy(&cfg.scenario, has_weight,
                                                  derive_seed(eval_seed, "random", static_cast<std::uint64_t>(i)));
            emit("RANDOM_ANCHOR", roll_tape(tape, cfg.scenario, cfg.objective, cfg.energy,
                                            cfg.eval.n_draws, random_policy));
        }
    }
    return 0;
}

// Grid keys accepted by `sweep`, mapping dotted names onto config JSON paths.
inline const std::vector<std::string>& sweep_keys() {
    static const std::vector<std::string> keys = {
        "seed",
        "scenario.K", "scenario.L", "scenario.M", "scenario.T", "scenario.v_max",
        "scenario.area_side", "scenario.alpha", "scenario.sigma_sh_db",
        "scenario.dynamic_users", "scenario.k_change_max",
        "objective.case", "objective.r_th", "objective.reward_scale",
        "agent.lr_actor", "agent.lr_critic", "agent.soft_update", "agent.discount",
        "agent.sigma_max", "agent.sigma_min", "agent.sigma_decay", "agent.batch",
        "agent.capacity", "agent.episodes",
        "baseline.ap_selection_ratio",
        "energy.p_tx", "energy.tau", "energy.p_c", "energy.p_fix", "energy.p_b",
    };
    return keys;
}

struct SweepRow {
    size_t cell = 0;
    std::vector<std::string> values;  // one per swept key, in key order
    double train_mean_reward_tail = 0.0;  // mean over the last 10% of episodes
    EvalAggregate eval;
};

namespace detail_sweep {

inline std::string value_as_string(const json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
}

inline SweepRow run_cell(json base, const std::vector<std::string>& keys,
                         const std::vector<json>& values, size_t cell_index,
                         const std::string& cell_dir, int n_seeds) {
    for (size_t i = 0; i < keys.size(); ++i) {
        std::string pointer = "/" + keys[i];
        std::replace(pointer.begin(), pointer.end(), '.', '/');
        base[json::json_pointer(pointer)] = values[i];
    }

    SweepRow row;
    row.cell = cell_index;
    for (const auto& v : values) row.values.push_back(value_as_string(v));

    double tail_sum = 0.0;
    std::vector<MetricsRecord> pooled;
    ExperimentConfig cell_cfg = config_from_json(base);
    const std::uint64_t base_seed = cell_cfg.seed;
    for (int rep = 0; rep < n_seeds; ++rep) {
        ExperimentConfig cfg = cell_cfg;
        set_master_seed(cfg, base_seed + static_cast<std::uint64_t>(rep));
        cfg.output_dir = cell_dir + "/rep_" + std::to_string(rep);
        const TrainRun run = run_training(cfg, false);

        const size_t tail = std::max<size_t>(1, run.log.size() / 10);
        double mean_tail = 0.0;
        for (size_t i = run.log.size() - tail; i < run.log.size(); ++i)
            mean_tail += run.log[i].mean_reward;
        tail_sum += mean_tail / static_cast<double>(tail);

        const EvalResult eval = run_eval(cfg, run.state.actor);
        for (const auto& ep : eval.episodes) pooled.insert(pooled.end(), ep.begin(), ep.end());
    }
    row.train_mean_reward_tail = tail_sum / static_cast<double>(n_seeds);
    row.eval = aggregate_records(pooled);
    return row;
}

}  // namespace detail_sweep

// Cartesian sweep over named config keys; one training + evaluation per cell
// (times eval.n_seeds replicates), aggregated into sweep.csv.
inline int cmd_sweep(const std::string& config_path, const std::string& grid_path, int jobs = 1) {
    const json base = load_json_file(config_path);
    const ExperimentConfig base_cfg = config_from_json(base);  // early validation
    const json grid = load_json_file(grid_path);
    if (!grid.is_object()) throw ConfigError("grid file must be a JSON object of key -> [values]");

    std::vector<std::string> keys;
    std::vector<std::vector<json>> axes;
    for (const auto& [key, values] : grid.items()) {
        const auto& valid = sweep_keys();
        if (std::find(valid.begin(), valid.end(), key) == valid.end()) {
            std::string msg = "sweep: unknown key '" + key + "'; valid keys:";
            for (const auto& k : valid) msg += ' ' + k;
            throw ConfigError(msg);
        }
        keys.push_back(key);
        std::vector<json> axis;
        if (values.is_array())
            for (const auto& v : values) axis.push_back(v);
        else
            axis.push_back(values);
        if (axis.empty()) throw ConfigError("sweep: key '" + key + "' has no values");
        axes.push_back(std::move(axis));
    }

    size_t n_cells = 1;
    for (const auto& axis : axes) n_cells *= axis.size();

    fs::create_directories(base_cfg.output_dir);

    std::vector<std::future<SweepRow>> futures;
    std::vector<SweepRow> rows(n_cells);
    std::vector<size_t> pending;
    for (size_t cell = 0; cell < n_cells; ++cell) pending.push_back(cell);

    auto values_for_cell = [&](size_t cell) {
        std::vector<json> values(keys.size());
        size_t rest = cell;
        for (size_t i = keys.size(); i-- > 0;) {
            values[i] = axes[i][rest % axes[i].size()];
            rest /= axes[i].size();
        }
        return values;
    };
    auto launch = [&](size_t cell) {
        return std::async(jobs > 1 ? std::launch::async : std::launch::deferred, [&, cell]() {
            return detail_sweep::run_cell(base, keys, values_for_cell(cell), cell,
                                          base_cfg.output_dir + "/cell_" + std::to_string(cell),
                                          base_cfg.eval.n_seeds);
        });
    };

    size_t next = 0;
    std::vector<std::pair<size_t, std::future<SweepRow>>> in_flight;
    const size_t max_parallel = std::max(1, jobs);
    while (next < n_cells || !in_flight.empty()) {
        while (next < n_cells && in_flight.size() < max_parallel) {
            in_flight.emplace_back(next, launch(next));
            ++next;
        }
        auto& [cell, fut] = in_flight.front();
        rows[cell] = fut.get();
        in_flight.erase(in_flight.begin());
    }

    std::ofstream out(fs::path(base_cfg.output_dir) / "sweep.csv");
    out << "cell";
    for (const auto& k : keys) out << ',' << k;
    out << ",train_mean_reward_tail," << kAggregateHeader << '\n';
    for (const auto& row : rows) {
        out << row.cell;
        for (const auto& v : row.values) out << ',' << v;
        out << ',' << fmt(row.train_mean_reward_tail) << ',' << aggregate_csv_fields(row.eval) << '\n';
    }
    return 0;
}

}  // namespace c2f::harness
