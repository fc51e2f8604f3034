#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "c2f/errors.hpp"
#include "c2f/mlp.hpp"
#include "c2f/partition.hpp"
#include "c2f/rng.hpp"

namespace c2f {

struct AgentConfig {
    double lr_actor = 1e-4;
    double lr_critic = 1e-3;
    double soft_update = 1e-3;  // delta
    double discount = 0.99;     // zeta
    double sigma_max = 0.25;
    double sigma_min = 0.001;
    double sigma_decay = 1e-4;  // kappa
    int batch_size = 128;
    int buffer_capacity = 10000;
    int episodes = 4000;
    std::vector<int> actor_hidden = {256, 128};
    std::vector<int> critic_hidden = {512, 256, 128};
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    // State normalization bounds for the large-scale fading features (dB).
    double gamma_db_min = -140.0;
    double gamma_db_max = -40.0;
    double actor_final_scale = 1e-3;

    void validate() const {
        if (lr_actor <= 0.0 || lr_critic <= 0.0) throw ConfigError("agent: learning rates must be > 0");
        if (soft_update <= 0.0 || soft_update > 1.0) throw ConfigError("agent: soft_update must be in (0, 1]");
        if (discount <= 0.0 || discount >= 1.0) throw ConfigError("agent: discount must be in (0, 1)");
        if (sigma_min > sigma_max) throw ConfigError("agent: sigma_min must be <= sigma_max");
        if (sigma_decay < 0.0) throw ConfigError("agent: sigma decay must be >= 0");
        if (batch_size < 1 || buffer_capacity < batch_size)
            throw ConfigError("agent: need batch_size >= 1 and buffer capacity >= batch_size");
        if (episodes < 1) throw ConfigError("agent: episodes must be >= 1");
        if (gamma_db_max <= gamma_db_min) throw ConfigError("agent: bad state normalization bounds");
    }

    AdamConfig actor_adam() const { return {lr_actor, adam_beta1, adam_beta2, adam_eps}; }
    AdamConfig critic_adam() const { return {lr_critic, adam_beta1, adam_beta2, adam_eps}; }
};

inline int action_dim(int num_subnetworks, bool has_weight) {
    return (has_weight ? 3 : 2) * num_subnetworks;
}

// State vector of Eq.-style layout: L normalized channel features followed by
// the previous anchors' normalized features. Fading goes to dB, is clipped to
// the configured window and mapped affinely onto [0, 1].
inline Eigen::VectorXd encode_state(const Eigen::VectorXd& channel_feature, const AnchorSet& prev_anchors,
                                    const AgentConfig& cfg, double area_side) {
    const int num_aps = static_cast<int>(channel_feature.size());
    const int per_anchor = prev_anchors.has_weight ? 3 : 2;
    Eigen::VectorXd s(num_aps + per_anchor * prev_anchors.size());
    const double span = cfg.gamma_db_max - cfg.gamma_db_min;
    for (int l = 0; l < num_aps; ++l) {
        const double db = 20.0 * std::log10(channel_feature(l));
        s(l) = std::clamp((db - cfg.gamma_db_min) / span, 0.0, 1.0);
    }
    for (int m = 0; m < prev_anchors.size(); ++m) {
        const auto& a = prev_anchors.anchors[static_cast<size_t>(m)];
        s(num_aps + per_anchor * m) = a.x / area_side;
        s(num_aps + per_anchor * m + 1) = a.y / area_side;
        if (prev_anchors.has_weight) s(num_aps + per_anchor * m + 2) = a.weight;
    }
    return s;
}

// Map a [0,1]^{|A|} action onto anchor features. Weights are clamped into
// [0.01, 0.99] to respect the open-interval activation ratio.
inline AnchorSet decode_action(const Eigen::VectorXd& action, int num_subnetworks, bool has_weight,
                               double area_side) {
    const int per_anchor = has_weight ? 3 : 2;
    if (action.size() != per_anchor * num_subnetworks)
        throw ConfigError("decode_action: expected action of length " +
                          std::to_string(per_anchor * num_subnetworks) + ", got " +
                          std::to_string(action.size()));
    AnchorSet anchors;
    anchors.has_weight = has_weight;
    anchors.anchors.resize(static_cast<size_t>(num_subnetworks));
    for (int m = 0; m < num_subnetworks; ++m) {
        auto& a = anchors.anchors[static_cast<size_t>(m)];
        a.x = action(per_anchor * m) * area_side;
        a.y = action(per_anchor * m + 1) * area_side;
        a.weight = has_weight ? std::clamp(action(per_anchor * m + 2), 0.01, 0.99) : 1.0;
    }
    return anchors;
}

// Anchor features fed as o^(0): a uniform grid over the area, weights 0.5.
inline AnchorSet initial_anchors(int num_subnetworks, bool has_weight, double area_side) {
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(num_subnetworks))));
    const int rows = (num_subnetworks + cols - 1) / cols;
    AnchorSet anchors;
    anchors.has_weight = has_weight;
    anchors.anchors.resize(static_cast<size_t>(num_subnetworks));
    for (int m = 0; m < num_subnetworks; ++m) {
        auto& a = anchors.anchors[static_cast<size_t>(m)];
        a.x = (m % cols + 0.5) / static_cast<double>(cols) * area_side;
        a.y = (m / cols + 0.5) / static_cast<double>(rows) * area_side;
        a.weight = has_weight ? 0.5 : 1.0;
    }
    return anchors;
}

struct Experience {
    Eigen::VectorXd state;
    Eigen::VectorXd action;
    double reward = 0.0;
    Eigen::VectorXd next_state;
};

// Fixed-capacity FIFO experience store with uniform without-replacement
// mini-batch sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity) : capacity_(capacity) { data_.reserve(capacity); }

    size_t capacity() const { return capacity_; }
    size_t size() const { return data_.size(); }

    void insert(Experience e) {
        if (data_.size() < capacity_) {
            data_.push_back(std::move(e));
        } else {
            data_[cursor_] = std::move(e);
            cursor_ = (cursor_ + 1) % capacity_;
        }
    }

    // i-th entry in insertion order (0 = oldest surviving).
    const Experience& chronological(size_t i) const {
        return data_.size() < capacity_ ? data_[i] : data_[(cursor_ + i) % capacity_];
    }

    const Experience& operator[](size_t i) const { return data_[i]; }

    // Robert Floyd's sampling: batch distinct storage indices.
    std::vector<size_t> sample_indices(size_t batch, Rng& rng) const {
        std::vector<size_t> picked;
        picked.reserve(batch);
        for (size_t j = size() - batch; j < size(); ++j) {
            const auto t = static_cast<size_t>(rng.uniform_int(0, static_cast<long>(j)));
            if (std::find(picked.begin(), picked.end(), t) == picked.end())
                picked.push_back(t);
            else
                picked.push_back(j);
        }
        return picked;
    }

private:
    size_t capacity_;
    size_t cursor_ = 0;
    std::vector<Experience> data_;
};

inline double noise_std(long episode, const AgentConfig& cfg) {
    return std::max(cfg.sigma_max - cfg.sigma_decay * static_cast<double>(episode), cfg.sigma_min);
}

// Deterministic policy output plus i.i.d. Gaussian exploration noise, clipped
// into the unit cube.
inline Eigen::VectorXd select_action(const Mlp& actor, const Eigen::VectorXd& state, double sigma,
                                     Rng& rng) {
    Eigen::VectorXd a = actor.forward(state);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        a(i) = std::clamp(a(i) + rng.normal(0.0, sigma), 0.0, 1.0);
    return a;
}

// Batched TD target y_i = r_i + zeta * Q'(s'_i, pi'(s'_i)).
inline Eigen::VectorXd td_target(const Eigen::MatrixXd& next_states, const Eigen::VectorXd& rewards,
                                 const Mlp& target_actor, const Mlp& target_critic, double discount) {
    Eigen::MatrixXd next_actions = target_actor.forward(next_states);
    Eigen::MatrixXd input(next_states.rows() + next_actions.rows(), next_states.cols());
    input << next_states, next_actions;
    const Eigen::MatrixXd q = target_critic.forward(input);
    return rewards + discount * q.transpose();
}

// Gradients of the critic loss L = (1/B) sum_i (y_i - Q(s_i, a_i))^2.
inline Mlp::Gradients critic_gradients(const Mlp& critic, const Eigen::MatrixXd& states,
                                       const Eigen::MatrixXd& actions, const Eigen::VectorXd& targets,
                                       double* loss_out = nullptr) {
    const auto batch = static_cast<double>(states.cols());
    Eigen::MatrixXd input(states.rows() + actions.rows(), states.cols());
    input << states, actions;

    Mlp::Cache cache;
    const Eigen::MatrixXd q = critic.forward(input, &cache);
    const Eigen::RowVectorXd diff = q.row(0) - targets.transpose();
    if (loss_out) *loss_out = diff.squaredNorm() / batch;

    const Eigen::MatrixXd grad_out = (2.0 / batch) * diff;
    return critic.backward(cache, grad_out);
}

// One Adam descent step on the critic's mean squared TD error; returns the
// pre-update loss.
inline double critic_update(Mlp& critic, AdamState& adam, const AgentConfig& cfg,
                            const Eigen::MatrixXd& states, const Eigen::MatrixXd& actions,
                            const Eigen::VectorXd& targets) {
    double loss = 0.0;
    const Mlp::Gradients grads = critic_gradients(critic, states, actions, targets, &loss);
    adam_step(critic, grads, adam, cfg.critic_adam());
    return loss;
}

// Gradients of -J with J = (1/B) sum_i Q(s_i, pi(s_i)): the chain runs through
// the critic's action input; critic parameters are read, never written.
inline Mlp::Gradients actor_gradients(const Mlp& actor, const Mlp& critic,
                                      const Eigen::MatrixXd& states, double* mean_q_out = nullptr) {
    const auto batch = static_cast<double>(states.cols());

    Mlp::Cache actor_cache;
    const Eigen::MatrixXd actions = actor.forward(states, &actor_cache);
    Eigen::MatrixXd input(states.rows() + actions.rows(), states.cols());
    input << states, actions;

    Mlp::Cache critic_cache;
    const Eigen::MatrixXd q = critic.forward(input, &critic_cache);
    if (mean_q_out) *mean_q_out = q.mean();

    // Descend on -J so the shared Adam step ascends on J.
    const Eigen::MatrixXd grad_q = Eigen::MatrixXd::Constant(1, states.cols(), -1.0 / batch);
    const Mlp::Gradients critic_grads = critic.backward(critic_cache, grad_q);
    const Eigen::MatrixXd grad_actions = critic_grads.input.bottomRows(actions.rows());
    return actor.backward(actor_cache, grad_actions);
}

// One Adam ascent step on J; returns the pre-update objective estimate.
inline double actor_update(Mlp& actor, const Mlp& critic, AdamState& adam, const AgentConfig& cfg,
                           const Eigen::MatrixXd& states) {
    double mean_q = 0.0;
    const Mlp::Gradients grads = actor_gradients(actor, critic, states, &mean_q);
    adam_step(actor, grads, adam, cfg.actor_adam());
    return mean_q;
}

// Everything a training run owns; checkpointable for exact resume.
struct TrainerState {
    Mlp actor, critic;
    Mlp target_actor, target_critic;
    AdamState adam_actor, adam_critic;
    ReplayBuffer buffer{1};
    long episodes_done = 0;
};

inline TrainerState init_trainer(const AgentConfig& cfg, int state_dim, int act_dim, Rng& rng) {
    TrainerState st;
    std::vector<int> actor_sizes{state_dim};
    actor_sizes.insert(actor_sizes.end(), cfg.actor_hidden.begin(), cfg.actor_hidden.end());
    actor_sizes.push_back(act_dim);
    st.actor = Mlp::create(actor_sizes, Activation::kSigmoid, rng, cfg.actor_final_scale);

    std::vector<int> critic_sizes{state_dim + act_dim};
    critic_sizes.insert(critic_sizes.end(), cfg.critic_hidden.begin(), cfg.critic_hidden.end());
    critic_sizes.push_back(1);
    st.critic = Mlp::create(critic_sizes, Activation::kIdentity, rng);

    st.target_actor = st.actor;
    st.target_critic = st.critic;
    st.adam_actor = AdamState::like(st.actor);
    st.adam_critic = AdamState::like(st.critic);
    st.buffer = ReplayBuffer(static_cast<size_t>(cfg.buffer_capacity));
    return st;
}

struct EpisodeLogRow {
    long episode = 0;       // 0-based
    double mean_reward = 0.0;  // mean physical (unscaled) reward over the episode
    double sigma = 0.0;
    long buffer_fill = 0;
};

// One mini-batch update cycle: sample, TD target, critic step, actor step,
// Polyak soft update of both targets.
inline void train_step(TrainerState& st, const AgentConfig& cfg, Rng& sample_rng) {
    const auto batch = static_cast<size_t>(cfg.batch_size);
    const auto idx = st.buffer.sample_indices(batch, sample_rng);
    const auto state_dim = st.buffer[0].state.size();
    const auto act_dim = st.buffer[0].action.size();

    Eigen::MatrixXd states(state_dim, batch), actions(act_dim, batch), next_states(state_dim, batch);
    Eigen::VectorXd rewards(batch);
    for (size_t i = 0; i < batch; ++i) {
        const Experience& e = st.buffer[idx[i]];
        states.col(static_cast<Eigen::Index>(i)) = e.state;
        actions.col(static_cast<Eigen::Index>(i)) = e.action;
        next_states.col(static_cast<Eigen::Index>(i)) = e.next_state;
        rewards(static_cast<Eigen::Index>(i)) = e.reward;
    }

    const Eigen::VectorXd targets =
        td_target(next_states, rewards, st.target_actor, st.target_critic, cfg.discount);
    critic_update(st.critic, st.adam_critic, cfg, states, actions, targets);
    actor_update(st.actor, st.critic, st.adam_actor, cfg, states);
    polyak_update(st.actor, st.target_actor, cfg.soft_update);
    polyak_update(st.critic, st.target_critic, cfg.soft_update);
}

// Training loop over episodes. EnvFactory(episode_index) must return an
// environment with reset() -> state and step(action) -> {agent_reward,
// next_state, record, done}; episodes run until step() reports done.
//
// Randomness discipline: exploration noise and batch sampling use per-episode
// sub-streams of the master seed, so a resumed run consumes exactly the same
// streams as an uninterrupted one.
template <typename EnvFactory,
          typename Callback = std::function<void(const EpisodeLogRow&, const TrainerState&)>>
std::vector<EpisodeLogRow> train(TrainerState& st, const AgentConfig& cfg, EnvFactory&& make_env,
                                 std::uint64_t master_seed, long episodes_target,
                                 Callback&& on_episode = [](const EpisodeLogRow&, const TrainerState&) {}) {
    std::vector<EpisodeLogRow> log;
    for (long e = st.episodes_done; e < episodes_target; ++e) {
        const double sigma = noise_std(e, cfg);
        auto env = make_env(e);
        Rng noise_rng(derive_seed(master_seed, "noise", static_cast<std::uint64_t>(e)));
        Rng sample_rng(derive_seed(master_seed, "sample", static_cast<std::uint64_t>(e)));

        Eigen::VectorXd state = env.reset();
        double reward_sum = 0.0;
        long steps = 0;
        bool done = false;
        while (!done) {
            const Eigen::VectorXd action = select_action(st.actor, state, sigma, noise_rng);
            auto out = env.step(action);
            st.buffer.insert({state, action, out.agent_reward, out.next_state});
            if (st.buffer.size() >= static_cast<size_t>(cfg.batch_size)) train_step(st, cfg, sample_rng);
            state = out.next_state;
            reward_sum += out.record.reward;
            ++steps;
            done = out.done;
        }
        st.episodes_done = e + 1;
        EpisodeLogRow row{e, reward_sum / static_cast<double>(steps), sigma,
                          static_cast<long>(st.buffer.size())};
        log.push_back(row);
        on_episode(row, st);
    }
    return log;
}

// Single forward pass of the frozen policy.
inline AnchorSet infer(const Mlp& actor, const Eigen::VectorXd& state, int num_subnetworks,
                       bool has_weight, double area_side) {
    const Eigen::VectorXd a = actor.forward(state);
    return decode_action(a, num_subnetworks, has_weight, area_side);
}

template <typename Json>
Json adam_to_json(const AdamState& s) {
    Json j;
    j["step"] = s.step;
    auto mat_list = [](const std::vector<Eigen::ArrayXXd>& arrays) {
        std::vector<std::vector<std::vector<double>>> out;
        for (const auto& a : arrays) {
            std::vector<std::vector<double>> rows(static_cast<size_t>(a.rows()));
            for (Eigen::Index r = 0; r < a.rows(); ++r)
                rows[static_cast<size_t>(r)].assign(a.row(r).begin(), a.row(r).end());
            out.push_back(std::move(rows));
        }
        return out;
    };
    auto vec_list = [](const std::vector<Eigen::ArrayXd>& arrays) {
        std::vector<std::vector<double>> out;
        for (const auto& a : arrays) out.emplace_back(a.begin(), a.end());
        return out;
    };
    j["m_w"] = mat_list(s.m_w);
    j["v_w"] = mat_list(s.v_w);
    j["m_b"] = vec_list(s.m_b);
    j["v_b"] = vec_list(s.v_b);
    return j;
}

template <typename Json>
AdamState adam_from_json(const Json& j) {
    AdamState s;
    s.step = j.at("step").template get<long>();
    for (const auto& jm : j.at("m_w")) {
        const auto rows = jm.template get<std::vector<std::vector<double>>>();
        Eigen::ArrayXXd a(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < rows[r].size(); ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        s.m_w.push_back(std::move(a));
    }
    for (const auto& jm : j.at("v_w")) {
        const auto rows = jm.template get<std::vector<std::vector<double>>>();
        Eigen::ArrayXXd a(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < rows[r].size(); ++c) a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        s.v_w.push_back(std::move(a));
    }
    for (const auto& jv : j.at("m_b")) {
        const auto vals = jv.template get<std::vector<double>>();
        s.m_b.push_back(Eigen::Map<const Eigen::ArrayXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    for (const auto& jv : j.at("v_b")) {
        const auto vals = jv.template get<std::vector<double>>();
        s.v_b.push_back(Eigen::Map<const Eigen::ArrayXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    return s;
}

}  // namespace c2f
