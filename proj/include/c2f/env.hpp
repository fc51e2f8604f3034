#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <optional>
#include <vector>

#include "c2f/ddpg.hpp"
#include "c2f/objective.hpp"
#include "c2f/phy.hpp"
#include "c2f/scenario.hpp"

namespace c2f {

// A frozen episode: the policy-independent sequence of network states plus
// the seed of the per-step evaluation draws. Every method evaluated on the
// same tape sees identical mobility, churn and fading randomness.
struct EpisodeTape {
    std::vector<NetworkState> states;  // T+1 entries; the extra one feeds s^(T+1)
    std::uint64_t draw_seed = 0;

    int steps() const { return static_cast<int>(states.size()) - 1; }

    Rng step_draw_rng(int step_index) const {
        return Rng(derive_seed(draw_seed, "step", static_cast<std::uint64_t>(step_index)));
    }
};

inline EpisodeTape make_tape(const ScenarioConfig& cfg, std::uint64_t episode_seed) {
    EpisodeTape tape;
    Rng rng(derive_seed(episode_seed, "topology"));
    tape.states.reserve(static_cast<size_t>(cfg.intervals) + 1);
    tape.states.push_back(init_snapshot(cfg, rng));
    for (int t = 0; t < cfg.intervals; ++t) {
        NetworkState next = step_mobility(tape.states.back(), cfg, rng);
        if (cfg.dynamic_users) next = vary_users(next, cfg, rng);
        tape.states.push_back(std::move(next));
    }
    tape.draw_seed = derive_seed(episode_seed, "draws");
    return tape;
}

// FNV-1a over the tape's positions, fading and interval indices; used to
// verify that different methods really consumed identical tapes.
inline std::uint64_t hash_tape(const EpisodeTape& tape) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix_double = [&h](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffu;
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& s : tape.states) {
        mix_double(static_cast<double>(s.t));
        for (const auto& p : s.user_pos) {
            mix_double(p.x);
            mix_double(p.y);
        }
        for (const auto& p : s.ap_pos) {
            mix_double(p.x);
            mix_double(p.y);
        }
        for (Eigen::Index i = 0; i < s.gamma.size(); ++i) mix_double(s.gamma.data()[i]);
    }
    h ^= detail::splitmix64(tape.draw_seed);
    return h;
}

// MDP view of one tape for the DDPG agent. The state is the channel feature
// of the current interval plus the previous anchors; the reward is the
// constrained objective of the partition induced by the chosen anchors.
class TapeEnv {
public:
    TapeEnv(const EpisodeTape* tape, const ScenarioConfig* scenario, const ObjectiveConfig* objective,
            const EnergyParams* energy, const AgentConfig* agent, int reward_draws = 1)
        : tape_(tape), scenario_(scenario), objective_(objective), energy_(energy), agent_(agent),
          reward_draws_(reward_draws), has_weight_(uses_ap_selection(objective->objective_case)) {}

    int state_dim() const {
        return scenario_->num_aps + action_dim(scenario_->num_subnetworks, has_weight_);
    }
    int num_actions() const { return action_dim(scenario_->num_subnetworks, has_weight_); }
    bool has_weight() const { return has_weight_; }

    Eigen::VectorXd reset() {
        step_ = 0;
        prev_anchors_ = initial_anchors(scenario_->num_subnetworks, has_weight_, scenario_->area_side);
        prev_partition_.reset();
        prev_ids_.clear();
        return encode_state(channel_feature(tape_->states.front()), prev_anchors_, *agent_,
                            scenario_->area_side);
    }

    struct StepOut {
        double agent_reward = 0.0;
        Eigen::VectorXd next_state;
        MetricsRecord record;
        bool done = false;
    };

    StepOut step(const Eigen::VectorXd& action) {
        const NetworkState& state = tape_->states[static_cast<size_t>(step_)];
        const AnchorSet anchors =
            decode_action(action, scenario_->num_subnetworks, has_weight_, scenario_->area_side);
        const Partition part = affiliate(anchors, state);

        Rng draw_rng = tape_->step_draw_rng(step_);
        StepOut out;
        out.record = evaluate(state, part, *energy_, scenario_->noise_power_w, reward_draws_, draw_rng);
        if (prev_partition_)
            out.record.handovers = handover_count(*prev_partition_, prev_ids_, part, state.user_id);
        out.record.reward = reward(*objective_, part, out.record);
        out.agent_reward = out.record.reward / objective_->reward_scale;

        prev_partition_ = part;
        prev_ids_ = state.user_id;
        prev_anchors_ = anchors;
        ++step_;
        out.next_state = encode_state(channel_feature(tape_->states[static_cast<size_t>(step_)]),
                                      prev_anchors_, *agent_, scenario_->area_side);
        out.done = step_ >= tape_->steps();
        return out;
    }

private:
    const EpisodeTape* tape_;
    const ScenarioConfig* scenario_;
    const ObjectiveConfig* objective_;
    const EnergyParams* energy_;
    const AgentConfig* agent_;
    int reward_draws_;
    bool has_weight_;

    int step_ = 0;
    AnchorSet prev_anchors_;
    std::optional<Partition> prev_partition_;
    std::vector<std::int64_t> prev_ids_;
};

// TapeEnv bundled with the tape it plays, for factories that mint a fresh
// episode per call.
class OwnedTapeEnv {
public:
    OwnedTapeEnv(EpisodeTape tape, const ScenarioConfig* scenario, const ObjectiveConfig* objective,
                 const EnergyParams* energy, const AgentConfig* agent, int reward_draws)
        : tape_(std::make_unique<EpisodeTape>(std::move(tape))),
          env_(tape_.get(), scenario, objective, energy, agent, reward_draws) {}

    Eigen::VectorXd reset() { return env_.reset(); }
    TapeEnv::StepOut step(const Eigen::VectorXd& action) { return env_.step(action); }
    int state_dim() const { return env_.state_dim(); }
    int num_actions() const { return env_.num_actions(); }

private:
    std::unique_ptr<EpisodeTape> tape_;
    TapeEnv env_;
};

// Roll any partitioning method over a tape: per interval the method maps the
// network state to a Partition, which is then evaluated exactly like the
// agent's output (same per-step draw streams, handovers, reward).
template <typename PartitionFn>
std::vector<MetricsRecord> roll_tape(const EpisodeTape& tape, const ScenarioConfig& scenario,
                                     const ObjectiveConfig& objective, const EnergyParams& energy,
                                     int n_draws, PartitionFn&& make_partition) {
    std::vector<MetricsRecord> records;
    records.reserve(static_cast<size_t>(tape.steps()));
    std::optional<Partition> prev;
    std::vector<std::int64_t> prev_ids;
    for (int i = 0; i < tape.steps(); ++i) {
        const NetworkState& state = tape.states[static_cast<size_t>(i)];
        const Partition part = make_partition(state, i);
        Rng draw_rng = tape.step_draw_rng(i);
        MetricsRecord rec = evaluate(state, part, energy, scenario.noise_power_w, n_draws, draw_rng);
        if (prev) rec.handovers = handover_count(*prev, prev_ids, part, state.user_id);
        rec.reward = reward(objective, part, rec);
        records.push_back(rec);
        prev = part;
        prev_ids = state.user_id;
    }
    return records;
}

// Frozen-policy partitioner: encodes the state, runs the actor, affiliates.
class PolicyPartitioner {
public:
    PolicyPartitioner(const Mlp* actor, const ScenarioConfig* scenario, const AgentConfig* agent,
                      bool has_weight)
        : actor_(actor), scenario_(scenario), agent_(agent), has_weight_(has_weight),
          prev_anchors_(initial_anchors(scenario->num_subnetworks, has_weight, scenario->area_side)) {}

    Partition operator()(const NetworkState& state, int /*step*/) {
        const Eigen::VectorXd s =
            encode_state(channel_feature(state), prev_anchors_, *agent_, scenario_->area_side);
        prev_anchors_ = infer(*actor_, s, scenario_->num_subnetworks, has_weight_, scenario_->area_side);
        return affiliate(prev_anchors_, state);
    }

private:
    const Mlp* actor_;
    const ScenarioConfig* scenario_;
    const AgentConfig* agent_;
    bool has_weight_;
    AnchorSet prev_anchors_;
};

// Uniform random anchors, decoded through the same action mapping as the
// agent; the no-learning reference point.
class RandomAnchorPartitioner {
public:
    RandomAnchorPartitioner(const ScenarioConfig* scenario, bool has_weight, std::uint64_t seed)
        : scenario_(scenario), has_weight_(has_weight), seed_(seed) {}

    Partition operator()(const NetworkState& state, int step) {
        Rng rng(derive_seed(seed_, "random_anchor", static_cast<std::uint64_t>(step)));
        const int dim = action_dim(scenario_->num_subnetworks, has_weight_);
        Eigen::VectorXd a(dim);
        for (int i = 0; i < dim; ++i) a(i) = rng.u01();
        const AnchorSet anchors = decode_action(a, scenario_->num_subnetworks, has_weight_, scenario_->area_side);
        return affiliate(anchors, state);
    }

private:
    const ScenarioConfig* scenario_;
    bool has_weight_;
    std::uint64_t seed_;
};

}  // namespace c2f
