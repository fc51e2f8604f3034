#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "c2f/errors.hpp"
#include "c2f/rng.hpp"

namespace c2f {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

enum class UserPlacement { kUniform, kTwoHotspot };

// Topology, mobility and channel parameters for one experiment.
struct ScenarioConfig {
    double area_side = 1000.0;   // m
    int num_users = 50;          // K
    int num_aps = 100;           // L
    int num_subnetworks = 5;     // M
    int intervals = 100;         // T
    double interval_duration = 1.0;  // s
    double v_max = 5.0;              // m/s
    double path_loss_exponent = 4.0;
    double shadow_std_db = 8.0;
    double noise_power_w = dbm_to_watts(-104.0);
    bool dynamic_users = false;
    int user_change_max = 0;  // K'_max
    std::uint64_t seed = 1;

    // Initial user layout. Two-hotspot drops users around two uneven Gaussian
    // hotspots; AP placement is always uniform.
    UserPlacement user_placement = UserPlacement::kUniform;
    double hotspot_std = 120.0;
    double hotspot_weight = 0.7;  // fraction of users on the first hotspot

    void validate() const {
        if (area_side <= 0.0) throw ConfigError("scenario: area_side must be > 0");
        if (num_subnetworks < 1) throw ConfigError("scenario: M must be >= 1");
        if (num_users < num_subnetworks) throw ConfigError("scenario: K must be >= M");
        if (num_aps < num_subnetworks) throw ConfigError("scenario: L must be >= M");
        if (intervals < 1) throw ConfigError("scenario: T must be >= 1");
        if (interval_duration <= 0.0) throw ConfigError("scenario: interval_duration must be > 0");
        if (v_max < 0.0) throw ConfigError("scenario: v_max must be >= 0");
        if (path_loss_exponent <= 0.0) throw ConfigError("scenario: alpha must be > 0");
        if (shadow_std_db < 0.0) throw ConfigError("scenario: sigma_sh must be >= 0");
        if (noise_power_w <= 0.0) throw ConfigError("scenario: noise power must be > 0");
        if (user_change_max < 0) throw ConfigError("scenario: k_change_max must be >= 0");
        if (dynamic_users && user_change_max > num_users)
            throw ConfigError("scenario: k_change_max cannot exceed K");
    }
};

// Positions and large-scale channel of one time interval. Immutable value;
// every mutation below returns a fresh state.
struct NetworkState {
    std::vector<Vec2> user_pos;
    std::vector<Vec2> ap_pos;
    Eigen::MatrixXd gamma;      // K x L, linear amplitude
    Eigen::MatrixXd shadow_db;  // K x L
    std::vector<std::int64_t> user_id;  // stable identity across churn
    std::int64_t next_user_id = 0;
    int t = 1;

    int num_users() const { return static_cast<int>(user_pos.size()); }
    int num_aps() const { return static_cast<int>(ap_pos.size()); }
};

// One small-scale fading realization.
struct ChannelDraw {
    Eigen::MatrixXcd h;  // K x L, CN(0, 1) entries
};

// Large-scale fading amplitude sqrt(d^-alpha * 10^(chi/10)). Distances below
// one metre are clamped; the path-loss law has no near-field regime.
inline double large_scale_fading(double distance_m, double shadow_db, double alpha) {
    const double d = std::max(distance_m, 1.0);
    return std::sqrt(std::pow(d, -alpha) * std::pow(10.0, shadow_db / 10.0));
}

namespace detail {

inline void fill_gamma_row(NetworkState& state, int k, double alpha) {
    for (int l = 0; l < state.num_aps(); ++l) {
        const double d = distance(state.user_pos[static_cast<size_t>(k)], state.ap_pos[static_cast<size_t>(l)]);
        state.gamma(k, l) = large_scale_fading(d, state.shadow_db(k, l), alpha);
    }
}

inline void fill_gamma(NetworkState& state, double alpha) {
    for (int k = 0; k < state.num_users(); ++k) fill_gamma_row(state, k, alpha);
}

// Fold a coordinate back into [0, side] by reflection.
inline double reflect_into(double x, double side) {
    while (x < 0.0 || x > side) {
        if (x < 0.0) x = -x;
        if (x > side) x = 2.0 * side - x;
    }
    return x;
}

inline Vec2 draw_user_position(const ScenarioConfig& cfg, Rng& rng) {
    if (cfg.user_placement == UserPlacement::kUniform) {
        return {rng.uniform(0.0, cfg.area_side), rng.uniform(0.0, cfg.area_side)};
    }
    // Two-hotspot mixture at the quarter and three-quarter diagonal points.
    const bool first = rng.u01() < cfg.hotspot_weight;
    const double cx = first ? 0.25 * cfg.area_side : 0.75 * cfg.area_side;
    const double cy = first ? 0.25 * cfg.area_side : 0.75 * cfg.area_side;
    const double x = reflect_into(cx + rng.normal(0.0, cfg.hotspot_std), cfg.area_side);
    const double y = reflect_into(cy + rng.normal(0.0, cfg.hotspot_std), cfg.area_side);
    return {x, y};
}

}  // namespace detail

// Fresh topology snapshot: user/AP positions, shadowing and gamma at t = 1.
inline NetworkState init_snapshot(const ScenarioConfig& cfg, Rng& rng) {
    NetworkState state;
    state.user_pos.reserve(static_cast<size_t>(cfg.num_users));
    for (int k = 0; k < cfg.num_users; ++k) state.user_pos.push_back(detail::draw_user_position(cfg, rng));
    state.ap_pos.reserve(static_cast<size_t>(cfg.num_aps));
    for (int l = 0; l < cfg.num_aps; ++l)
        state.ap_pos.push_back({rng.uniform(0.0, cfg.area_side), rng.uniform(0.0, cfg.area_side)});

    state.shadow_db.resize(cfg.num_users, cfg.num_aps);
    for (int k = 0; k < cfg.num_users; ++k)
        for (int l = 0; l < cfg.num_aps; ++l) state.shadow_db(k, l) = rng.normal(0.0, cfg.shadow_std_db);

    state.gamma.resize(cfg.num_users, cfg.num_aps);
    detail::fill_gamma(state, cfg.path_loss_exponent);

    state.user_id.resize(static_cast<size_t>(cfg.num_users));
    for (int k = 0; k < cfg.num_users; ++k) state.user_id[static_cast<size_t>(k)] = k;
    state.next_user_id = cfg.num_users;
    state.t = 1;
    return state;
}

// One random-walk step: per user, speed ~ U[0, v_max] and heading ~ U[0, 2pi),
// reflecting walls, shadowing redrawn for users that moved. APs are static.
inline NetworkState step_mobility(const NetworkState& state, const ScenarioConfig& cfg, Rng& rng) {
    NetworkState next = state;
    for (int k = 0; k < next.num_users(); ++k) {
        const double speed = rng.uniform(0.0, cfg.v_max);
        const double heading = rng.uniform(0.0, 2.0 * M_PI);
        const double step = speed * cfg.interval_duration;
        if (step == 0.0) continue;
        auto& p = next.user_pos[static_cast<size_t>(k)];
        p.x = detail::reflect_into(p.x + step * std::cos(heading), cfg.area_side);
        p.y = detail::reflect_into(p.y + step * std::sin(heading), cfg.area_side);
        for (int l = 0; l < next.num_aps(); ++l) next.shadow_db(k, l) = rng.normal(0.0, cfg.shadow_std_db);
        detail::fill_gamma_row(next, k, cfg.path_loss_exponent);
    }
    next.t = state.t + 1;
    return next;
}

// Random user churn: K' ~ U{-K'_max..K'_max}; arrivals are placed like
// initial users, departures picked uniformly. Removals are truncated so at
// least M users remain.
inline NetworkState vary_users(const NetworkState& state, const ScenarioConfig& cfg, Rng& rng) {
    NetworkState next = state;
    const long delta = rng.uniform_int(-cfg.user_change_max, cfg.user_change_max);
    if (delta > 0) {
        const int old_k = next.num_users();
        const int new_k = old_k + static_cast<int>(delta);
        next.user_pos.resize(static_cast<size_t>(new_k));
        next.user_id.resize(static_cast<size_t>(new_k));
        Eigen::MatrixXd shadow(new_k, next.num_aps());
        shadow.topRows(old_k) = next.shadow_db;
        next.shadow_db.swap(shadow);
        for (int k = old_k; k < new_k; ++k) {
            next.user_pos[static_cast<size_t>(k)] = detail::draw_user_position(cfg, rng);
            next.user_id[static_cast<size_t>(k)] = next.next_user_id++;
            for (int l = 0; l < next.num_aps(); ++l)
                next.shadow_db(k, l) = rng.normal(0.0, cfg.shadow_std_db);
        }
        next.gamma.resize(new_k, next.num_aps());
        detail::fill_gamma(next, cfg.path_loss_exponent);
    } else if (delta < 0) {
        const int old_k = next.num_users();
        const int removable = std::max(0, old_k - cfg.num_subnetworks);
        const int n_remove = std::min(static_cast<int>(-delta), removable);
        std::vector<int> keep(static_cast<size_t>(old_k));
        for (int k = 0; k < old_k; ++k) keep[static_cast<size_t>(k)] = k;
        for (int i = 0; i < n_remove; ++i) {
            const long j = rng.uniform_int(0, static_cast<long>(keep.size()) - 1);
            keep.erase(keep.begin() + j);
        }
        NetworkState reduced = next;
        const int new_k = static_cast<int>(keep.size());
        reduced.user_pos.resize(static_cast<size_t>(new_k));
        reduced.user_id.resize(static_cast<size_t>(new_k));
        reduced.shadow_db.resize(new_k, next.num_aps());
        reduced.gamma.resize(new_k, next.num_aps());
        for (int i = 0; i < new_k; ++i) {
            const int src = keep[static_cast<size_t>(i)];
            reduced.user_pos[static_cast<size_t>(i)] = next.user_pos[static_cast<size_t>(src)];
            reduced.user_id[static_cast<size_t>(i)] = next.user_id[static_cast<size_t>(src)];
            reduced.shadow_db.row(i) = next.shadow_db.row(src);
            reduced.gamma.row(i) = next.gamma.row(src);
        }
        next = std::move(reduced);
    }
    return next;
}

// One i.i.d. CN(0,1) small-scale realization: (a + ib) / sqrt(2).
inline ChannelDraw draw_small_scale(int num_users, int num_aps, Rng& rng) {
    ChannelDraw draw;
    draw.h.resize(num_users, num_aps);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int k = 0; k < num_users; ++k)
        for (int l = 0; l < num_aps; ++l)
            draw.h(k, l) = std::complex<double>(rng.normal() * inv_sqrt2, rng.normal() * inv_sqrt2);
    return draw;
}

// Per-AP channel feature: the strongest large-scale coefficient over users.
inline Eigen::VectorXd channel_feature(const NetworkState& state) {
    return state.gamma.colwise().maxCoeff().transpose();
}

// Debug snapshot dump: {user_pos, ap_pos, shadow_db, t}.
template <typename Json>
Json snapshot_to_json(const NetworkState& state) {
    Json j;
    auto positions = [](const std::vector<Vec2>& ps) {
        std::vector<std::vector<double>> out;
        out.reserve(ps.size());
        for (const auto& p : ps) out.push_back({p.x, p.y});
        return out;
    };
    j["user_pos"] = positions(state.user_pos);
    j["ap_pos"] = positions(state.ap_pos);
    std::vector<std::vector<double>> shadow(static_cast<size_t>(state.shadow_db.rows()));
    for (int k = 0; k < state.shadow_db.rows(); ++k) {
        shadow[static_cast<size_t>(k)].assign(state.shadow_db.row(k).begin(), state.shadow_db.row(k).end());
    }
    j["shadow_db"] = shadow;
    j["t"] = state.t;
    return j;
}

}  // namespace c2f
