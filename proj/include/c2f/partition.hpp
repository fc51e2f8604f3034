#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

#include "c2f/scenario.hpp"

namespace c2f {

// One learned subnetwork anchor: a 2D position plus, in energy-oriented
// cases, the AP-activation ratio.
struct Anchor {
    double x = 0.0;
    double y = 0.0;
    double weight = 1.0;  // meaningful only when AnchorSet::has_weight
};

struct AnchorSet {
    std::vector<Anchor> anchors;
    bool has_weight = false;

    int size() const { return static_cast<int>(anchors.size()); }
};

// Non-overlapping grouping of users and APs into M subnetworks, plus the
// AP on/off mask (all-on in rate-oriented cases).
struct Partition {
    int num_subnetworks = 0;
    std::vector<int> user_assign;    // K entries in [0, M)
    std::vector<int> ap_assign;      // L entries in [0, M)
    std::vector<bool> ap_active;     // L entries

    int num_users() const { return static_cast<int>(user_assign.size()); }
    int num_aps() const { return static_cast<int>(ap_assign.size()); }

    std::vector<int> user_counts() const {
        std::vector<int> counts(static_cast<size_t>(num_subnetworks), 0);
        for (int m : user_assign) ++counts[static_cast<size_t>(m)];
        return counts;
    }

    // Active APs per subnetwork.
    std::vector<int> ap_counts() const {
        std::vector<int> counts(static_cast<size_t>(num_subnetworks), 0);
        for (int l = 0; l < num_aps(); ++l)
            if (ap_active[static_cast<size_t>(l)]) ++counts[static_cast<size_t>(ap_assign[static_cast<size_t>(l)])];
        return counts;
    }
};

struct BalanceResult {
    double rho = 0.0;
    double rho_u = 0.0;
    double rho_b = 0.0;
};

namespace detail {

inline int nearest_anchor(const Vec2& p, const AnchorSet& anchors) {
    int best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int m = 0; m < anchors.size(); ++m) {
        const auto& a = anchors.anchors[static_cast<size_t>(m)];
        const double dx = p.x - a.x;
        const double dy = p.y - a.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best_d2) {
            best_d2 = d2;
            best = m;
        }
    }
    return best;
}

}  // namespace detail

// Assign every user and AP to its nearest anchor. With weighted anchors, each
// subnetwork keeps only the max(1, round(w_m * L_m)) APs with the strongest
// fading towards the subnetwork's users; subnetworks without users or without
// APs are left untouched (the reward, not the affiliation, punishes them).
inline Partition affiliate(const AnchorSet& anchors, const NetworkState& state) {
    Partition part;
    part.num_subnetworks = anchors.size();
    part.user_assign.resize(static_cast<size_t>(state.num_users()));
    part.ap_assign.resize(static_cast<size_t>(state.num_aps()));
    part.ap_active.assign(static_cast<size_t>(state.num_aps()), true);

    for (int k = 0; k < state.num_users(); ++k)
        part.user_assign[static_cast<size_t>(k)] = detail::nearest_anchor(state.user_pos[static_cast<size_t>(k)], anchors);
    for (int l = 0; l < state.num_aps(); ++l)
        part.ap_assign[static_cast<size_t>(l)] = detail::nearest_anchor(state.ap_pos[static_cast<size_t>(l)], anchors);

    if (!anchors.has_weight) return part;

    for (int m = 0; m < part.num_subnetworks; ++m) {
        std::vector<int> aps;
        for (int l = 0; l < part.num_aps(); ++l)
            if (part.ap_assign[static_cast<size_t>(l)] == m) aps.push_back(l);
        std::vector<int> users;
        for (int k = 0; k < part.num_users(); ++k)
            if (part.user_assign[static_cast<size_t>(k)] == m) users.push_back(k);
        if (aps.empty() || users.empty()) continue;

        const double w = anchors.anchors[static_cast<size_t>(m)].weight;
        const long raw = static_cast<long>(aps.size());
        long n_keep = std::max<long>(1, std::lround(w * static_cast<double>(raw)));
        n_keep = std::min(n_keep, raw);

        // Rank by the strongest large-scale coefficient towards the
        // subnetwork's users; ties keep the lower AP index.
        std::vector<double> score(aps.size(), 0.0);
        for (size_t i = 0; i < aps.size(); ++i) {
            double best = 0.0;
            for (int k : users) best = std::max(best, state.gamma(k, aps[i]));
            score[i] = best;
        }
        std::vector<size_t> order(aps.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](size_t a, size_t b) { return score[a] > score[b]; });
        for (size_t i = static_cast<size_t>(n_keep); i < order.size(); ++i)
            part.ap_active[static_cast<size_t>(aps[order[i]])] = false;
    }
    return part;
}

// Balance of subnetworks: min/max ratio of user counts times min/max ratio of
// active-AP counts. Empty subnetworks (or an all-zero max) give a zero ratio.
inline BalanceResult balance(const Partition& part) {
    auto min_max_ratio = [](const std::vector<int>& counts) {
        const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
        if (*hi == 0) return 0.0;
        return static_cast<double>(*lo) / static_cast<double>(*hi);
    };
    BalanceResult r;
    r.rho_u = min_max_ratio(part.user_counts());
    r.rho_b = min_max_ratio(part.ap_counts());
    r.rho = r.rho_u * r.rho_b;
    return r;
}

// Number of user-AP pairs associated now but not in the previous interval.
// A pair is associated when user and AP share a subnetwork and the AP is
// active. Index k is taken as user identity.
inline long handover_count(const Partition& prev, const Partition& curr) {
    const int num_users = curr.num_users();
    const int num_aps = curr.num_aps();
    long count = 0;
    for (int k = 0; k < num_users; ++k) {
        for (int l = 0; l < num_aps; ++l) {
            const bool now = curr.ap_active[static_cast<size_t>(l)] &&
                             curr.user_assign[static_cast<size_t>(k)] == curr.ap_assign[static_cast<size_t>(l)];
            const bool before = prev.ap_active[static_cast<size_t>(l)] &&
                                prev.user_assign[static_cast<size_t>(k)] == prev.ap_assign[static_cast<size_t>(l)];
            if (now && !before) ++count;
        }
    }
    return count;
}

// Identity-matched variant for churn: only users present in both intervals
// contribute; newly arrived users have no previous association to compare.
inline long handover_count(const Partition& prev, std::span<const std::int64_t> prev_ids,
                           const Partition& curr, std::span<const std::int64_t> curr_ids) {
    std::unordered_map<std::int64_t, int> prev_index;
    prev_index.reserve(prev_ids.size());
    for (int k = 0; k < static_cast<int>(prev_ids.size()); ++k) prev_index.emplace(prev_ids[static_cast<size_t>(k)], k);

    const int num_aps = curr.num_aps();
    long count = 0;
    for (int k = 0; k < static_cast<int>(curr_ids.size()); ++k) {
        const auto it = prev_index.find(curr_ids[static_cast<size_t>(k)]);
        if (it == prev_index.end()) continue;
        const int kp = it->second;
        for (int l = 0; l < num_aps; ++l) {
            const bool now = curr.ap_active[static_cast<size_t>(l)] &&
                             curr.user_assign[static_cast<size_t>(k)] == curr.ap_assign[static_cast<size_t>(l)];
            const bool before = prev.ap_active[static_cast<size_t>(l)] &&
                                prev.user_assign[static_cast<size_t>(kp)] == prev.ap_assign[static_cast<size_t>(l)];
            if (now && !before) ++count;
        }
    }
    return count;
}

// Largest per-subnetwork channel count K_m * L_m (active APs): the worst-case
// channel measurement cost over subnetworks.
inline long c_max(const Partition& part) {
    const auto users = part.user_counts();
    const auto aps = part.ap_counts();
    long best = 0;
    for (int m = 0; m < part.num_subnetworks; ++m)
        best = std::max(best, static_cast<long>(users[static_cast<size_t>(m)]) * aps[static_cast<size_t>(m)]);
    return best;
}

// Debug dump: {user_assign, ap_assign, ap_active}.
template <typename Json>
Json partition_to_json(const Partition& part) {
    Json j;
    j["user_assign"] = part.user_assign;
    j["ap_assign"] = part.ap_assign;
    std::vector<int> active;
    active.reserve(part.ap_active.size());
    for (bool b : part.ap_active) active.push_back(b ? 1 : 0);
    j["ap_active"] = active;
    return j;
}

}  // namespace c2f
