#pragma once

#include <string>

#include "c2f/errors.hpp"
#include "c2f/phy.hpp"

namespace c2f {

enum class ObjectiveCase {
    kRateBalance,               // maximize R_sum * rho
    kBalanceRateConstrained,    // maximize rho subject to R_sum >= R_th
    kEeBalance,                 // maximize eta_ee * rho
    kEeBalanceRateConstrained,  // maximize eta_ee * rho subject to R_sum >= R_th
};

inline bool is_rate_constrained(ObjectiveCase c) {
    return c == ObjectiveCase::kBalanceRateConstrained || c == ObjectiveCase::kEeBalanceRateConstrained;
}

// Weighted anchors (AP on/off switching) only make sense when the objective
// rewards saving power.
inline bool uses_ap_selection(ObjectiveCase c) {
    return c == ObjectiveCase::kEeBalance || c == ObjectiveCase::kEeBalanceRateConstrained;
}

inline std::string to_string(ObjectiveCase c) {
    switch (c) {
        case ObjectiveCase::kRateBalance: return "RATE_BALANCE";
        case ObjectiveCase::kBalanceRateConstrained: return "BALANCE_RATECONSTRAINED";
        case ObjectiveCase::kEeBalance: return "EE_BALANCE";
        case ObjectiveCase::kEeBalanceRateConstrained: return "EE_BALANCE_RATECONSTRAINED";
    }
    return "?";
}

inline ObjectiveCase objective_case_from_string(const std::string& s) {
    if (s == "RATE_BALANCE") return ObjectiveCase::kRateBalance;
    if (s == "BALANCE_RATECONSTRAINED") return ObjectiveCase::kBalanceRateConstrained;
    if (s == "EE_BALANCE") return ObjectiveCase::kEeBalance;
    if (s == "EE_BALANCE_RATECONSTRAINED") return ObjectiveCase::kEeBalanceRateConstrained;
    throw ConfigError("objective: unknown case '" + s + "'");
}

struct ObjectiveConfig {
    ObjectiveCase objective_case = ObjectiveCase::kRateBalance;
    double r_th = 0.0;  // bits/s/Hz, used by the rate-constrained cases

    // Divisor applied to the reward before it reaches the critic, keeping TD
    // targets O(1). Does not affect the reported (physical) reward.
    double reward_scale = 1.0;

    static double default_reward_scale(ObjectiveCase c) {
        return c == ObjectiveCase::kRateBalance ? 100.0 : 1.0;
    }

    void validate() const {
        if (r_th < 0.0) throw ConfigError("objective: r_th must be >= 0");
        if (reward_scale <= 0.0) throw ConfigError("objective: reward_scale must be > 0");
    }
};

// Case objective f(C): balance-aware sum rate, plain balance, or
// balance-aware energy efficiency.
inline double objective_value(const ObjectiveConfig& cfg, const MetricsRecord& metrics) {
    switch (cfg.objective_case) {
        case ObjectiveCase::kRateBalance: return metrics.r_sum * metrics.rho;
        case ObjectiveCase::kBalanceRateConstrained: return metrics.rho;
        case ObjectiveCase::kEeBalance:
        case ObjectiveCase::kEeBalanceRateConstrained: return metrics.eta_ee * metrics.rho;
    }
    return 0.0;
}

// Constraint set V: every subnetwork non-trivial with enough active APs for
// zero-forcing, plus the sum-rate threshold in the constrained cases.
inline bool constraints_satisfied(const ObjectiveConfig& cfg, const Partition& part,
                                  const MetricsRecord& metrics) {
    if (!metrics.feasible) return false;
    const auto users = part.user_counts();
    const auto aps = part.ap_counts();
    for (int m = 0; m < part.num_subnetworks; ++m) {
        const int k_m = users[static_cast<size_t>(m)];
        const int l_m = aps[static_cast<size_t>(m)];
        if (k_m < 1 || l_m < 1 || l_m < k_m) return false;
    }
    if (is_rate_constrained(cfg.objective_case) && metrics.r_sum < cfg.r_th) return false;
    return true;
}

// Scalar reward: objective times the constraint indicator.
inline double reward(const ObjectiveConfig& cfg, const Partition& part, const MetricsRecord& metrics) {
    return constraints_satisfied(cfg, part, metrics) ? objective_value(cfg, metrics) : 0.0;
}

}  // namespace c2f
