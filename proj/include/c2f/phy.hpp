#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "c2f/errors.hpp"
#include "c2f/partition.hpp"
#include "c2f/scenario.hpp"

namespace c2f {

struct EnergyParams {
    double p_tx = 2.0;    // average per-AP transmit power P (W)
    double tau = 0.38;    // amplifier efficiency
    double p_c = 1.0;     // circuit power per AP (W)
    double p_fix = 0.05;  // fixed fronthaul power per AP (W)
    double p_b = 0.1;     // traffic-dependent fronthaul power (W per bit/s/Hz)

    void validate() const {
        if (p_tx <= 0.0 || p_c <= 0.0 || p_fix <= 0.0 || p_b <= 0.0)
            throw ConfigError("energy: powers must be > 0");
        if (tau <= 0.0 || tau > 1.0) throw ConfigError("energy: tau must be in (0, 1]");
    }
};

// Zero-forcing precoders for one partition. Per subnetwork m the matrix W_m
// holds one unit-norm column per user, rows indexed by the active APs of m.
struct PrecodeResult {
    struct Subnetwork {
        std::vector<int> users;       // global user indices, ascending
        std::vector<int> active_aps;  // global AP indices, ascending
        Eigen::MatrixXcd w;           // |active_aps| x |users|
    };
    std::vector<Subnetwork> subnetworks;  // one per m, possibly empty
    Eigen::VectorXd user_power;           // P_k per global user, W
};

// Per-interval evaluation record; one CSV row of the metrics stream.
struct MetricsRecord {
    int t = 0;
    double r_sum = 0.0;
    double rho = 0.0;
    double rho_u = 0.0;
    double rho_b = 0.0;
    long c_max = 0;
    double p_tot = 0.0;
    double eta_ee = 0.0;
    bool feasible = true;
    long handovers = 0;
    double reward = 0.0;

    static std::string csv_header() {
        return "t,r_sum,rho,rho_u,rho_b,c_max,p_tot,eta_ee,feasible,handovers,reward";
    }
};

// Zero-forcing precoders per subnetwork: W = G^H (G G^H + eps I)^{-1} with a
// trace-scaled ridge, columns normalized to unit power. The subnetwork's sum
// power budget P * L_m^active is split equally over its users.
inline PrecodeResult zf_precoders(const NetworkState& state, const ChannelDraw& draw,
                                  const Partition& part, double p_tx) {
    PrecodeResult result;
    result.subnetworks.resize(static_cast<size_t>(part.num_subnetworks));
    result.user_power = Eigen::VectorXd::Zero(state.num_users());

    for (int m = 0; m < part.num_subnetworks; ++m) {
        auto& sub = result.subnetworks[static_cast<size_t>(m)];
        for (int k = 0; k < part.num_users(); ++k)
            if (part.user_assign[static_cast<size_t>(k)] == m) sub.users.push_back(k);
        for (int l = 0; l < part.num_aps(); ++l)
            if (part.ap_assign[static_cast<size_t>(l)] == m && part.ap_active[static_cast<size_t>(l)])
                sub.active_aps.push_back(l);
        if (sub.users.empty()) continue;

        const int k_m = static_cast<int>(sub.users.size());
        const int l_m = static_cast<int>(sub.active_aps.size());
        if (l_m < k_m)
            throw InfeasibleZfError("subnetwork " + std::to_string(m) + " has " + std::to_string(k_m) +
                                    " users but only " + std::to_string(l_m) + " active APs");

        Eigen::MatrixXcd g(k_m, l_m);
        for (int i = 0; i < k_m; ++i)
            for (int j = 0; j < l_m; ++j) {
                const int k = sub.users[static_cast<size_t>(i)];
                const int l = sub.active_aps[static_cast<size_t>(j)];
                g(i, j) = state.gamma(k, l) * draw.h(k, l);
            }

        Eigen::MatrixXcd gram = g * g.adjoint();
        const double ridge = 1e-12 * gram.trace().real() / static_cast<double>(k_m);
        gram.diagonal().array() += ridge;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo > 1e12)
            throw SingularChannelError("subnetwork " + std::to_string(m) + " channel matrix is singular");

        // W = G^H S with S = gram^{-1}; solve gram Y = G, then W = Y^H.
        Eigen::MatrixXcd w = gram.llt().solve(g).adjoint();
        for (int j = 0; j < k_m; ++j) w.col(j) /= w.col(j).norm();
        sub.w = std::move(w);

        const double p_k = p_tx * static_cast<double>(l_m) / static_cast<double>(k_m);
        for (int k : sub.users) result.user_power(k) = p_k;
    }
    return result;
}

namespace detail {

// Channel row of user k towards a subnetwork's active APs.
inline Eigen::RowVectorXcd gains_to(const NetworkState& state, const ChannelDraw& draw, int k,
                                    const std::vector<int>& aps) {
    Eigen::RowVectorXcd g(static_cast<Eigen::Index>(aps.size()));
    for (size_t j = 0; j < aps.size(); ++j) g(static_cast<Eigen::Index>(j)) = state.gamma(k, aps[j]) * draw.h(k, aps[j]);
    return g;
}

}  // namespace detail

// Achievable rate of user k: log2(1 + SINR) with intra- and inter-subnetwork
// interference and noise in the denominator. Users of a subnetwork with no
// active APs get rate zero.
inline double user_rate(int k, const NetworkState& state, const ChannelDraw& draw,
                        const Partition& part, const PrecodeResult& precode, double noise_power_w) {
    const int m = part.user_assign[static_cast<size_t>(k)];
    const auto& own = precode.subnetworks[static_cast<size_t>(m)];
    if (own.active_aps.empty() || own.w.size() == 0) return 0.0;

    double signal = 0.0;
    double interference = 0.0;
    for (int n = 0; n < part.num_subnetworks; ++n) {
        const auto& sub = precode.subnetworks[static_cast<size_t>(n)];
        if (sub.users.empty() || sub.w.size() == 0) continue;
        const Eigen::RowVectorXcd g = detail::gains_to(state, draw, k, sub.active_aps);
        const Eigen::RowVectorXcd products = g * sub.w;  // one entry per user j of n
        for (size_t j = 0; j < sub.users.size(); ++j) {
            const double term = std::norm(products(static_cast<Eigen::Index>(j))) *
                                precode.user_power(sub.users[j]);
            if (sub.users[j] == k)
                signal = term;
            else
                interference += term;
        }
    }
    return std::log2(1.0 + signal / (interference + noise_power_w));
}

inline double sum_rate(const NetworkState& state, const ChannelDraw& draw, const Partition& part,
                       const PrecodeResult& precode, double noise_power_w) {
    double total = 0.0;
    for (int k = 0; k < state.num_users(); ++k)
        total += user_rate(k, state, draw, part, precode, noise_power_w);
    return total;
}

// Zero-forcing needs at least as many active APs as users in every non-empty
// subnetwork.
inline bool zf_feasible(const Partition& part) {
    const auto users = part.user_counts();
    const auto aps = part.ap_counts();
    for (int m = 0; m < part.num_subnetworks; ++m)
        if (users[static_cast<size_t>(m)] >= 1 && aps[static_cast<size_t>(m)] < users[static_cast<size_t>(m)])
            return false;
    return true;
}

// Total consumed power: amplifier and circuit power for active APs, fixed
// fronthaul power for every deployed AP, plus traffic-dependent fronthaul.
inline double total_power(const Partition& part, const EnergyParams& energy, double r_sum) {
    const auto aps = part.ap_counts();
    long active = 0;
    for (int c : aps) active += c;
    return (energy.p_tx / energy.tau + energy.p_c) * static_cast<double>(active) +
           energy.p_fix * static_cast<double>(part.num_aps()) + energy.p_b * r_sum;
}

inline double energy_efficiency(double r_sum, double p_tot) { return r_sum / p_tot; }

// Evaluate one (state, partition) pair: sum rate averaged over n_draws fresh
// small-scale realizations, plus balance, channel-count and power metrics.
// An infeasible partition is recorded (rate zero), not thrown.
inline MetricsRecord evaluate(const NetworkState& state, const Partition& part,
                              const EnergyParams& energy, double noise_power_w, int n_draws,
                              Rng& rng) {
    MetricsRecord rec;
    rec.t = state.t;
    const BalanceResult bal = balance(part);
    rec.rho = bal.rho;
    rec.rho_u = bal.rho_u;
    rec.rho_b = bal.rho_b;
    rec.c_max = c_max(part);

    rec.feasible = zf_feasible(part);
    double mean_rate = 0.0;
    if (rec.feasible) {
        for (int i = 0; i < n_draws; ++i) {
            const ChannelDraw draw = draw_small_scale(state.num_users(), state.num_aps(), rng);
            const PrecodeResult precode = zf_precoders(state, draw, part, energy.p_tx);
            mean_rate += sum_rate(state, draw, part, precode, noise_power_w);
        }
        mean_rate /= static_cast<double>(n_draws);
    }
    rec.r_sum = mean_rate;
    rec.p_tot = total_power(part, energy, rec.r_sum);
    rec.eta_ee = energy_efficiency(rec.r_sum, rec.p_tot);
    return rec;
}

}  // namespace c2f
