#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "c2f/errors.hpp"
#include "c2f/jacobi.hpp"
#include "c2f/partition.hpp"
#include "c2f/rng.hpp"
#include "c2f/scenario.hpp"

namespace c2f {

enum class BaselineMethod { kUserKmeans, kApGmm, kGraphSpectral, kUcrApsel, kUcApsel };

inline std::string to_string(BaselineMethod m) {
    switch (m) {
        case BaselineMethod::kUserKmeans: return "USER_KMEANS";
        case BaselineMethod::kApGmm: return "AP_GMM";
        case BaselineMethod::kGraphSpectral: return "GRAPH_SPECTRAL";
        case BaselineMethod::kUcrApsel: return "UCR_APSEL";
        case BaselineMethod::kUcApsel: return "UC_APSEL";
    }
    return "?";
}

inline BaselineMethod baseline_method_from_string(const std::string& s) {
    if (s == "USER_KMEANS") return BaselineMethod::kUserKmeans;
    if (s == "AP_GMM") return BaselineMethod::kApGmm;
    if (s == "GRAPH_SPECTRAL") return BaselineMethod::kGraphSpectral;
    if (s == "UCR_APSEL") return BaselineMethod::kUcrApsel;
    if (s == "UC_APSEL") return BaselineMethod::kUcApsel;
    throw ConfigError("baseline: unknown method '" + s + "'");
}

struct BaselineConfig {
    BaselineMethod method = BaselineMethod::kUserKmeans;
    double ap_selection_ratio = 0.6;  // active APs per user in the ApSel methods
    int max_iters = 100;
    double tol = 1e-6;
    std::uint64_t seed = 7;

    void validate() const {
        if (ap_selection_ratio <= 0.0 || ap_selection_ratio > 1.0)
            throw ConfigError("baseline: ap_selection_ratio must be in (0, 1]");
        if (max_iters < 1) throw ConfigError("baseline: max_iters must be >= 1");
        if (tol < 0.0) throw ConfigError("baseline: tol must be >= 0");
    }
};

namespace detail {

// Indices of the rows in lexicographic order. Random draws in the clustering
// routines below walk this order, so results do not depend on how the caller
// happened to order the nodes.
inline std::vector<int> canonical_order(const Eigen::MatrixXd& pts) {
    std::vector<int> order(static_cast<size_t>(pts.rows()));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&pts](int a, int b) {
        for (Eigen::Index c = 0; c < pts.cols(); ++c) {
            if (pts(a, c) != pts(b, c)) return pts(a, c) < pts(b, c);
        }
        return false;
    });
    return order;
}

struct KmeansResult {
    std::vector<int> labels;
    Eigen::MatrixXd centroids;       // M x d
    std::vector<double> wcss_trace;  // objective after each assignment pass
};

// Lloyd iterations with k-means++ seeding. Ties go to the lowest centroid
// index; an emptied cluster is reseeded at the point farthest from its own
// centroid.
inline KmeansResult kmeans(const Eigen::MatrixXd& pts, int n_clusters, int max_iters, double tol,
                           Rng& rng) {
    const int n = static_cast<int>(pts.rows());
    const Eigen::Index d = pts.cols();
    if (n < n_clusters) throw ConfigError("kmeans: fewer points than clusters");

    const std::vector<int> canon = canonical_order(pts);

    KmeansResult res;
    res.centroids.resize(n_clusters, d);
    res.centroids.row(0) = pts.row(canon[static_cast<size_t>(rng.uniform_int(0, n - 1))]);
    Eigen::VectorXd min_d2 = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
    for (int c = 1; c < n_clusters; ++c) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d2 = (pts.row(i) - res.centroids.row(c - 1)).squaredNorm();
            min_d2(i) = std::min(min_d2(i), d2);
            total += min_d2(i);
        }
        int chosen = canon[0];
        if (total > 0.0) {
            const double u = rng.u01() * total;
            double cum = 0.0;
            for (int idx : canon) {
                cum += min_d2(idx);
                if (cum >= u) {
                    chosen = idx;
                    break;
                }
            }
        }
        res.centroids.row(c) = pts.row(chosen);
    }

    res.labels.assign(static_cast<size_t>(n), 0);
    for (int iter = 0; iter < max_iters; ++iter) {
        double wcss = 0.0;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double best_d2 = std::numeric_limits<double>::infinity();
            for (int c = 0; c < n_clusters; ++c) {
                const double d2 = (pts.row(i) - res.centroids.row(c)).squaredNorm();
                if (d2 < best_d2) {
                    best_d2 = d2;
                    best = c;
                }
            }
            res.labels[static_cast<size_t>(i)] = best;
            wcss += best_d2;
        }
        res.wcss_trace.push_back(wcss);

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n_clusters, d);
        std::vector<int> counts(static_cast<size_t>(n_clusters), 0);
        for (int i = 0; i < n; ++i) {
            sums.row(res.labels[static_cast<size_t>(i)]) += pts.row(i);
            ++counts[static_cast<size_t>(res.labels[static_cast<size_t>(i)])];
        }
        double shift = 0.0;
        for (int c = 0; c < n_clusters; ++c) {
            Eigen::RowVectorXd next;
            if (counts[static_cast<size_t>(c)] > 0) {
                next = sums.row(c) / static_cast<double>(counts[static_cast<size_t>(c)]);
            } else {
                // Reseed at the point farthest from its assigned centroid.
                int far = canon[0];
                double far_d2 = -1.0;
                for (int idx : canon) {
                    const double d2 =
                        (pts.row(idx) - res.centroids.row(res.labels[static_cast<size_t>(idx)])).squaredNorm();
                    if (d2 > far_d2) {
                        far_d2 = d2;
                        far = idx;
                    }
                }
                next = pts.row(far);
            }
            shift = std::max(shift, (next - res.centroids.row(c)).norm());
            res.centroids.row(c) = next;
        }
        if (shift < tol) break;
    }

    // Final assignment against the converged centroids.
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_clusters; ++c) {
            const double d2 = (pts.row(i) - res.centroids.row(c)).squaredNorm();
            if (d2 < best_d2) {
                best_d2 = d2;
                best = c;
            }
        }
        res.labels[static_cast<size_t>(i)] = best;
    }
    return res;
}

struct GmmResult {
    std::vector<int> labels;
    Eigen::MatrixXd means;               // M x 2
    std::vector<Eigen::Matrix2d> covs;
    Eigen::VectorXd weights;
    std::vector<double> loglik_trace;
};

// EM for a 2D Gaussian mixture with full covariances, k-means initialized.
// Covariances carry a 1e-6 * trace ridge; degenerate components are reset to
// a scaled identity.
inline GmmResult gmm2(const Eigen::MatrixXd& pts, int n_components, int max_iters, double tol,
                      Rng& rng) {
    const int n = static_cast<int>(pts.rows());
    if (pts.cols() != 2) throw ConfigError("gmm2: expects 2D points");
    if (n < n_components) throw ConfigError("gmm2: fewer points than components");

    const Eigen::RowVector2d global_mean = pts.colwise().mean();
    double global_var = 0.0;
    for (int i = 0; i < n; ++i) global_var += (pts.row(i) - global_mean).squaredNorm();
    global_var = std::max(global_var / static_cast<double>(2 * n), 1e-9);

    GmmResult res;
    const KmeansResult init = kmeans(pts, n_components, 20, 1e-8, rng);
    res.means = init.centroids;
    res.covs.assign(static_cast<size_t>(n_components), global_var * Eigen::Matrix2d::Identity());
    res.weights = Eigen::VectorXd::Constant(n_components, 1.0 / static_cast<double>(n_components));

    auto regularize = [&](Eigen::Matrix2d cov) {
        cov += 1e-6 * cov.trace() * Eigen::Matrix2d::Identity();
        if (!cov.allFinite() || cov.determinant() <= 1e-300)
            cov = global_var * Eigen::Matrix2d::Identity();
        return cov;
    };

    Eigen::MatrixXd resp(n, n_components);
    double prev_loglik = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < max_iters; ++iter) {
        // E-step in the log domain.
        double loglik = 0.0;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd logp(n_components);
            for (int c = 0; c < n_components; ++c) {
                const Eigen::Matrix2d cov = regularize(res.covs[static_cast<size_t>(c)]);
                const Eigen::Vector2d diff = (pts.row(i) - res.means.row(c)).transpose();
                const double quad = diff.dot(cov.inverse() * diff);
                logp(c) = std::log(std::max(res.weights(c), 1e-300)) - std::log(2.0 * M_PI) -
                          0.5 * std::log(cov.determinant()) - 0.5 * quad;
            }
            const double mx = logp.maxCoeff();
            const double lse = mx + std::log((logp.array() - mx).exp().sum());
            resp.row(i) = (logp.array() - lse).exp();
            loglik += lse;
        }
        res.loglik_trace.push_back(loglik);

        // M-step.
        for (int c = 0; c < n_components; ++c) {
            const double nk = resp.col(c).sum();
            if (nk <= 1e-12) {
                res.covs[static_cast<size_t>(c)] = global_var * Eigen::Matrix2d::Identity();
                continue;
            }
            res.weights(c) = nk / static_cast<double>(n);
            const Eigen::RowVector2d mean = (resp.col(c).transpose() * pts) / nk;
            Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
            for (int i = 0; i < n; ++i) {
                const Eigen::Vector2d diff = (pts.row(i) - mean).transpose();
                cov += resp(i, c) * diff * diff.transpose();
            }
            res.means.row(c) = mean;
            res.covs[static_cast<size_t>(c)] = regularize(cov / nk);
        }

        if (std::abs(loglik - prev_loglik) < tol * (1.0 + std::abs(loglik))) break;
        prev_loglik = loglik;
    }

    res.labels.assign(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        for (int c = 1; c < n_components; ++c)
            if (resp(i, c) > resp(i, best)) best = c;
        res.labels[static_cast<size_t>(i)] = best;
    }
    return res;
}

struct LinkageResult {
    std::vector<int> labels;            // cluster index per point after the cut
    std::vector<double> merge_heights;  // non-decreasing for average linkage
};

// Agglomerative clustering with average linkage (Lance-Williams update),
// cut at n_clusters clusters.
inline LinkageResult average_linkage(const Eigen::MatrixXd& pts, int n_clusters) {
    const int n = static_cast<int>(pts.rows());
    if (n < n_clusters) throw ConfigError("linkage: fewer points than clusters");

    Eigen::MatrixXd dist(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dist(i, j) = (pts.row(i) - pts.row(j)).norm();

    std::vector<bool> active(static_cast<size_t>(n), true);
    std::vector<int> size(static_cast<size_t>(n), 1);
    std::vector<std::vector<int>> members(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) members[static_cast<size_t>(i)] = {i};

    LinkageResult res;
    int remaining = n;
    while (remaining > n_clusters) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i) {
            if (!active[static_cast<size_t>(i)]) continue;
            for (int j = i + 1; j < n; ++j) {
                if (!active[static_cast<size_t>(j)]) continue;
                if (dist(i, j) < best) {
                    best = dist(i, j);
                    bi = i;
                    bj = j;
                }
            }
        }
        res.merge_heights.push_back(best);
        const int ni = size[static_cast<size_t>(bi)];
        const int nj = size[static_cast<size_t>(bj)];
        for (int k = 0; k < n; ++k) {
            if (!active[static_cast<size_t>(k)] || k == bi || k == bj) continue;
            const double dk = (ni * dist(bi, k) + nj * dist(bj, k)) / static_cast<double>(ni + nj);
            dist(bi, k) = dk;
            dist(k, bi) = dk;
        }
        size[static_cast<size_t>(bi)] += nj;
        auto& mi = members[static_cast<size_t>(bi)];
        auto& mj = members[static_cast<size_t>(bj)];
        mi.insert(mi.end(), mj.begin(), mj.end());
        mj.clear();
        active[static_cast<size_t>(bj)] = false;
        --remaining;
    }

    res.labels.assign(static_cast<size_t>(n), 0);
    int label = 0;
    for (int i = 0; i < n; ++i) {
        if (!active[static_cast<size_t>(i)]) continue;
        for (int idx : members[static_cast<size_t>(i)]) res.labels[static_cast<size_t>(idx)] = label;
        ++label;
    }
    return res;
}

// Flip eigenvector signs by their first (or, if zero, third) moment so the
// embedding does not depend on rotation-order artifacts of the eigensolver.
inline void canonicalize_sign(Eigen::MatrixXd& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        const double s1 = vectors.col(c).sum();
        double s = s1;
        if (std::abs(s1) < 1e-9) s = vectors.col(c).array().cube().sum();
        if (s < 0.0) vectors.col(c) = -vectors.col(c);
    }
}

}  // namespace detail

// Cluster users by position with K-means, then attach every AP to the
// nearest centroid.
inline Partition user_centric_kmeans(const NetworkState& state, int n_subnetworks,
                                     const BaselineConfig& cfg) {
    if (state.num_users() < n_subnetworks) throw ConfigError("user_centric_kmeans: K < M");
    Eigen::MatrixXd pts(state.num_users(), 2);
    for (int k = 0; k < state.num_users(); ++k)
        pts.row(k) << state.user_pos[static_cast<size_t>(k)].x, state.user_pos[static_cast<size_t>(k)].y;

    Rng rng(derive_seed(cfg.seed, "user_kmeans"));
    const auto km = detail::kmeans(pts, n_subnetworks, cfg.max_iters, cfg.tol, rng);

    Partition part;
    part.num_subnetworks = n_subnetworks;
    part.user_assign = km.labels;
    part.ap_assign.resize(static_cast<size_t>(state.num_aps()));
    part.ap_active.assign(static_cast<size_t>(state.num_aps()), true);
    for (int l = 0; l < state.num_aps(); ++l) {
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_subnetworks; ++c) {
            const double dx = state.ap_pos[static_cast<size_t>(l)].x - km.centroids(c, 0);
            const double dy = state.ap_pos[static_cast<size_t>(l)].y - km.centroids(c, 1);
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = c;
            }
        }
        part.ap_assign[static_cast<size_t>(l)] = best;
    }
    return part;
}

// Group APs with a Gaussian mixture, then attach every user to the component
// with the nearest mean.
inline Partition ap_centric_gmm(const NetworkState& state, int n_subnetworks,
                                const BaselineConfig& cfg) {
    if (state.num_aps() < n_subnetworks) throw ConfigError("ap_centric_gmm: L < M");
    Eigen::MatrixXd pts(state.num_aps(), 2);
    for (int l = 0; l < state.num_aps(); ++l)
        pts.row(l) << state.ap_pos[static_cast<size_t>(l)].x, state.ap_pos[static_cast<size_t>(l)].y;

    Rng rng(derive_seed(cfg.seed, "ap_gmm"));
    const auto gmm = detail::gmm2(pts, n_subnetworks, cfg.max_iters, cfg.tol, rng);

    Partition part;
    part.num_subnetworks = n_subnetworks;
    part.ap_assign = gmm.labels;
    part.ap_active.assign(static_cast<size_t>(state.num_aps()), true);
    part.user_assign.resize(static_cast<size_t>(state.num_users()));
    for (int k = 0; k < state.num_users(); ++k) {
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int c = 0; c < n_subnetworks; ++c) {
            const double dx = state.user_pos[static_cast<size_t>(k)].x - gmm.means(c, 0);
            const double dy = state.user_pos[static_cast<size_t>(k)].y - gmm.means(c, 1);
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2) {
                best_d2 = d2;
                best = c;
            }
        }
        part.user_assign[static_cast<size_t>(k)] = best;
    }
    return part;
}

namespace detail {

// Intermediate artifacts of the spectral pipeline, exposed for the tests.
struct SpectralArtifacts {
    std::vector<int> user_ap;      // strongest-AP match per user
    std::vector<int> lone_aps;     // APs not absorbed into a meganode
    Eigen::MatrixXd affinity;      // meganode graph
    Eigen::MatrixXd laplacian;     // symmetric normalized
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd embedding;     // row-normalized M smallest eigenvectors
    std::vector<int> node_labels;  // per meganode
};

inline SpectralArtifacts spectral_pipeline(const NetworkState& state, int n_subnetworks,
                                           const BaselineConfig& cfg) {
    const int num_users = state.num_users();
    const int num_aps = state.num_aps();
    if (num_users > num_aps) throw ConfigError("graph_spectral: requires K <= L");

    SpectralArtifacts art;

    // Greedy strongest-pair matching of each user to a distinct AP.
    struct Pair {
        int k, l;
        double g;
    };
    std::vector<Pair> pairs;
    pairs.reserve(static_cast<size_t>(num_users) * static_cast<size_t>(num_aps));
    for (int k = 0; k < num_users; ++k)
        for (int l = 0; l < num_aps; ++l) pairs.push_back({k, l, state.gamma(k, l)});
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
        if (a.g != b.g) return a.g > b.g;
        if (a.k != b.k) return a.k < b.k;
        return a.l < b.l;
    });
    art.user_ap.assign(static_cast<size_t>(num_users), -1);
    std::vector<bool> ap_used(static_cast<size_t>(num_aps), false);
    int matched = 0;
    for (const auto& p : pairs) {
        if (matched == num_users) break;
        if (art.user_ap[static_cast<size_t>(p.k)] >= 0 || ap_used[static_cast<size_t>(p.l)]) continue;
        art.user_ap[static_cast<size_t>(p.k)] = p.l;
        ap_used[static_cast<size_t>(p.l)] = true;
        ++matched;
    }
    for (int l = 0; l < num_aps; ++l)
        if (!ap_used[static_cast<size_t>(l)]) art.lone_aps.push_back(l);

    // Meganodes: users 0..K-1 keep their index, lone APs follow. Edge weight
    // sums squared fading over the user-AP cross pairs of the two nodes.
    const int n_nodes = num_users + static_cast<int>(art.lone_aps.size());
    auto node_ap = [&art, num_users](int node) {
        return node < num_users ? art.user_ap[static_cast<size_t>(node)]
                                : art.lone_aps[static_cast<size_t>(node - num_users)];
    };
    art.affinity = Eigen::MatrixXd::Zero(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        for (int j = i + 1; j < n_nodes; ++j) {
            double w = 0.0;
            if (i < num_users) {
                const double g = state.gamma(i, node_ap(j));
                w += g * g;
            }
            if (j < num_users) {
                const double g = state.gamma(j, node_ap(i));
                w += g * g;
            }
            art.affinity(i, j) = w;
            art.affinity(j, i) = w;
        }
    }

    const Eigen::VectorXd degree = art.affinity.rowwise().sum();
    Eigen::VectorXd inv_sqrt(n_nodes);
    for (int i = 0; i < n_nodes; ++i)
        inv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 0.0;
    art.laplacian = Eigen::MatrixXd::Identity(n_nodes, n_nodes) -
                    (inv_sqrt.asDiagonal() * art.affinity * inv_sqrt.asDiagonal());

    const EigenDecomposition eig = jacobi_eigen(art.laplacian);
    art.eigenvalues = eig.values;
    art.embedding = eig.vectors.leftCols(n_subnetworks);
    canonicalize_sign(art.embedding);
    for (int i = 0; i < n_nodes; ++i) {
        const double norm = art.embedding.row(i).norm();
        if (norm > 1e-300) art.embedding.row(i) /= norm;
    }

    Rng rng(derive_seed(cfg.seed, "spectral_kmeans"));
    art.node_labels = kmeans(art.embedding, n_subnetworks, cfg.max_iters, cfg.tol, rng).labels;
    return art;
}

}  // namespace detail

// Merge each user with its strongest AP into a meganode (greedy, strongest
// pair first, each AP used once), connect meganodes by summed squared fading
// across their user-AP cross pairs, and cut the graph with spectral
// clustering on the symmetric normalized Laplacian.
inline Partition graph_spectral(const NetworkState& state, int n_subnetworks,
                                const BaselineConfig& cfg) {
    const auto art = detail::spectral_pipeline(state, n_subnetworks, cfg);
    const int num_users = state.num_users();

    Partition part;
    part.num_subnetworks = n_subnetworks;
    part.user_assign.resize(static_cast<size_t>(num_users));
    part.ap_assign.resize(static_cast<size_t>(state.num_aps()));
    part.ap_active.assign(static_cast<size_t>(state.num_aps()), true);
    for (int k = 0; k < num_users; ++k) {
        part.user_assign[static_cast<size_t>(k)] = art.node_labels[static_cast<size_t>(k)];
        part.ap_assign[static_cast<size_t>(art.user_ap[static_cast<size_t>(k)])] =
            art.node_labels[static_cast<size_t>(k)];
    }
    for (size_t i = 0; i < art.lone_aps.size(); ++i)
        part.ap_assign[static_cast<size_t>(art.lone_aps[i])] =
            art.node_labels[static_cast<size_t>(num_users) + i];
    return part;
}

// Hierarchical user clustering with AP selection. Every AP joins the cluster
// of its best user; the selection ratio fixes how many APs stay active per
// user. UCR (fix_ratio) budgets each cluster independently at
// round(ratio * K_m); UC keeps the global top round(ratio * K).
inline Partition hierarchical_apsel(const NetworkState& state, int n_subnetworks,
                                    const BaselineConfig& cfg, bool fix_ratio) {
    const int num_users = state.num_users();
    const int num_aps = state.num_aps();
    if (num_users < n_subnetworks) throw ConfigError("hierarchical_apsel: K < M");

    Eigen::MatrixXd pts(num_users, 2);
    for (int k = 0; k < num_users; ++k)
        pts.row(k) << state.user_pos[static_cast<size_t>(k)].x, state.user_pos[static_cast<size_t>(k)].y;
    const auto linkage = detail::average_linkage(pts, n_subnetworks);

    Partition part;
    part.num_subnetworks = n_subnetworks;
    part.user_assign = linkage.labels;
    part.ap_assign.resize(static_cast<size_t>(num_aps));
    part.ap_active.assign(static_cast<size_t>(num_aps), false);

    // Best user per AP decides both membership and selection score.
    std::vector<double> score(static_cast<size_t>(num_aps), 0.0);
    for (int l = 0; l < num_aps; ++l) {
        int best_user = 0;
        for (int k = 1; k < num_users; ++k)
            if (state.gamma(k, l) > state.gamma(best_user, l)) best_user = k;
        part.ap_assign[static_cast<size_t>(l)] = linkage.labels[static_cast<size_t>(best_user)];
        score[static_cast<size_t>(l)] = state.gamma(best_user, l);
    }

    auto top_by_score = [&score](std::vector<int> candidates, long n_keep) {
        std::stable_sort(candidates.begin(), candidates.end(), [&score](int a, int b) {
            return score[static_cast<size_t>(a)] > score[static_cast<size_t>(b)];
        });
        if (static_cast<long>(candidates.size()) > n_keep) candidates.resize(static_cast<size_t>(n_keep));
        return candidates;
    };

    if (fix_ratio) {
        for (int m = 0; m < n_subnetworks; ++m) {
            std::vector<int> aps;
            long k_m = 0;
            for (int l = 0; l < num_aps; ++l)
                if (part.ap_assign[static_cast<size_t>(l)] == m) aps.push_back(l);
            for (int label : linkage.labels)
                if (label == m) ++k_m;
            const long budget = std::min<long>(std::lround(cfg.ap_selection_ratio * static_cast<double>(k_m)),
                                               static_cast<long>(aps.size()));
            for (int l : top_by_score(std::move(aps), budget)) part.ap_active[static_cast<size_t>(l)] = true;
        }
    } else {
        std::vector<int> all(static_cast<size_t>(num_aps));
        std::iota(all.begin(), all.end(), 0);
        const long budget = std::min<long>(std::lround(cfg.ap_selection_ratio * static_cast<double>(num_users)),
                                           static_cast<long>(num_aps));
        for (int l : top_by_score(std::move(all), budget)) part.ap_active[static_cast<size_t>(l)] = true;
    }
    return part;
}

inline Partition run_baseline(const NetworkState& state, int n_subnetworks, const BaselineConfig& cfg) {
    switch (cfg.method) {
        case BaselineMethod::kUserKmeans: return user_centric_kmeans(state, n_subnetworks, cfg);
        case BaselineMethod::kApGmm: return ap_centric_gmm(state, n_subnetworks, cfg);
        case BaselineMethod::kGraphSpectral: return graph_spectral(state, n_subnetworks, cfg);
        case BaselineMethod::kUcrApsel: return hierarchical_apsel(state, n_subnetworks, cfg, true);
        case BaselineMethod::kUcApsel: return hierarchical_apsel(state, n_subnetworks, cfg, false);
    }
    throw ConfigError("baseline: unknown method");
}

}  // namespace c2f
