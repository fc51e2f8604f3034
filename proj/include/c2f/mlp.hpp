#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "c2f/errors.hpp"
#include "c2f/rng.hpp"

namespace c2f {

enum class Activation { kIdentity, kSigmoid };

inline std::string to_string(Activation a) {
    return a == Activation::kSigmoid ? "sigmoid" : "identity";
}

inline Activation activation_from_string(const std::string& s) {
    if (s == "sigmoid") return Activation::kSigmoid;
    if (s == "identity") return Activation::kIdentity;
    throw ConfigError("unknown activation tag '" + s + "'");
}

// Fully-connected network with ReLU hidden layers and a configurable output
// head. Forward/backward operate on column-major batches (one column per
// sample); gradients are exact analytic derivatives, checked against finite
// differences in the test suite.
class Mlp {
public:
    std::vector<int> layer_sizes;          // [input, hidden..., output]
    std::vector<Eigen::MatrixXd> weights;  // per layer: out x in
    std::vector<Eigen::VectorXd> biases;
    Activation head = Activation::kIdentity;

    static Mlp create(std::vector<int> sizes, Activation head, Rng& rng, double final_layer_scale = 1.0) {
        if (sizes.size() < 2) throw ConfigError("mlp: need at least input and output layers");
        Mlp net;
        net.layer_sizes = std::move(sizes);
        net.head = head;
        const size_t n_layers = net.layer_sizes.size() - 1;
        net.weights.reserve(n_layers);
        net.biases.reserve(n_layers);
        for (size_t i = 0; i < n_layers; ++i) {
            const int fan_in = net.layer_sizes[i];
            const int fan_out = net.layer_sizes[i + 1];
            const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
            const double scale = (i + 1 == n_layers) ? final_layer_scale : 1.0;
            Eigen::MatrixXd w(fan_out, fan_in);
            for (int r = 0; r < fan_out; ++r)
                for (int c = 0; c < fan_in; ++c) w(r, c) = scale * rng.uniform(-bound, bound);
            Eigen::VectorXd b(fan_out);
            for (int r = 0; r < fan_out; ++r) b(r) = scale * rng.uniform(-bound, bound);
            net.weights.push_back(std::move(w));
            net.biases.push_back(std::move(b));
        }
        return net;
    }

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    size_t num_layers() const { return weights.size(); }

    long parameter_count() const {
        long n = 0;
        for (size_t i = 0; i < weights.size(); ++i) n += weights[i].size() + biases[i].size();
        return n;
    }

    // Post-activation outputs of every layer, kept for backward().
    struct Cache {
        Eigen::MatrixXd input;
        std::vector<Eigen::MatrixXd> activations;
    };

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache = nullptr) const {
        if (x.rows() != input_size()) throw NumericError("mlp: input width mismatch");
        if (cache) {
            cache->input = x;
            cache->activations.clear();
            cache->activations.reserve(num_layers());
        }
        Eigen::MatrixXd a = x;
        for (size_t i = 0; i < num_layers(); ++i) {
            Eigen::MatrixXd z = (weights[i] * a).colwise() + biases[i];
            if (i + 1 < num_layers()) {
                a = z.cwiseMax(0.0);  // ReLU, subgradient 0 at exactly 0
            } else if (head == Activation::kSigmoid) {
                a = (1.0 + (-z.array()).exp()).inverse().matrix();
            } else {
                a = std::move(z);
            }
            if (cache) cache->activations.push_back(a);
        }
        if (!a.allFinite()) throw NumericError("mlp: non-finite activations");
        return a;
    }

    struct Gradients {
        std::vector<Eigen::MatrixXd> weights;
        std::vector<Eigen::VectorXd> biases;
        Eigen::MatrixXd input;  // dL/dx, same shape as the forward input
    };

    // Backpropagate dL/dy (post-head) through the cached forward pass.
    Gradients backward(const Cache& cache, const Eigen::MatrixXd& grad_output) const {
        Gradients g;
        g.weights.resize(num_layers());
        g.biases.resize(num_layers());

        Eigen::MatrixXd delta;  // dL/dz of the current layer
        const Eigen::MatrixXd& y = cache.activations.back();
        if (head == Activation::kSigmoid)
            delta = (grad_output.array() * y.array() * (1.0 - y.array())).matrix();
        else
            delta = grad_output;

        for (size_t i = num_layers(); i-- > 0;) {
            const Eigen::MatrixXd& below = (i == 0) ? cache.input : cache.activations[i - 1];
            g.weights[i].noalias() = delta * below.transpose();
            g.biases[i] = delta.rowwise().sum();
            Eigen::MatrixXd da = weights[i].transpose() * delta;
            if (i == 0) {
                g.input = std::move(da);
            } else {
                // ReLU mask: active where the stored activation is positive.
                delta = ((cache.activations[i - 1].array() > 0.0).cast<double>() * da.array()).matrix();
            }
        }
        return g;
    }
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// First/second-moment accumulators matching one Mlp's parameters.
struct AdamState {
    std::vector<Eigen::ArrayXXd> m_w, v_w;
    std::vector<Eigen::ArrayXd> m_b, v_b;
    long step = 0;

    static AdamState like(const Mlp& net) {
        AdamState s;
        for (size_t i = 0; i < net.num_layers(); ++i) {
            s.m_w.push_back(Eigen::ArrayXXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
            s.v_w.push_back(Eigen::ArrayXXd::Zero(net.weights[i].rows(), net.weights[i].cols()));
            s.m_b.push_back(Eigen::ArrayXd::Zero(net.biases[i].size()));
            s.v_b.push_back(Eigen::ArrayXd::Zero(net.biases[i].size()));
        }
        return s;
    }
};

// Bias-corrected Adam step, descending along the supplied gradients.
inline void adam_step(Mlp& net, const Mlp::Gradients& grads, AdamState& state, const AdamConfig& cfg) {
    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < net.num_layers(); ++i) {
        auto gw = grads.weights[i].array();
        state.m_w[i] = cfg.beta1 * state.m_w[i] + (1.0 - cfg.beta1) * gw;
        state.v_w[i] = cfg.beta2 * state.v_w[i] + (1.0 - cfg.beta2) * gw.square();
        net.weights[i].array() -= cfg.lr * (state.m_w[i] / bc1) / ((state.v_w[i] / bc2).sqrt() + cfg.eps);

        auto gb = grads.biases[i].array();
        state.m_b[i] = cfg.beta1 * state.m_b[i] + (1.0 - cfg.beta1) * gb;
        state.v_b[i] = cfg.beta2 * state.v_b[i] + (1.0 - cfg.beta2) * gb.square();
        net.biases[i].array() -= cfg.lr * (state.m_b[i] / bc1) / ((state.v_b[i] / bc2).sqrt() + cfg.eps);
    }
}

// Soft target update: target <- delta * online + (1 - delta) * target.
inline void polyak_update(const Mlp& online, Mlp& target, double delta) {
    for (size_t i = 0; i < online.num_layers(); ++i) {
        target.weights[i] = delta * online.weights[i] + (1.0 - delta) * target.weights[i];
        target.biases[i] = delta * online.biases[i] + (1.0 - delta) * target.biases[i];
    }
}

template <typename Json>
Json mlp_to_json(const Mlp& net) {
    Json j;
    j["layer_sizes"] = net.layer_sizes;
    j["activation"] = {{"hidden", "relu"}, {"output", to_string(net.head)}};
    auto& jw = j["weights"];
    for (const auto& w : net.weights) {
        std::vector<std::vector<double>> rows(static_cast<size_t>(w.rows()));
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            rows[static_cast<size_t>(r)].assign(w.row(r).begin(), w.row(r).end());
        jw.push_back(rows);
    }
    auto& jb = j["biases"];
    for (const auto& b : net.biases) jb.push_back(std::vector<double>(b.begin(), b.end()));
    return j;
}

template <typename Json>
Mlp mlp_from_json(const Json& j) {
    Mlp net;
    net.layer_sizes = j.at("layer_sizes").template get<std::vector<int>>();
    net.head = activation_from_string(j.at("activation").at("output").template get<std::string>());
    for (const auto& jw : j.at("weights")) {
        const auto rows = jw.template get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd w(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (size_t r = 0; r < rows.size(); ++r)
            for (size_t c = 0; c < rows[r].size(); ++c) w(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
        net.weights.push_back(std::move(w));
    }
    for (const auto& jb : j.at("biases")) {
        const auto vals = jb.template get<std::vector<double>>();
        net.biases.push_back(Eigen::Map<const Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    if (net.weights.size() != net.biases.size() || net.weights.size() + 1 != net.layer_sizes.size())
        throw ConfigError("mlp checkpoint: inconsistent layer structure");
    return net;
}

}  // namespace c2f
