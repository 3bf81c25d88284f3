#pragma once

#include "osmoguard/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace osmoguard {

enum class Activation { Tanh, Identity, Logistic };

std::string_view activation_name(Activation a);
Activation parse_activation(std::string_view name);

// Fully connected feedforward network. weights[l] maps layer l to layer l+1
// and has shape layer_sizes[l+1] x layer_sizes[l]. Hidden layers use
// `hidden`, the last layer uses `output`.
template <typename Scalar>
struct Mlp {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    std::vector<int> layer_sizes;
    std::vector<Matrix> weights;
    std::vector<Vector> biases;
    Activation hidden = Activation::Tanh;
    Activation output = Activation::Identity;

    int input_size() const { return layer_sizes.front(); }
    int output_size() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return weights.size(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }

    Activation activation(std::size_t layer) const { return layer + 1 == weights.size() ? output : hidden; }

    void validate() const {
        if (layer_sizes.size() < 2) throw ArgumentError("mlp: need at least input and output layers");
        for (int s : layer_sizes) {
            if (s < 1) throw ArgumentError("mlp: layer sizes must be positive");
        }
        if (weights.size() != layer_sizes.size() - 1 || biases.size() != weights.size()) {
            throw ArgumentError("mlp: layer count mismatch");
        }
        for (std::size_t l = 0; l < weights.size(); ++l) {
            if (weights[l].rows() != layer_sizes[l + 1] || weights[l].cols() != layer_sizes[l] ||
                biases[l].size() != layer_sizes[l + 1]) {
                throw ArgumentError("mlp: layer " + std::to_string(l) + " shape does not match layer sizes");
            }
            if (!weights[l].allFinite() || !biases[l].allFinite()) throw ArgumentError("mlp: non-finite parameter");
        }
    }

    static Mlp zeros(std::vector<int> sizes, Activation out = Activation::Identity) {
        Mlp m;
        m.layer_sizes = std::move(sizes);
        m.output = out;
        if (m.layer_sizes.size() < 2) throw ArgumentError("mlp: need at least input and output layers");
        for (std::size_t l = 0; l + 1 < m.layer_sizes.size(); ++l) {
            if (m.layer_sizes[l] < 1 || m.layer_sizes[l + 1] < 1) throw ArgumentError("mlp: layer sizes must be positive");
            m.weights.push_back(Matrix::Zero(m.layer_sizes[l + 1], m.layer_sizes[l]));
            m.biases.push_back(Vector::Zero(m.layer_sizes[l + 1]));
        }
        return m;
    }

    // Uniform in +-1/sqrt(fan_in), weights then biases, layer by layer.
    static Mlp random(std::vector<int> sizes, std::uint64_t seed, Activation out = Activation::Identity) {
        Mlp m = zeros(std::move(sizes), out);
        std::mt19937_64 rng(seed);
        for (std::size_t l = 0; l < m.weights.size(); ++l) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(m.layer_sizes[l]));
            std::uniform_real_distribution<double> dist(-bound, bound);
            for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j) {
                for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i) m.weights[l](i, j) = Scalar(dist(rng));
            }
            for (Eigen::Index i = 0; i < m.biases[l].size(); ++i) m.biases[l](i) = Scalar(dist(rng));
        }
        return m;
    }
};

using MlpModel = Mlp<double>;

// Same shape as the model's parameters.
template <typename Scalar>
struct MlpGradient {
    std::vector<typename Mlp<Scalar>::Matrix> weights;
    std::vector<typename Mlp<Scalar>::Vector> biases;
};

// Column-per-sample batch: inputs is (input_size x N), targets (output_size x N).
template <typename Scalar>
struct SampleBatch {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> inputs;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> targets;

    Eigen::Index size() const { return inputs.cols(); }
};

using Samples = SampleBatch<double>;

namespace detail {

template <typename Derived>
void activate_inplace(Eigen::MatrixBase<Derived>& z, Activation a) {
    using Scalar = typename Derived::Scalar;
    switch (a) {
        case Activation::Tanh: z = z.array().tanh().matrix(); break;
        case Activation::Logistic: z = (Scalar(1) / (Scalar(1) + (-z.array()).exp())).matrix(); break;
        case Activation::Identity: break;
    }
}

// Derivative of the activation expressed through its output value.
template <typename Derived>
auto activation_slope(const Eigen::MatrixBase<Derived>& a, Activation act) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    switch (act) {
        case Activation::Tanh: return Matrix((Scalar(1) - a.array().square()).matrix());
        case Activation::Logistic: return Matrix((a.array() * (Scalar(1) - a.array())).matrix());
        case Activation::Identity: break;
    }
    return Matrix(Matrix::Ones(a.rows(), a.cols()));
}

template <typename Scalar>
void check_batch(const Mlp<Scalar>& model, const SampleBatch<Scalar>& batch) {
    if (batch.size() == 0) throw ArgumentError("mlp: empty batch");
    if (batch.inputs.rows() != model.input_size()) throw ArgumentError("mlp: input dimension mismatch");
    if (batch.targets.rows() != model.output_size() || batch.targets.cols() != batch.inputs.cols()) {
        throw ArgumentError("mlp: target dimension mismatch");
    }
}

}  // namespace detail

// Layer activations for a batch; element 0 is the input, the last the output.
template <typename Scalar, typename Derived>
std::vector<typename Mlp<Scalar>::Matrix> forward_trace(const Mlp<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
    if (x.rows() != model.input_size()) {
        throw ArgumentError("mlp: expected input of size " + std::to_string(model.input_size()) + ", got " +
                            std::to_string(x.rows()));
    }
    std::vector<typename Mlp<Scalar>::Matrix> acts;
    acts.reserve(model.layer_count() + 1);
    acts.emplace_back(x);
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        typename Mlp<Scalar>::Matrix z = model.weights[l] * acts.back();
        z.colwise() += model.biases[l];
        detail::activate_inplace(z, model.activation(l));
        acts.push_back(std::move(z));
    }
    return acts;
}

// Network output for one input vector or a column-per-sample batch.
template <typename Scalar, typename Derived>
typename Mlp<Scalar>::Matrix forward(const Mlp<Scalar>& model, const Eigen::MatrixBase<Derived>& x) {
    return std::move(forward_trace(model, x).back());
}

template <typename Scalar>
Scalar mse(const Mlp<Scalar>& model, const SampleBatch<Scalar>& batch) {
    detail::check_batch(model, batch);
    return (forward(model, batch.inputs) - batch.targets).squaredNorm() / Scalar(batch.size());
}

// Backpropagated gradient of the batch loss
//   L = (1/N) * sum_i ||f(x_i) - t_i||^2.
template <typename Scalar>
MlpGradient<Scalar> gradient(const Mlp<Scalar>& model, const SampleBatch<Scalar>& batch) {
    detail::check_batch(model, batch);
    const auto acts = forward_trace(model, batch.inputs);
    const std::size_t layers = model.layer_count();

    MlpGradient<Scalar> g;
    g.weights.resize(layers);
    g.biases.resize(layers);

    typename Mlp<Scalar>::Matrix delta = (acts.back() - batch.targets) * (Scalar(2) / Scalar(batch.size()));
    delta = delta.cwiseProduct(detail::activation_slope(acts.back(), model.output));
    for (std::size_t l = layers; l-- > 0;) {
        g.weights[l] = delta * acts[l].transpose();
        g.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            typename Mlp<Scalar>::Matrix back = model.weights[l].transpose() * delta;
            delta = back.cwiseProduct(detail::activation_slope(acts[l], model.hidden));
        }
    }
    return g;
}

// All parameters flattened: for each layer, weights column-major then biases.
template <typename Scalar>
typename Mlp<Scalar>::Vector flatten_parameters(const Mlp<Scalar>& model) {
    typename Mlp<Scalar>::Vector out(static_cast<Eigen::Index>(model.parameter_count()));
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        const auto& w = model.weights[l];
        out.segment(pos, w.size()) = Eigen::Map<const typename Mlp<Scalar>::Vector>(w.data(), w.size());
        pos += w.size();
        out.segment(pos, model.biases[l].size()) = model.biases[l];
        pos += model.biases[l].size();
    }
    return out;
}

template <typename Scalar>
typename Mlp<Scalar>::Vector flatten_gradient(const MlpGradient<Scalar>& g) {
    Eigen::Index total = 0;
    for (std::size_t l = 0; l < g.weights.size(); ++l) total += g.weights[l].size() + g.biases[l].size();
    typename Mlp<Scalar>::Vector out(total);
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
        const auto& w = g.weights[l];
        out.segment(pos, w.size()) = Eigen::Map<const typename Mlp<Scalar>::Vector>(w.data(), w.size());
        pos += w.size();
        out.segment(pos, g.biases[l].size()) = g.biases[l];
        pos += g.biases[l].size();
    }
    return out;
}

template <typename Scalar, typename Derived>
void assign_parameters(Mlp<Scalar>& model, const Eigen::MatrixBase<Derived>& flat) {
    if (flat.size() != static_cast<Eigen::Index>(model.parameter_count())) {
        throw ArgumentError("mlp: parameter vector has wrong length");
    }
    Eigen::Index pos = 0;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        auto& w = model.weights[l];
        Eigen::Map<typename Mlp<Scalar>::Vector>(w.data(), w.size()) = flat.segment(pos, w.size());
        pos += w.size();
        model.biases[l] = flat.segment(pos, model.biases[l].size());
        pos += model.biases[l].size();
    }
}

// ---------------------------------------------------------------------------
// Training

enum class SplitMode { Chronological, Random };

// Sgd is plain mini-batch descent with heavy-ball momentum; Adam rescales
// each coordinate by running moment estimates (beta1 = 0.9, beta2 = 0.999).
enum class Optimizer { Sgd, Adam };

struct TrainConfig {
    Optimizer optimizer = Optimizer::Adam;
    double learning_rate = 0.01;
    int epochs = 200;
    int batch_size = 32;
    double momentum = 0.9;
    // Cosine annealing: the step in epoch e is
    // learning_rate * (1 + cos(pi * e / epochs)) / 2; otherwise constant.
    bool anneal = true;
    std::uint64_t seed = 7;
    double train_fraction = 0.75;
    bool shuffle = true;
    SplitMode split = SplitMode::Chronological;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning_rate", "must be positive");
        if (epochs < 0) throw ConfigError("epochs", "must be non-negative");
        if (batch_size < 1) throw ConfigError("batch_size", "must be positive");
        if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum", "must lie in [0,1)");
        if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw ConfigError("train_fraction", "must lie in (0,1)");
    }
};

template <typename Scalar>
struct TrainResult {
    Mlp<Scalar> model;
    std::vector<Scalar> loss_history;  // training MSE after each epoch
    Scalar train_mse{};
    Scalar holdout_mse{};
    std::vector<Eigen::Index> train_indices;
    std::vector<Eigen::Index> holdout_indices;
};

template <typename Scalar>
SampleBatch<Scalar> select(const SampleBatch<Scalar>& all, const std::vector<Eigen::Index>& idx) {
    SampleBatch<Scalar> out;
    out.inputs.resize(all.inputs.rows(), static_cast<Eigen::Index>(idx.size()));
    out.targets.resize(all.targets.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.inputs.col(static_cast<Eigen::Index>(i)) = all.inputs.col(idx[i]);
        out.targets.col(static_cast<Eigen::Index>(i)) = all.targets.col(idx[i]);
    }
    return out;
}

// Splits `pairs` into a training part (first train_fraction, chronologically
// or after a seeded permutation) and a holdout, then runs cfg.epochs passes
// of mini-batch descent with the configured optimizer.
template <typename Scalar>
TrainResult<Scalar> train(const Mlp<Scalar>& initial, const SampleBatch<Scalar>& pairs, const TrainConfig& cfg) {
    cfg.validate();
    initial.validate();
    if (pairs.size() < 2) throw ArgumentError("train: need at least 2 pairs");
    detail::check_batch(initial, pairs);

    const Eigen::Index n = pairs.size();
    const auto n_train = static_cast<Eigen::Index>(std::floor(cfg.train_fraction * static_cast<double>(n)));
    if (n_train < 1 || n_train >= n) throw ArgumentError("train: split leaves one side empty");

    std::mt19937_64 rng(cfg.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    if (cfg.split == SplitMode::Random) std::shuffle(order.begin(), order.end(), rng);

    TrainResult<Scalar> result;
    result.train_indices.assign(order.begin(), order.begin() + n_train);
    result.holdout_indices.assign(order.begin() + n_train, order.end());
    const SampleBatch<Scalar> train_set = select(pairs, result.train_indices);
    const SampleBatch<Scalar> holdout_set = select(pairs, result.holdout_indices);

    Mlp<Scalar> model = initial;
    typename Mlp<Scalar>::Vector params = flatten_parameters(model);
    typename Mlp<Scalar>::Vector velocity = Mlp<Scalar>::Vector::Zero(params.size());
    typename Mlp<Scalar>::Vector second = Mlp<Scalar>::Vector::Zero(params.size());
    const Scalar beta1(0.9), beta2(0.999), eps(1e-8);
    Scalar beta1_pow(1), beta2_pow(1);
    std::vector<Eigen::Index> visit(static_cast<std::size_t>(n_train));
    std::iota(visit.begin(), visit.end(), Eigen::Index{0});

    const auto mu = Scalar(cfg.momentum);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double pi = 3.141592653589793;
        const auto lr = Scalar(cfg.anneal ? cfg.learning_rate * 0.5 * (1.0 + std::cos(pi * epoch / cfg.epochs))
                                          : cfg.learning_rate);
        if (cfg.shuffle) std::shuffle(visit.begin(), visit.end(), rng);
        for (std::size_t start = 0; start < visit.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t stop = std::min(visit.size(), start + static_cast<std::size_t>(cfg.batch_size));
            const std::vector<Eigen::Index> idx(visit.begin() + static_cast<std::ptrdiff_t>(start),
                                                visit.begin() + static_cast<std::ptrdiff_t>(stop));
            const auto g = flatten_gradient(gradient(model, select(train_set, idx)));
            if (cfg.optimizer == Optimizer::Sgd) {
                velocity = mu * velocity - lr * g;
                params += velocity;
            } else {
                beta1_pow *= beta1;
                beta2_pow *= beta2;
                velocity = beta1 * velocity + (Scalar(1) - beta1) * g;
                second = beta2 * second + (Scalar(1) - beta2) * g.cwiseAbs2();
                const Scalar step = lr * std::sqrt(Scalar(1) - beta2_pow) / (Scalar(1) - beta1_pow);
                params.array() -= step * velocity.array() / (second.array().sqrt() + eps);
            }
            assign_parameters(model, params);
        }
        result.loss_history.push_back(mse(model, train_set));
    }
    if (!flatten_parameters(model).allFinite()) throw StateError("train: parameters diverged");

    result.train_mse = mse(model, train_set);
    result.holdout_mse = mse(model, holdout_set);
    result.model = std::move(model);
    return result;
}

}  // namespace osmoguard
