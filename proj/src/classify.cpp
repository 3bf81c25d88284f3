#include "osmoguard/classify.hpp"

#include "osmoguard/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace osmoguard {

LabeledFeatures frame_features(const TimeSeriesDataset& data) {
    std::vector<const SensorFrame*> valid;
    for (const auto& f : data.frames) {
        if (f.valid) valid.push_back(&f);
    }
    LabeledFeatures out;
    out.x.resize(kChannelCount, static_cast<Eigen::Index>(valid.size()));
    out.y.resize(static_cast<Eigen::Index>(valid.size()));
    for (std::size_t i = 0; i < valid.size(); ++i) {
        out.x.col(static_cast<Eigen::Index>(i)) = valid[i]->values;
        out.y(static_cast<Eigen::Index>(i)) = valid[i]->label == Label::Faulty ? 1.0 : -1.0;
    }
    return out;
}

LabeledFeatures select(const LabeledFeatures& all, const std::vector<Eigen::Index>& idx) {
    LabeledFeatures out;
    out.x.resize(all.x.rows(), static_cast<Eigen::Index>(idx.size()));
    out.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.x.col(static_cast<Eigen::Index>(i)) = all.x.col(idx[i]);
        out.y(static_cast<Eigen::Index>(i)) = all.y(idx[i]);
    }
    return out;
}

Split stratified_split(const Eigen::VectorXd& labels, double holdout_fraction, std::uint64_t seed) {
    if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) throw ArgumentError("holdout fraction must lie in (0,1)");
    std::mt19937_64 rng(seed);
    Split split;
    for (double cls : {-1.0, 1.0}) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index i = 0; i < labels.size(); ++i) {
            if (labels(i) == cls) idx.push_back(i);
        }
        std::shuffle(idx.begin(), idx.end(), rng);
        const auto n_hold = static_cast<std::size_t>(std::llround(holdout_fraction * static_cast<double>(idx.size())));
        split.holdout.insert(split.holdout.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_hold));
        split.train.insert(split.train.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_hold), idx.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.holdout.begin(), split.holdout.end());
    return split;
}

double LinearSvmModel::margin(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != w.size()) {
        throw ArgumentError("svm: expected " + std::to_string(w.size()) + " features, got " + std::to_string(x.size()));
    }
    return w.dot(x) + b;
}

LinearSvmModel train_svm(const LabeledFeatures& samples, const SvmConfig& cfg) {
    if (!(cfg.lambda > 0.0) || !std::isfinite(cfg.lambda)) throw ArgumentError("svm: lambda must be positive");
    if (cfg.epochs < 1) throw ArgumentError("svm: epochs must be positive");
    const Eigen::Index n = samples.size();
    if (samples.y.size() != n) throw ArgumentError("svm: label count does not match sample count");
    bool has_pos = false;
    bool has_neg = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (samples.y(i) == 1.0) has_pos = true;
        else if (samples.y(i) == -1.0) has_neg = true;
        else throw ArgumentError("svm: labels must be -1 or +1");
    }
    if (!has_pos || !has_neg) throw ArgumentError("svm: both classes must be present");

    LinearSvmModel model;
    model.w = Eigen::VectorXd::Zero(samples.x.rows());
    model.lambda = cfg.lambda;
    const double radius = 1.0 / std::sqrt(cfg.lambda);

    std::mt19937_64 rng(cfg.seed);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});

    std::int64_t t = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (Eigen::Index i : order) {
            ++t;
            const double eta = 1.0 / (cfg.lambda * static_cast<double>(t));
            const double y = samples.y(i);
            const bool violated = y * (model.w.dot(samples.x.col(i)) + model.b) < 1.0;
            model.w *= 1.0 - eta * cfg.lambda;
            if (violated) {
                model.w += (eta * y) * samples.x.col(i);
                model.b += eta * y;
            }
            // Projection onto the ball that contains the optimum.
            const double norm = model.w.norm();
            if (norm > radius) model.w *= radius / norm;
        }
    }
    return model;
}

int predict(const LinearSvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return model.margin(x) >= 0.0 ? 1 : -1;
}

double ConfusionMatrix::accuracy() const {
    return total() == 0 ? 0.0 : static_cast<double>(tp + tn) / static_cast<double>(total());
}

double ConfusionMatrix::precision() const {
    return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double ConfusionMatrix::recall() const {
    return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double ConfusionMatrix::f_score() const {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

ConfusionMatrix confusion(const std::vector<int>& predicted, const Eigen::VectorXd& truth) {
    if (static_cast<Eigen::Index>(predicted.size()) != truth.size()) throw ArgumentError("confusion: size mismatch");
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool actual = truth(static_cast<Eigen::Index>(i)) > 0.0;
        const bool said = predicted[i] > 0;
        if (actual && said) ++cm.tp;
        else if (!actual && said) ++cm.fp;
        else if (!actual) ++cm.tn;
        else ++cm.fn;
    }
    return cm;
}

ConfusionMatrix confusion(const LinearSvmModel& model, const LabeledFeatures& holdout) {
    std::vector<int> predicted;
    predicted.reserve(static_cast<std::size_t>(holdout.size()));
    for (Eigen::Index i = 0; i < holdout.size(); ++i) predicted.push_back(predict(model, holdout.x.col(i)));
    return confusion(predicted, holdout.y);
}

void save_svm(std::ostream& out, const LinearSvmModel& model) {
    out << "OSMOGUARD-SVM v1\n";
    for (Eigen::Index i = 0; i < model.w.size(); ++i) out << (i ? " " : "") << format_double(model.w(i));
    out << '\n' << format_double(model.b) << '\n' << format_double(model.lambda) << '\n';
}

void save_svm(const std::string& path, const LinearSvmModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    save_svm(out, model);
    if (!out) throw IoError("write failed: " + path);
}

LinearSvmModel load_svm(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "OSMOGUARD-SVM v1") throw IoError("svm: missing 'OSMOGUARD-SVM v1' header");
    LinearSvmModel model;
    try {
        if (!std::getline(in, line)) throw IoError("svm: missing weights");
        std::istringstream ws(line);
        std::vector<double> w;
        std::string tok;
        while (ws >> tok) w.push_back(parse_double(tok));
        model.w = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
        if (!std::getline(in, line)) throw IoError("svm: missing bias");
        model.b = parse_double(line);
        if (std::getline(in, line) && !line.empty()) model.lambda = parse_double(line);
    } catch (const ArgumentError& e) {
        throw IoError(std::string("svm: ") + e.what());
    }
    if (!model.w.allFinite() || !std::isfinite(model.b)) throw IoError("svm: non-finite parameters");
    return model;
}

LinearSvmModel load_svm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return load_svm(in);
}

MlpModel train_mlp_classifier(const LabeledFeatures& samples, const std::vector<int>& hidden, const TrainConfig& cfg) {
    std::vector<int> sizes{static_cast<int>(samples.x.rows())};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    Samples batch;
    batch.inputs = samples.x;
    batch.targets = ((samples.y.array() + 1.0) * 0.5).matrix().transpose();
    return train(MlpModel::random(sizes, cfg.seed, Activation::Logistic), batch, cfg).model;
}

int predict_mlp(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x) {
    return forward(model, Eigen::VectorXd(x))(0, 0) >= 0.5 ? 1 : -1;
}

ConfusionMatrix confusion(const MlpModel& model, const LabeledFeatures& holdout) {
    const Eigen::MatrixXd out = forward(model, holdout.x);
    std::vector<int> predicted;
    predicted.reserve(static_cast<std::size_t>(holdout.size()));
    for (Eigen::Index i = 0; i < holdout.size(); ++i) predicted.push_back(out(0, i) >= 0.5 ? 1 : -1);
    return confusion(predicted, holdout.y);
}

}  // namespace osmoguard
