#pragma once

#include "osmoguard/dataset.hpp"
#include "osmoguard/mlp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace osmoguard {

// Labeled feature matrix: one column per sample, labels in {-1, +1}
// (+1 = faulty).
struct LabeledFeatures {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;

    Eigen::Index size() const { return x.cols(); }
};

// Six channel values per valid frame; invalid frames are skipped.
LabeledFeatures frame_features(const TimeSeriesDataset& data);

LabeledFeatures select(const LabeledFeatures& all, const std::vector<Eigen::Index>& idx);

struct Split {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> holdout;
};

// Per-class seeded shuffle; `holdout_fraction` of each class is held out.
Split stratified_split(const Eigen::VectorXd& labels, double holdout_fraction, std::uint64_t seed);

struct LinearSvmModel {
    Eigen::VectorXd w;
    double b = 0.0;
    double lambda = 0.0;

    double margin(const Eigen::Ref<const Eigen::VectorXd>& x) const;
};

struct SvmConfig {
    double lambda = 1e-4;
    int epochs = 200;
    std::uint64_t seed = 11;
};

// Pegasos: minimizes lambda/2 |w|^2 + mean(max(0, 1 - y (w.x + b))) with
// step 1/(lambda t). The bias is an unregularized extra coordinate.
LinearSvmModel train_svm(const LabeledFeatures& samples, const SvmConfig& cfg = {});

// sign(w.x + b), ties go to +1.
int predict(const LinearSvmModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);

struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;

    std::size_t total() const { return tp + fp + tn + fn; }
    double accuracy() const;
    double precision() const;
    double recall() const;
    double f_score() const;
};

ConfusionMatrix confusion(const LinearSvmModel& model, const LabeledFeatures& holdout);
ConfusionMatrix confusion(const std::vector<int>& predicted, const Eigen::VectorXd& truth);

// OSMOGUARD-SVM v1, then w components on one line, b, lambda.
void save_svm(std::ostream& out, const LinearSvmModel& model);
void save_svm(const std::string& path, const LinearSvmModel& model);
LinearSvmModel load_svm(std::istream& in);
LinearSvmModel load_svm(const std::string& path);

// MLP classifier: tanh hidden layers, logistic output trained toward 0/1.
MlpModel train_mlp_classifier(const LabeledFeatures& samples, const std::vector<int>& hidden, const TrainConfig& cfg);
int predict_mlp(const MlpModel& model, const Eigen::Ref<const Eigen::VectorXd>& x);
ConfusionMatrix confusion(const MlpModel& model, const LabeledFeatures& holdout);

}  // namespace osmoguard
