#include "osmoguard/classify.hpp"
#include "osmoguard/plant_sim.hpp"
#include "osmoguard/preprocess.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace osmoguard;

namespace {

LabeledFeatures two_points() {
    LabeledFeatures s;
    s.x.resize(2, 2);
    s.x << 0, 1, 0, 1;
    s.y = Eigen::Vector2d(-1, 1);
    return s;
}

// Points in [0,1]^6 labeled by a random hyperplane, with a gap of `margin`
// around it (distance in feature units).
LabeledFeatures separable(int n, double margin, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g;
    Eigen::VectorXd normal = Eigen::VectorXd::NullaryExpr(6, [&] { return g(rng); }).normalized();
    const double offset = normal.dot(Eigen::VectorXd::Constant(6, 0.5));
    LabeledFeatures s;
    s.x.resize(6, n);
    s.y.resize(n);
    for (int i = 0; i < n;) {
        Eigen::VectorXd x = Eigen::VectorXd::NullaryExpr(6, [&] { return u(rng); });
        const double d = normal.dot(x) - offset;
        if (std::abs(d) < margin / 2) continue;
        s.x.col(i) = x;
        s.y(i) = d > 0 ? 1 : -1;
        ++i;
    }
    return s;
}

double training_accuracy(const LinearSvmModel& m, const LabeledFeatures& s) { return confusion(m, s).accuracy(); }

}  // namespace

TEST_CASE("predict uses the sign with ties going to +1") {
    LinearSvmModel m;
    m.w = Eigen::VectorXd::Zero(6);
    m.w(0) = 1.0;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(6);
    x(0) = 2.0;
    CHECK(predict(m, x) == 1);
    x(0) = -2.0;
    CHECK(predict(m, x) == -1);
    x(0) = 0.0;
    CHECK(predict(m, x) == 1);
    CHECK_THROWS_AS(predict(m, Eigen::VectorXd::Zero(5)), ArgumentError);
}

TEST_CASE("train_svm separates two points") {
    SvmConfig cfg;
    cfg.lambda = 0.01;
    cfg.epochs = 1000;
    const auto m = train_svm(two_points(), cfg);
    CHECK(training_accuracy(m, two_points()) == 1.0);
    CHECK(m.lambda == 0.01);
    CHECK(m.w.size() == 2);
}

TEST_CASE("flipping the labels negates the model") {
    const auto s = separable(300, 0.1, 4);
    auto flipped = s;
    flipped.y = -s.y;
    const auto a = train_svm(s);
    const auto b = train_svm(flipped);
    CHECK((a.w + b.w).cwiseAbs().maxCoeff() <= 1e-9 * a.w.cwiseAbs().maxCoeff());
    CHECK(std::abs(a.b + b.b) <= 1e-9 * std::max(1.0, std::abs(a.b)));
    CHECK(training_accuracy(a, s) == training_accuracy(b, flipped));
}

TEST_CASE("property: separable data with margin 0.1 is fit exactly") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto s = separable(1000, 0.1, seed);
        CHECK(training_accuracy(train_svm(s), s) == 1.0);
    }
}

TEST_CASE("property: positive rescaling of (w, b) keeps every prediction") {
    const auto s = separable(200, 0.0, 9);
    const auto m = train_svm(s);
    for (double k : {1e-6, 0.5, 3.0, 1e6}) {
        LinearSvmModel scaled = m;
        scaled.w *= k;
        scaled.b *= k;
        for (Eigen::Index i = 0; i < s.size(); ++i) CHECK(predict(scaled, s.x.col(i)) == predict(m, s.x.col(i)));
    }
}

TEST_CASE("train_svm is deterministic given the seed") {
    const auto s = separable(200, 0.05, 2);
    const auto a = train_svm(s);
    const auto b = train_svm(s);
    CHECK(a.w == b.w);
    CHECK(a.b == b.b);
}

TEST_CASE("train_svm errors") {
    auto s = two_points();
    s.y(0) = 1;
    CHECK_THROWS_AS(train_svm(s), ArgumentError);
    s.y(0) = 0;
    CHECK_THROWS_AS(train_svm(s), ArgumentError);
    SvmConfig bad;
    bad.lambda = 0;
    CHECK_THROWS_AS(train_svm(two_points(), bad), ArgumentError);
}

TEST_CASE("confusion examples") {
    const Eigen::VectorXd truth = (Eigen::VectorXd(4) << 1, 1, -1, -1).finished();
    auto c = confusion(std::vector<int>{1, 1, -1, -1}, truth);
    CHECK(c.accuracy() == 1.0);
    CHECK(c.f_score() == 1.0);

    c = confusion(std::vector<int>(3, -1), Eigen::VectorXd::Ones(3));
    CHECK(c.fn == 3);
    CHECK(c.recall() == 0.0);
    CHECK(c.precision() == 0.0);
    CHECK(c.f_score() == 0.0);

    Eigen::VectorXd ten(10);
    ten << 1, 1, 1, 1, 1, -1, -1, -1, -1, -1;
    c = confusion(std::vector<int>{1, 1, 1, 1, -1, -1, -1, -1, -1, -1}, ten);
    CHECK(c.total() == 10);
    CHECK(c.accuracy() == doctest::Approx(0.9));
    CHECK(c.tp == 4);
    CHECK(c.fn == 1);
    CHECK(c.recall() == doctest::Approx(0.8));
    CHECK(c.precision() == 1.0);
    CHECK(c.f_score() == doctest::Approx(2 * 0.8 / 1.8));
}

TEST_CASE("frame_features and stratified_split") {
    auto d = simulate(PlantConfig{}, 40);
    d = inject_fault(d, {FaultKind::SensorBias, Channel::QE270_5_1, 20, 2.0, 0});
    d.frames[5].valid = false;
    const auto f = frame_features(d);
    REQUIRE(f.size() == 39);
    CHECK(f.y(0) == -1);
    CHECK(f.y(38) == 1);
    CHECK(f.x.col(5) == d.frames[6].values);
    CHECK((f.y.array() == 1).count() == 20);

    const auto split = stratified_split(f.y, 0.25, 3);
    CHECK(split.train.size() + split.holdout.size() == 39);
    CHECK(split.holdout.size() == 10);  // 5 of 20 faulty, 5 of 19 normal
    std::vector<Eigen::Index> all = split.train;
    all.insert(all.end(), split.holdout.begin(), split.holdout.end());
    std::sort(all.begin(), all.end());
    for (Eigen::Index i = 0; i < 39; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);
}

TEST_CASE("SVM model file round-trips") {
    const auto m = train_svm(separable(100, 0.1, 1));
    std::stringstream ss;
    save_svm(ss, m);
    const auto text = ss.str();
    CHECK(text.rfind("OSMOGUARD-SVM v1\n", 0) == 0);
    const auto back = load_svm(ss);
    CHECK(back.w == m.w);
    CHECK(back.b == m.b);
    CHECK(back.lambda == m.lambda);
    std::istringstream bad("OSMOGUARD-SVM v1\n1 2\n");
    CHECK_THROWS_AS(load_svm(bad), IoError);
}

TEST_CASE("MLP classifier separates a bias fault") {
    PlantConfig cfg;
    const auto normal = simulate(cfg, 600);
    cfg.seed = 2;
    const auto faulty = inject_fault(simulate(cfg, 600), {FaultKind::SensorBias, Channel::QE270_5_1, 0, 2.0, 0});
    TimeSeriesDataset all = normal;
    for (auto f : faulty.frames) {
        f.t += 600;
        all.frames.push_back(f);
    }
    const auto norm = fit_normalizer(all);
    const auto feats = frame_features(normalize(norm, all));
    const auto split = stratified_split(feats.y, 0.25, 1);
    TrainConfig tc;
    tc.epochs = 50;
    tc.split = SplitMode::Random;
    const auto m = train_mlp_classifier(select(feats, split.train), {8}, tc);
    CHECK(m.output == Activation::Logistic);
    CHECK(confusion(m, select(feats, split.holdout)).accuracy() == 1.0);
    CHECK(confusion(train_svm(select(feats, split.train)), select(feats, split.holdout)).accuracy() == 1.0);
}
