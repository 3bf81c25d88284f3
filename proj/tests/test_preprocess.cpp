#include "oracles.hpp"

#include "osmoguard/plant_sim.hpp"
#include "osmoguard/preprocess.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>
#include <sstream>

using namespace osmoguard;

namespace {

TimeSeriesDataset with_channel(std::initializer_list<double> values, Channel c) {
    TimeSeriesDataset d;
    std::int64_t t = 0;
    for (double v : values) {
        SensorFrame f;
        f.t = t++;
        f.values.setConstant(1.0);
        f[c] = v;
        d.frames.push_back(f);
    }
    return d;
}

std::string to_csv(const TimeSeriesDataset& d) {
    std::ostringstream os;
    write_csv(os, d);
    return os.str();
}

}  // namespace

TEST_CASE("cleanse keeps a clean dataset intact") {
    const auto d = simulate(PlantConfig{}, 200);
    const auto r = cleanse(d);
    CHECK(r.report.rows_in == 200);
    CHECK(r.report.rows_dropped == 0);
    CHECK(r.report.reasons.empty());
    CHECK(to_csv(r.data) == to_csv(d));
}

TEST_CASE("cleanse drops invalid rows") {
    auto d = simulate(PlantConfig{}, 10);
    d.frames[3].valid = false;
    d.frames[7].valid = false;
    const auto r = cleanse(d);
    CHECK(r.data.size() == 8);
    CHECK(r.report.rows_dropped == 2);
    CHECK(r.report.reasons.size() == 1);
    CHECK(r.report.reasons.at(DropReason::InvalidFlag) == 2);
    CHECK(r.data.frames[3].t == 4);
}

TEST_CASE("cleanse reasons are counted once in priority order") {
    auto d = simulate(PlantConfig{}, 6);
    d.frames[0][Channel::QE270_6_1] = -5.0;
    d.frames[1][Channel::PT270_5_1] = std::nan("");
    d.frames[2].valid = false;
    d.frames[2][Channel::PT270_5_1] = INFINITY;  // invalid wins over non-finite
    d.frames[3][Channel::PT270_5_4] = 41.0;
    d.frames[3][Channel::QE270_5_1] = std::nan("");  // non-finite wins over range
    const auto r = cleanse(d);
    CHECK(r.report.rows_dropped == 4);
    CHECK(r.report.reasons.at(DropReason::OutOfPhysicalRange) == 1);
    CHECK(r.report.reasons.at(DropReason::NonFinite) == 2);
    CHECK(r.report.reasons.at(DropReason::InvalidFlag) == 1);
    std::size_t sum = 0;
    for (const auto& [_, n] : r.report.reasons) sum += n;
    CHECK(sum == r.report.rows_dropped);
    REQUIRE(r.data.size() == 2);
    CHECK(r.data.frames[0].t == 4);
}

TEST_CASE("cleanse rejects inverted ranges and is idempotent") {
    auto ranges = default_physical_ranges();
    ranges[0] = {5.0, 5.0};
    CHECK_THROWS_AS(cleanse(TimeSeriesDataset{}, ranges), ArgumentError);

    auto d = simulate(PlantConfig{}, 300);
    d = inject_fault(d, {FaultKind::Outage, std::nullopt, 20, 0.0, 15});
    d.frames[100][Channel::QE270_6_2] = 5000.0;
    const auto once = cleanse(d).data;
    const auto twice = cleanse(once);
    CHECK(twice.report.rows_dropped == 0);
    CHECK(to_csv(twice.data) == to_csv(once));
}

TEST_CASE("fit_normalizer takes per-channel extrema") {
    const auto n = fit_normalizer(with_channel({2, 4, 6}, Channel::QE270_5_1));
    CHECK(n.min(index(Channel::QE270_5_1)) == 2.0);
    CHECK(n.max(index(Channel::QE270_5_1)) == 6.0);
    const auto flat = fit_normalizer(with_channel({5, 5, 5}, Channel::PT270_6_3));
    CHECK(flat.min(index(Channel::PT270_6_3)) == 5.0);
    CHECK(flat.max(index(Channel::PT270_6_3)) == 5.0);
    CHECK_THROWS_AS(fit_normalizer(TimeSeriesDataset{}), ArgumentError);
}

TEST_CASE("EDI conductivity range sits below the RO range") {
    const auto d = simulate(PlantConfig{}, 1000);
    const auto n = fit_normalizer(d);
    // Oracle: scan the stream directly.
    double edi_max = -INFINITY, ro_max = -INFINITY;
    for (const auto& f : d.frames) {
        edi_max = std::max(edi_max, f[Channel::QE270_6_1]);
        ro_max = std::max(ro_max, f[Channel::QE270_5_1]);
    }
    CHECK(n.max(index(Channel::QE270_6_1)) == edi_max);
    CHECK(n.max(index(Channel::QE270_5_1)) == ro_max);
    CHECK(edi_max < ro_max);
}

TEST_CASE("normalize maps onto the fitted range") {
    Normalizer n;
    n.min.setZero();
    n.max.setConstant(10.0);
    n.min(1) = 2.0;
    n.max(1) = 2.0;
    CHECK(n.apply(Channel::PT270_5_1, 5.0) == 0.5);
    CHECK(n.apply(Channel::PT270_5_1, 0.0) == 0.0);
    CHECK(n.apply(Channel::PT270_5_1, 10.0) == 1.0);
    CHECK(n.apply(Channel::PT270_5_4, 2.0) == 0.0);
    CHECK(n.apply(Channel::PT270_5_1, 15.0) == 1.5);  // no clamping

    const auto d = with_channel({2, 4, 6}, Channel::QE270_5_1);
    const auto out = normalize(fit_normalizer(d), d);
    CHECK(out.frames[0][Channel::QE270_5_1] == 0.0);
    CHECK(out.frames[1][Channel::QE270_5_1] == 0.5);
    CHECK(out.frames[2][Channel::QE270_5_1] == 1.0);
    CHECK(out.frames[1][Channel::PT270_5_1] == 0.0);  // constant channel
    CHECK(out.provenance.normalized);
}

TEST_CASE("property: normalize then invert recovers the value") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-1000.0, 1000.0);
    for (int trial = 0; trial < 2000; ++trial) {
        Normalizer n;
        double a = u(rng), b = u(rng);
        if (a == b) continue;
        n.min.setConstant(std::min(a, b));
        n.max.setConstant(std::max(a, b));
        const double x = u(rng);
        const double back = n.invert(Channel::QE270_6_2, n.apply(Channel::QE270_6_2, x));
        CHECK(std::abs(back - x) <= 1e-12 * std::max(1.0, std::abs(x)) + 1e-12 * (n.max(0) - n.min(0)));
    }
}

TEST_CASE("normalizer file round-trips exactly") {
    const auto n = fit_normalizer(simulate(PlantConfig{}, 300));
    const auto path = (std::filesystem::temp_directory_path() / "osmoguard_norm_test.txt").string();
    save_normalizer(path, n);
    const auto back = load_normalizer(path);
    CHECK(back.min == n.min);
    CHECK(back.max == n.max);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_normalizer(path), IoError);
}

TEST_CASE("savgol weights: degree 0 is a moving average") {
    const auto w = savgol_coefficients(SavGolSpec{5, 0});
    REQUIRE(w.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(w(i) == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("savgol weights: window 5, order 2") {
    const auto w = savgol_coefficients(SavGolSpec{5, 2});
    const auto oracle_w = oracle::savgol_weights(5, 2);
    const double expected[] = {-3.0 / 35, 12.0 / 35, 17.0 / 35, 12.0 / 35, -3.0 / 35};
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(oracle_w[static_cast<std::size_t>(i)] - expected[i]) < 1e-15);
        CHECK(std::abs(w(i) - expected[i]) < 1e-12);
    }
}

TEST_CASE("property: savgol weights match the normal equations, sum to 1 and are symmetric") {
    for (int window = 3; window <= 21; window += 2) {
        for (int order = 0; order < std::min(window, 7); ++order) {
            const auto w = savgol_coefficients(SavGolSpec{window, order});
            const auto o = oracle::savgol_weights(window, order);
            CHECK(w.sum() == doctest::Approx(1.0).epsilon(1e-12));
            for (int i = 0; i < window; ++i) {
                CHECK(std::abs(w(i) - o[static_cast<std::size_t>(i)]) < 1e-10);
                CHECK(std::abs(w(i) - w(window - 1 - i)) < 1e-12);
            }
        }
    }
}

TEST_CASE("savgol argument errors") {
    CHECK_THROWS_AS(savgol_coefficients(SavGolSpec{4, 1}), ArgumentError);
    CHECK_THROWS_AS(savgol_coefficients(SavGolSpec{1, 0}), ArgumentError);
    CHECK_THROWS_AS(savgol_coefficients(SavGolSpec{5, 5}), ArgumentError);
    CHECK_THROWS_AS(savgol(Eigen::VectorXd::Zero(4), SavGolSpec{5, 2}), ArgumentError);
}

TEST_CASE("savgol leaves constants and a ramp unchanged") {
    const Eigen::VectorXd c = Eigen::VectorXd::Constant(30, 4.25);
    CHECK((savgol(c, SavGolSpec{}) - c).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(10, 0.0, 9.0);
    const Eigen::VectorXd out = savgol(ramp, SavGolSpec{5, 1});
    CHECK((out - ramp).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("savgol boundary points evaluate the edge-window fit") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    Eigen::VectorXd x(25);
    for (int i = 0; i < 25; ++i) x(i) = g(rng);
    const SavGolSpec spec{7, 2};
    const Eigen::VectorXd y = savgol(x, spec);
    for (int pos = 0; pos < 3; ++pos) {
        const auto head = oracle::savgol_weights(7, 2, pos - 3);
        const auto tail = oracle::savgol_weights(7, 2, 3 - pos);
        double h = 0.0, t = 0.0;
        for (int j = 0; j < 7; ++j) {
            h += head[static_cast<std::size_t>(j)] * x(j);
            t += tail[static_cast<std::size_t>(j)] * x(25 - 7 + j);
        }
        CHECK(y(pos) == doctest::Approx(h).epsilon(1e-10));
        CHECK(y(24 - pos) == doctest::Approx(t).epsilon(1e-10));
    }
}

TEST_CASE("property: savgol reproduces polynomials of degree <= order") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto spec : {SavGolSpec{5, 2}, SavGolSpec{7, 3}, SavGolSpec{11, 3}, SavGolSpec{9, 4}, SavGolSpec{3, 1}}) {
        for (int degree = 0; degree <= spec.order; ++degree) {
            for (int trial = 0; trial < 5; ++trial) {
                std::vector<double> coef(static_cast<std::size_t>(degree + 1));
                for (auto& c : coef) c = u(rng);
                const int n = spec.window + 20;
                Eigen::VectorXd x(n);
                for (int i = 0; i < n; ++i) {
                    const double s = 0.1 * i;  // keep values O(1)
                    double v = 0.0;
                    for (int k = degree; k >= 0; --k) v = v * s + coef[static_cast<std::size_t>(k)];
                    x(i) = v;
                }
                CHECK((savgol(x, spec) - x).cwiseAbs().maxCoeff() < 1e-9);
            }
        }
    }
}

TEST_CASE("smooth filters runs separately and skips short ones") {
    auto d = simulate(PlantConfig{}, 60);
    d.frames.erase(d.frames.begin() + 30, d.frames.begin() + 32);  // gap at t = 30, 31
    d.frames.erase(d.frames.begin() + 50, d.frames.end());         // tail run t = 32..51 length 20
    d.frames.push_back(d.frames.back());
    d.frames.back().t = 100;  // isolated frame
    const SavGolSpec spec{11, 3};
    const auto s = smooth(d, spec);
    REQUIRE(s.size() == d.size());
    Eigen::VectorXd head(30);
    for (int i = 0; i < 30; ++i) head(i) = d.frames[static_cast<std::size_t>(i)][Channel::QE270_5_1];
    const Eigen::VectorXd expected = savgol(head, spec);
    for (int i = 0; i < 30; ++i) CHECK(s.frames[static_cast<std::size_t>(i)][Channel::QE270_5_1] == expected(i));
    CHECK(s.frames.back().values == d.frames.back().values);
    CHECK(s.provenance.smoothed);
}
