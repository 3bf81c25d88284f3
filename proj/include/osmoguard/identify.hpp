#pragma once

#include "osmoguard/dataset.hpp"
#include "osmoguard/mlp.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace osmoguard {

// NARX regressor layout: x(k) = [u(k-l) for l in input_lags] ++ [y(k-l) for l in output_lags],
// target y(k).
struct RegressorSpec {
    Channel input_channel = Channel::PT270_5_1;
    Channel output_channel = Channel::PT270_5_4;
    std::vector<int> input_lags = {0, 1, 2};
    std::vector<int> output_lags = {1, 2};

    int width() const { return static_cast<int>(input_lags.size() + output_lags.size()); }
    int max_lag() const;
    void validate() const;
};

// Monitored plant components, one identifier each.
enum class Component { Pump, ReverseOsmosis, Edi };

inline constexpr std::array<Component, 3> kAllComponents = {Component::Pump, Component::ReverseOsmosis,
                                                            Component::Edi};

std::string_view component_name(Component c);  // "pump", "ro", "edi"
std::optional<Component> parse_component(std::string_view name);

// pump: PT270_5_1 -> PT270_5_4; ro: QE270_6_2 -> QE270_5_1; edi: QE270_5_1 -> QE270_6_1.
RegressorSpec default_regressor(Component c);

// Identifier topology used for the pump: 5 inputs, hidden 22 and 20, 1 output.
inline std::vector<int> identifier_layers(const RegressorSpec& spec) { return {spec.width(), 22, 20, 1}; }

struct Regressors {
    Samples samples;                    // inputs (width x N), targets (1 x N)
    std::vector<std::int64_t> targets_t;  // timestamp of each target
};

// One pair per frame k >= max_lag whose lag window is made of consecutive,
// valid frames. Throws ArgumentError when data.size() <= max_lag.
Regressors build_regressors(const TimeSeriesDataset& data, const RegressorSpec& spec);

struct SeriesPrediction {
    std::vector<std::int64_t> t;
    Eigen::VectorXd y_nn;
    Eigen::VectorXd y_out;

    Eigen::VectorXd residuals() const { return y_out - y_nn; }
};

// One-step-ahead prediction from measured lags, aligned with the measured output.
SeriesPrediction predict_series(const MlpModel& model, const TimeSeriesDataset& data, const RegressorSpec& spec);

// Text model file:
//   OSMOGUARD-MLP v1
//   <layer sizes, space separated>
//   <hidden activation> <output activation>
// then for every layer a blank line, `rows` lines of the weight matrix
// (row-major, space separated) and one line of biases.
void save_model(std::ostream& out, const MlpModel& model);
void save_model(const std::string& path, const MlpModel& model);
MlpModel load_model(std::istream& in);
MlpModel load_model(const std::string& path);

}  // namespace osmoguard
