#include "osmoguard/identify.hpp"

#include "osmoguard/error.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace osmoguard {

std::string_view activation_name(Activation a) {
    switch (a) {
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
        case Activation::Logistic: return "logistic";
    }
    return "unknown";
}

Activation parse_activation(std::string_view name) {
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    if (name == "logistic") return Activation::Logistic;
    throw ArgumentError("unknown activation '" + std::string(name) + "'");
}

int RegressorSpec::max_lag() const {
    int m = 0;
    for (int l : input_lags) m = std::max(m, l);
    for (int l : output_lags) m = std::max(m, l);
    return m;
}

void RegressorSpec::validate() const {
    if (width() == 0) throw ArgumentError("regressor: no lags");
    for (int l : input_lags) {
        if (l < 0) throw ArgumentError("regressor: negative input lag");
    }
    for (int l : output_lags) {
        if (l < 1) throw ArgumentError("regressor: output lags must be >= 1");
    }
}

std::string_view component_name(Component c) {
    switch (c) {
        case Component::Pump: return "pump";
        case Component::ReverseOsmosis: return "ro";
        case Component::Edi: return "edi";
    }
    return "unknown";
}

std::optional<Component> parse_component(std::string_view name) {
    for (Component c : kAllComponents) {
        if (component_name(c) == name) return c;
    }
    return std::nullopt;
}

RegressorSpec default_regressor(Component c) {
    RegressorSpec spec;
    switch (c) {
        case Component::Pump:
            spec.input_channel = Channel::PT270_5_1;
            spec.output_channel = Channel::PT270_5_4;
            break;
        case Component::ReverseOsmosis:
            spec.input_channel = Channel::QE270_6_2;
            spec.output_channel = Channel::QE270_5_1;
            break;
        case Component::Edi:
            spec.input_channel = Channel::QE270_5_1;
            spec.output_channel = Channel::QE270_6_1;
            break;
    }
    return spec;
}

Regressors build_regressors(const TimeSeriesDataset& data, const RegressorSpec& spec) {
    spec.validate();
    const int lag = spec.max_lag();
    if (data.size() <= static_cast<std::size_t>(lag)) {
        throw ArgumentError("build_regressors: dataset of length " + std::to_string(data.size()) +
                            " is too short for max lag " + std::to_string(lag));
    }

    std::vector<std::size_t> usable;
    // Index of the most recent frame that breaks the stream (invalid or a gap).
    std::ptrdiff_t last_break = -1;
    for (std::size_t k = 0; k < data.size(); ++k) {
        const auto& f = data.frames[k];
        if (!f.valid || (k > 0 && f.t != data.frames[k - 1].t + 1)) {
            last_break = f.valid ? static_cast<std::ptrdiff_t>(k) - 1 : static_cast<std::ptrdiff_t>(k);
        }
        if (f.valid && static_cast<std::ptrdiff_t>(k) - lag > last_break) usable.push_back(k);
    }

    Regressors out;
    out.samples.inputs.resize(spec.width(), static_cast<Eigen::Index>(usable.size()));
    out.samples.targets.resize(1, static_cast<Eigen::Index>(usable.size()));
    out.targets_t.reserve(usable.size());
    for (std::size_t j = 0; j < usable.size(); ++j) {
        const std::size_t k = usable[j];
        const auto col = static_cast<Eigen::Index>(j);
        Eigen::Index row = 0;
        for (int l : spec.input_lags) out.samples.inputs(row++, col) = data.frames[k - static_cast<std::size_t>(l)][spec.input_channel];
        for (int l : spec.output_lags) out.samples.inputs(row++, col) = data.frames[k - static_cast<std::size_t>(l)][spec.output_channel];
        out.samples.targets(0, col) = data.frames[k][spec.output_channel];
        out.targets_t.push_back(data.frames[k].t);
    }
    return out;
}

SeriesPrediction predict_series(const MlpModel& model, const TimeSeriesDataset& data, const RegressorSpec& spec) {
    if (model.input_size() != spec.width() || model.output_size() != 1) {
        throw ArgumentError("predict_series: model shape does not match the regressor");
    }
    auto reg = build_regressors(data, spec);
    SeriesPrediction out;
    out.t = std::move(reg.targets_t);
    out.y_out = reg.samples.targets.row(0).transpose();
    if (reg.samples.size() > 0) {
        out.y_nn = forward(model, reg.samples.inputs).row(0).transpose();
    } else {
        out.y_nn.resize(0);
    }
    return out;
}

void save_model(std::ostream& out, const MlpModel& model) {
    model.validate();
    out << "OSMOGUARD-MLP v1\n";
    for (std::size_t i = 0; i < model.layer_sizes.size(); ++i) out << (i ? " " : "") << model.layer_sizes[i];
    out << '\n' << activation_name(model.hidden) << ' ' << activation_name(model.output) << '\n';
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
        out << '\n';
        const auto& w = model.weights[l];
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            for (Eigen::Index j = 0; j < w.cols(); ++j) out << (j ? " " : "") << format_double(w(i, j));
            out << '\n';
        }
        const auto& b = model.biases[l];
        for (Eigen::Index i = 0; i < b.size(); ++i) out << (i ? " " : "") << format_double(b(i));
        out << '\n';
    }
}

void save_model(const std::string& path, const MlpModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    save_model(out, model);
    if (!out) throw IoError("write failed: " + path);
}

namespace {

std::vector<double> parse_row(const std::string& line) {
    std::vector<double> values;
    std::istringstream in(line);
    std::string token;
    while (in >> token) values.push_back(parse_double(token));
    return values;
}

bool next_nonblank(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") != std::string::npos) return true;
    }
    return false;
}

}  // namespace

MlpModel load_model(std::istream& in) {
    std::string line;
    if (!next_nonblank(in, line) || line != "OSMOGUARD-MLP v1") throw IoError("model: missing 'OSMOGUARD-MLP v1' header");
    try {
        if (!next_nonblank(in, line)) throw IoError("model: missing layer sizes");
        std::vector<int> sizes;
        for (double v : parse_row(line)) sizes.push_back(static_cast<int>(v));
        if (!next_nonblank(in, line)) throw IoError("model: missing activations");
        std::istringstream acts(line);
        std::string hidden, output;
        acts >> hidden >> output;
        MlpModel model = MlpModel::zeros(sizes, parse_activation(output));
        model.hidden = parse_activation(hidden);
        for (std::size_t l = 0; l < model.layer_count(); ++l) {
            auto& w = model.weights[l];
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                if (!next_nonblank(in, line)) throw IoError("model: truncated weights");
                const auto row = parse_row(line);
                if (static_cast<Eigen::Index>(row.size()) != w.cols()) throw IoError("model: weight row has wrong width");
                for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = row[static_cast<std::size_t>(j)];
            }
            if (!next_nonblank(in, line)) throw IoError("model: truncated biases");
            const auto row = parse_row(line);
            if (static_cast<Eigen::Index>(row.size()) != model.biases[l].size()) throw IoError("model: bias row has wrong width");
            for (Eigen::Index i = 0; i < model.biases[l].size(); ++i) model.biases[l](i) = row[static_cast<std::size_t>(i)];
        }
        model.validate();
        return model;
    } catch (const ArgumentError& e) {
        throw IoError(std::string("model: ") + e.what());
    }
}

MlpModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return load_model(in);
}

}  // namespace osmoguard
