#pragma once

#include "osmoguard/dataset.hpp"
#include "osmoguard/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace osmoguard {

inline double residual(double y_out, double y_nn) { return y_out - y_nn; }

// center +- spread. lower/upper are stored so that a band read back from an
// alarm log reproduces its edges exactly.
class ThresholdBand {
public:
    ThresholdBand() = default;

    static ThresholdBand around(double center, double spread) {
        if (!(spread >= 0.0)) throw ArgumentError("threshold band spread must be >= 0");
        ThresholdBand b;
        b.center_ = center;
        b.spread_ = spread;
        b.lower_ = center - spread;
        b.upper_ = center + spread;
        return b;
    }

    static ThresholdBand between(double lower, double upper) {
        if (!(lower <= upper)) throw ArgumentError("threshold band needs lower <= upper");
        ThresholdBand b;
        b.center_ = 0.5 * (lower + upper);
        b.spread_ = 0.5 * (upper - lower);
        b.lower_ = lower;
        b.upper_ = upper;
        return b;
    }

    double center() const { return center_; }
    double spread() const { return spread_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }
    bool contains(double r) const { return r >= lower_ && r <= upper_; }

private:
    double center_ = 0.0;
    double spread_ = 0.0;
    double lower_ = 0.0;
    double upper_ = 0.0;
};

// Sample mean and unbiased standard deviation (divisor n - 1).
template <typename Derived>
std::pair<double, double> mean_and_std(const Eigen::MatrixBase<Derived>& r) {
    const auto n = r.size();
    if (n < 2) throw ArgumentError("need at least 2 residuals, got " + std::to_string(n));
    const double m = r.template cast<double>().mean();
    const double ss = (r.template cast<double>().array() - m).square().sum();
    return {m, std::sqrt(ss / static_cast<double>(n - 1))};
}

// Calibration band m +- zeta * std over normal-operation residuals.
template <typename Derived>
ThresholdBand fixed_band(const Eigen::MatrixBase<Derived>& training_residuals, double zeta) {
    if (!(zeta > 0.0)) throw ArgumentError("zeta must be positive");
    const auto [m, s] = mean_and_std(training_residuals);
    return ThresholdBand::around(m, zeta * s);
}

// Band over the last n residuals ending at step k: m(k) +- zeta * v(k), with
// v(k) the square root of the unbiased windowed variance.
template <typename Derived>
ThresholdBand adaptive_band(const Eigen::MatrixBase<Derived>& window, double zeta) {
    return fixed_band(window, zeta);
}

// Symmetric band at the largest absolute normal residual.
template <typename Derived>
ThresholdBand empirical_max_band(const Eigen::MatrixBase<Derived>& training_residuals) {
    if (training_residuals.size() < 1) throw ArgumentError("empirical_max_band: no residuals");
    return ThresholdBand::around(0.0, training_residuals.template cast<double>().cwiseAbs().maxCoeff());
}

enum class MonitorMode { Fixed, Adaptive };

std::string_view monitor_mode_name(MonitorMode m);
std::optional<MonitorMode> parse_monitor_mode(std::string_view name);

struct MonitorConfig {
    double zeta = 3.0;
    int window = 60;
    MonitorMode mode = MonitorMode::Fixed;
    int debounce = 5;
    // When false the alarm clears as soon as a residual returns to the band.
    bool latch = true;

    void validate() const {
        if (!(zeta > 0.0) || !std::isfinite(zeta)) throw ConfigError("zeta", "must be positive");
        if (window < 2) throw ConfigError("window", "must be >= 2");
        if (debounce < 1) throw ConfigError("debounce", "must be >= 1");
    }
};

struct AlarmEvent {
    std::string component;
    std::int64_t t = 0;
    double residual = 0.0;
    ThresholdBand band;
    MonitorMode mode = MonitorMode::Fixed;
};

// What the monitor saw at its most recent step.
struct StepRecord {
    std::int64_t t = 0;
    double residual = 0.0;
    std::optional<ThresholdBand> band;  // empty while an adaptive window warms up
    bool out_of_band = false;
    bool alarmed = false;
};

// Streaming residual monitor for one component.
class Monitor {
public:
    explicit Monitor(std::string component, MonitorConfig config = {},
                     std::optional<ThresholdBand> calibration = std::nullopt);

    void calibrate(const ThresholdBand& band) { fixed_band_ = band; }

    // Judges r against the current band, then (adaptive mode) pushes r into
    // the window. Emits an event when the debounce count is first reached.
    std::optional<AlarmEvent> step(std::int64_t t, double r);

    // Clears the alarm and the debounce counter; the residual window is kept.
    void reset();

    const std::string& component() const { return component_; }
    const MonitorConfig& config() const { return config_; }
    const std::optional<ThresholdBand>& calibration() const { return fixed_band_; }
    bool alarmed() const { return alarmed_; }
    int consecutive_out() const { return consecutive_out_; }
    std::optional<std::int64_t> latched_at() const { return latched_at_; }
    bool warming_up() const;
    std::size_t buffered() const { return count_; }
    const std::optional<StepRecord>& last_step() const { return last_; }

    // Band the next residual will be judged against, if any.
    std::optional<ThresholdBand> current_band() const;

private:
    std::string component_;
    MonitorConfig config_;
    std::optional<ThresholdBand> fixed_band_;
    Eigen::VectorXd ring_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    int consecutive_out_ = 0;
    bool alarmed_ = false;
    std::optional<std::int64_t> latched_at_;
    std::optional<StepRecord> last_;
};

// OR of the alarm flags. Throws ArgumentError for an empty list.
bool cumulative_alarm(std::span<const Monitor> monitors);
bool cumulative_alarm(std::span<const Monitor* const> monitors);

struct DetectionMetrics {
    bool detected = false;
    std::optional<std::int64_t> detection_delay;  // minutes from onset to first alarm at/after onset
    std::size_t false_alarms = 0;                 // alarms strictly before onset
    double false_alarm_rate = 0.0;                // per pre-onset minute
};

DetectionMetrics evaluate(std::span<const AlarmEvent> alarms, const TimeSeriesDataset& ground_truth,
                          std::int64_t onset);

// Alarm log CSV: component,t,residual,lower,upper,mode
void write_alarms(std::ostream& out, std::span<const AlarmEvent> alarms);
void write_alarms(const std::string& path, std::span<const AlarmEvent> alarms);
std::vector<AlarmEvent> read_alarms(std::istream& in);
std::vector<AlarmEvent> read_alarms(const std::string& path);

}  // namespace osmoguard
