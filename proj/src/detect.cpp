#include "osmoguard/detect.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace osmoguard {

std::string_view monitor_mode_name(MonitorMode m) { return m == MonitorMode::Fixed ? "fixed" : "adaptive"; }

std::optional<MonitorMode> parse_monitor_mode(std::string_view name) {
    if (name == "fixed") return MonitorMode::Fixed;
    if (name == "adaptive") return MonitorMode::Adaptive;
    return std::nullopt;
}

Monitor::Monitor(std::string component, MonitorConfig config, std::optional<ThresholdBand> calibration)
    : component_(std::move(component)), config_(config), fixed_band_(calibration) {
    config_.validate();
    ring_ = Eigen::VectorXd::Zero(config_.window);
}

bool Monitor::warming_up() const {
    return config_.mode == MonitorMode::Adaptive && count_ < static_cast<std::size_t>(config_.window);
}

std::optional<ThresholdBand> Monitor::current_band() const {
    if (config_.mode == MonitorMode::Fixed) return fixed_band_;
    if (warming_up()) return std::nullopt;
    return adaptive_band(ring_, config_.zeta);
}

std::optional<AlarmEvent> Monitor::step(std::int64_t t, double r) {
    if (!std::isfinite(r)) throw ArgumentError("monitor: non-finite residual");
    if (config_.mode == MonitorMode::Fixed && !fixed_band_) {
        throw StateError("monitor '" + component_ + "': fixed mode requires a calibration band");
    }

    const auto band = current_band();
    const bool out = band && !band->contains(r);

    if (config_.mode == MonitorMode::Adaptive) {
        ring_(static_cast<Eigen::Index>(head_)) = r;
        head_ = (head_ + 1) % static_cast<std::size_t>(config_.window);
        if (count_ < static_cast<std::size_t>(config_.window)) ++count_;
    }

    if (out) {
        consecutive_out_ = std::min(consecutive_out_ + 1, config_.debounce);
    } else {
        consecutive_out_ = 0;
        if (!config_.latch) alarmed_ = false;
    }

    std::optional<AlarmEvent> event;
    if (out && consecutive_out_ == config_.debounce && !alarmed_) {
        alarmed_ = true;
        if (!latched_at_) latched_at_ = t;
        event = AlarmEvent{component_, t, r, *band, config_.mode};
    }
    last_ = StepRecord{t, r, band, out, alarmed_};
    return event;
}

void Monitor::reset() {
    alarmed_ = false;
    consecutive_out_ = 0;
    latched_at_.reset();
}

bool cumulative_alarm(std::span<const Monitor> monitors) {
    if (monitors.empty()) throw ArgumentError("cumulative_alarm: no monitors");
    for (const auto& m : monitors) {
        if (m.alarmed()) return true;
    }
    return false;
}

bool cumulative_alarm(std::span<const Monitor* const> monitors) {
    if (monitors.empty()) throw ArgumentError("cumulative_alarm: no monitors");
    for (const auto* m : monitors) {
        if (m->alarmed()) return true;
    }
    return false;
}

DetectionMetrics evaluate(std::span<const AlarmEvent> alarms, const TimeSeriesDataset& ground_truth,
                          std::int64_t onset) {
    if (ground_truth.empty()) throw ArgumentError("evaluate: empty ground truth");
    const std::int64_t first = ground_truth.frames.front().t;
    const std::int64_t last = ground_truth.frames.back().t;
    if (onset < first || onset > last) {
        throw ArgumentError("evaluate: onset " + std::to_string(onset) + " outside stream [" + std::to_string(first) +
                            ", " + std::to_string(last) + "]");
    }
    DetectionMetrics m;
    for (const auto& a : alarms) {
        if (a.t < onset) {
            ++m.false_alarms;
        } else if (!m.detection_delay || a.t - onset < *m.detection_delay) {
            m.detection_delay = a.t - onset;
        }
    }
    m.detected = m.detection_delay.has_value();
    const std::int64_t pre = onset - first;
    m.false_alarm_rate = pre > 0 ? static_cast<double>(m.false_alarms) / static_cast<double>(pre) : 0.0;
    return m;
}

void write_alarms(std::ostream& out, std::span<const AlarmEvent> alarms) {
    out << "component,t,residual,lower,upper,mode\n";
    for (const auto& a : alarms) {
        out << a.component << ',' << a.t << ',' << format_double(a.residual) << ',' << format_double(a.band.lower())
            << ',' << format_double(a.band.upper()) << ',' << monitor_mode_name(a.mode) << '\n';
    }
}

void write_alarms(const std::string& path, std::span<const AlarmEvent> alarms) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_alarms(out, alarms);
    if (!out) throw IoError("write failed: " + path);
}

std::vector<AlarmEvent> read_alarms(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("alarm log: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "component,t,residual,lower,upper,mode") throw IoError("alarm log: unexpected header");
    std::vector<AlarmEvent> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() != 6) throw IoError("alarm log line " + std::to_string(lineno) + ": expected 6 fields");
        try {
            AlarmEvent a;
            a.component = fields[0];
            a.t = std::stoll(fields[1]);
            a.residual = parse_double(fields[2]);
            a.band = ThresholdBand::between(parse_double(fields[3]), parse_double(fields[4]));
            const auto mode = parse_monitor_mode(fields[5]);
            if (!mode) throw ArgumentError("unknown mode '" + fields[5] + "'");
            a.mode = *mode;
            out.push_back(std::move(a));
        } catch (const std::exception& e) {
            throw IoError("alarm log line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::vector<AlarmEvent> read_alarms(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return read_alarms(in);
}

}  // namespace osmoguard
