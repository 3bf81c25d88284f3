#include "osmoguard/plant_sim.hpp"

#include "osmoguard/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

namespace osmoguard {

namespace {

void require_finite(double v, const char* key) {
    if (!std::isfinite(v)) throw ConfigError(key, "must be finite");
}

void require_open_unit(double v, const char* key) {
    require_finite(v, key);
    if (!(v > 0.0 && v < 1.0)) throw ConfigError(key, "must lie in (0,1), got " + format_double(v));
}

void require_ar(double v, const std::string& key) {
    if (!std::isfinite(v) || v < 0.0 || v >= 1.0) {
        throw ConfigError(key, "must lie in [0,1), got " + format_double(v));
    }
}

// AR(1) process with a given marginal standard deviation.
class Ar1 {
public:
    Ar1(double marginal_std, double phi)
        : phi_(phi), innovation_std_(marginal_std * std::sqrt(1.0 - phi * phi)), marginal_std_(marginal_std) {}

    void start(std::mt19937_64& rng, std::normal_distribution<double>& gauss) {
        state_ = marginal_std_ * gauss(rng);
    }

    double next(std::mt19937_64& rng, std::normal_distribution<double>& gauss) {
        state_ = phi_ * state_ + innovation_std_ * gauss(rng);
        return state_;
    }

    double value() const { return state_; }

private:
    double phi_;
    double innovation_std_;
    double marginal_std_;
    double state_ = 0.0;
};

constexpr std::array<std::string_view, 5> kFaultNames = {
    "sensor_bias", "linear_drift", "membrane_fouling", "pump_degradation", "outage"};

}  // namespace

void PlantConfig::validate() const {
    require_finite(feed_conductivity_mean, "feed_conductivity_mean");
    if (feed_conductivity_mean <= 0.0) throw ConfigError("feed_conductivity_mean", "must be positive");
    require_finite(feed_std, "feed_std");
    if (feed_std < 0.0) throw ConfigError("feed_std", "must be non-negative");
    require_ar(feed_ar, "feed_ar");
    require_finite(pump_setpoint, "pump_setpoint");
    require_finite(pump_inlet_mean, "pump_inlet_mean");
    require_finite(pump_gain, "pump_gain");
    require_open_unit(ro_rejection, "ro_rejection");
    require_open_unit(edi_rejection, "edi_rejection");
    require_finite(concentrate_gain, "concentrate_gain");
    require_finite(edi_pressure_ratio, "edi_pressure_ratio");
    for (Channel c : kAllChannels) {
        const std::string name(channel_name(c));
        double s = noise_std(index(c));
        if (!std::isfinite(s) || s < 0.0) throw ConfigError("noise_std." + name, "must be finite and non-negative");
        require_ar(ar_coefficient(index(c)), "ar_coefficient." + name);
    }
}

std::string_view fault_kind_name(FaultKind k) { return kFaultNames[static_cast<std::size_t>(k)]; }

std::optional<FaultKind> parse_fault_kind(std::string_view name) {
    for (std::size_t i = 0; i < kFaultNames.size(); ++i) {
        if (kFaultNames[i] == name) return static_cast<FaultKind>(i);
    }
    return std::nullopt;
}

TimeSeriesDataset simulate(const PlantConfig& config, std::int64_t minutes) {
    if (minutes < 1) throw ArgumentError("minutes must be >= 1");
    config.validate();

    std::mt19937_64 rng(config.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    Ar1 feed(config.feed_std, config.feed_ar);
    std::array<Ar1, kChannelCount> noise = {
        Ar1(config.noise_std(0), config.ar_coefficient(0)), Ar1(config.noise_std(1), config.ar_coefficient(1)),
        Ar1(config.noise_std(2), config.ar_coefficient(2)), Ar1(config.noise_std(3), config.ar_coefficient(3)),
        Ar1(config.noise_std(4), config.ar_coefficient(4)), Ar1(config.noise_std(5), config.ar_coefficient(5))};

    // Initial states are drawn from the stationary law so the stream has no
    // start-up transient.
    feed.start(rng, gauss);
    for (auto& n : noise) n.start(rng, gauss);

    TimeSeriesDataset data;
    data.provenance.simulated = true;
    data.frames.reserve(static_cast<std::size_t>(minutes));

    for (std::int64_t t = 0; t < minutes; ++t) {
        if (t > 0) {
            feed.next(rng, gauss);
            for (auto& n : noise) n.next(rng, gauss);
        }
        const double feed_q = config.feed_conductivity_mean + feed.value();
        const double inlet = config.pump_inlet_mean + noise[0].value();
        const double pump = config.pump_setpoint + config.pump_gain * (inlet - config.pump_inlet_mean) + noise[1].value();
        const double ro = feed_q * (1.0 - config.ro_rejection) + noise[2].value();
        const double conc = feed_q * (1.0 + config.concentrate_gain * config.ro_rejection) + noise[3].value();
        const double edi_p = config.edi_pressure_ratio * pump + noise[4].value();
        const double edi_q = ro * (1.0 - config.edi_rejection) + noise[5].value();

        SensorFrame f;
        f.t = t;
        f.values << inlet, pump, ro, conc, edi_p, edi_q;
        data.frames.push_back(f);
    }
    return data;
}

TimeSeriesDataset inject_fault(const TimeSeriesDataset& data, const FaultSpec& fault, const PlantConfig& plant) {
    const auto n = static_cast<std::int64_t>(data.size());
    if (fault.onset < 0 || fault.onset >= n) {
        throw ArgumentError("fault onset " + std::to_string(fault.onset) + " outside stream of length " +
                            std::to_string(n));
    }
    if (!std::isfinite(fault.magnitude)) throw ArgumentError("fault magnitude must be finite");
    if (fault.ramp_minutes < 0) throw ArgumentError("ramp_minutes must be >= 0");
    if ((fault.kind == FaultKind::SensorBias || fault.kind == FaultKind::LinearDrift) && !fault.channel) {
        throw ArgumentError(std::string(fault_kind_name(fault.kind)) + " requires a target channel");
    }
    if (fault.kind == FaultKind::MembraneFouling && (fault.magnitude < 0.0 || fault.magnitude >= 1.0)) {
        throw ArgumentError("membrane_fouling magnitude must lie in [0,1)");
    }
    if (fault.kind == FaultKind::PumpDegradation && (fault.magnitude < 0.0 || fault.magnitude > 1.0)) {
        throw ArgumentError("pump_degradation magnitude must lie in [0,1]");
    }

    TimeSeriesDataset out = data;
    out.provenance.fault_injected = true;

    auto ramp = [&](std::int64_t i) {
        if (fault.ramp_minutes == 0) return 1.0;
        return std::min(1.0, static_cast<double>(i - fault.onset) / static_cast<double>(fault.ramp_minutes));
    };

    if (fault.kind == FaultKind::Outage) {
        const std::int64_t end = std::min(n, fault.onset + std::max<std::int64_t>(fault.ramp_minutes, 1));
        for (std::int64_t i = fault.onset; i < end; ++i) {
            auto& f = out.frames[static_cast<std::size_t>(i)];
            f.valid = false;
            f.values.setZero();
        }
        return out;
    }

    for (std::int64_t i = fault.onset; i < n; ++i) {
        auto& f = out.frames[static_cast<std::size_t>(i)];
        switch (fault.kind) {
            case FaultKind::SensorBias:
                f[*fault.channel] += fault.magnitude;
                break;
            case FaultKind::LinearDrift:
                f[*fault.channel] += fault.magnitude * ramp(i);
                break;
            case FaultKind::MembraneFouling: {
                // Salt passage (1 - rejection) grows by 1/(1 - f); the EDI stage
                // sees the larger load and fewer ions reach the concentrate.
                const double growth = 1.0 / (1.0 - fault.magnitude * ramp(i));
                const double ro = f[Channel::QE270_5_1];
                f[Channel::QE270_5_1] = ro * growth;
                f[Channel::QE270_6_1] *= growth;
                f[Channel::QE270_6_2] -= plant.concentrate_gain * ro * (growth - 1.0);
                break;
            }
            case FaultKind::PumpDegradation: {
                const double pump = f[Channel::PT270_5_4];
                const double degraded = pump - fault.magnitude * ramp(i) * (pump - f[Channel::PT270_5_1]);
                f[Channel::PT270_5_4] = degraded;
                f[Channel::PT270_6_3] += plant.edi_pressure_ratio * (degraded - pump);
                break;
            }
            case FaultKind::Outage:
                break;
        }
        if (f.valid) f.label = Label::Faulty;
    }
    return out;
}

}  // namespace osmoguard
