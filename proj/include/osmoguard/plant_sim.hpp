#pragma once

#include "osmoguard/dataset.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace osmoguard {

// Parameters of the synthetic purification unit. Every channel carries
// additive AR(1) noise whose marginal standard deviation is noise_std and
// whose lag-one correlation is ar_coefficient.
//
//   inlet   = pump_inlet_mean + n_inlet
//   pump    = pump_setpoint + pump_gain * (inlet - pump_inlet_mean) + n_pump
//   ro      = feed * (1 - ro_rejection) + n_ro
//   conc    = feed * (1 + concentrate_gain * ro_rejection) + n_conc
//   edi_p   = edi_pressure_ratio * pump + n_edi_p
//   edi_q   = ro * (1 - edi_rejection) + n_edi_q
//
// The feed conductivity itself is not measured; it wanders around
// feed_conductivity_mean as an AR(1) process (feed_std, feed_ar).
struct PlantConfig {
    double feed_conductivity_mean = 700.0;  // uS/cm
    double feed_std = 20.0;
    double feed_ar = 0.98;
    double pump_setpoint = 15.0;   // bar
    double pump_inlet_mean = 3.0;  // bar
    double pump_gain = 0.2;
    double ro_rejection = 0.98;
    double edi_rejection = 0.96;
    double concentrate_gain = 1.0;
    double edi_pressure_ratio = 0.25;
    ChannelVector noise_std = (ChannelVector() << 0.3, 0.03, 0.1, 3.0, 0.01, 0.01).finished();
    ChannelVector ar_coefficient = (ChannelVector() << 0.95, 0.8, 0.7, 0.7, 0.7, 0.7).finished();
    std::uint64_t seed = 1;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

enum class FaultKind { SensorBias, LinearDrift, MembraneFouling, PumpDegradation, Outage };

std::string_view fault_kind_name(FaultKind k);
std::optional<FaultKind> parse_fault_kind(std::string_view name);

// A single injected fault. `channel` is required for SensorBias and
// LinearDrift; the other kinds act on a fixed component (RO membrane, pump)
// or on whole frames (Outage).
//
// magnitude is in channel units for SensorBias/LinearDrift. For
// MembraneFouling it is the fraction f in [0,1) by which salt passage grows
// to (1 - ro_rejection) / (1 - f); for PumpDegradation the fraction in [0,1]
// by which pump output falls toward the inlet pressure. Ramped kinds reach
// full magnitude ramp_minutes after onset; Outage invalidates
// max(ramp_minutes, 1) frames.
struct FaultSpec {
    FaultKind kind = FaultKind::SensorBias;
    std::optional<Channel> channel;
    std::int64_t onset = 0;  // frame index
    double magnitude = 0.0;
    std::int64_t ramp_minutes = 0;
};

// Normal-operation stream of `minutes` frames, t = 0..minutes-1.
TimeSeriesDataset simulate(const PlantConfig& config, std::int64_t minutes);

// Copy of `data` with the fault applied from frame index `fault.onset` on.
// `plant` supplies the component parameters used to propagate fouling and
// pump faults to downstream channels.
TimeSeriesDataset inject_fault(const TimeSeriesDataset& data, const FaultSpec& fault,
                               const PlantConfig& plant = {});

}  // namespace osmoguard
