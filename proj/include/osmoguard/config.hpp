#pragma once

#include "osmoguard/classify.hpp"
#include "osmoguard/detect.hpp"
#include "osmoguard/identify.hpp"
#include "osmoguard/plant_sim.hpp"
#include "osmoguard/preprocess.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace osmoguard {

// Flat `key = value` settings with dotted sections, e.g. `monitor.zeta = 3.0`.
// Lines starting with '#' are comments. Later assignments win.
class Settings {
public:
    static Settings parse(std::istream& in);
    static Settings load(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    // Applies a `key=value` override.
    void set_assignment(const std::string& assignment);
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::optional<std::string> get(const std::string& key) const;

    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

// Everything a pipeline run needs, assembled from Settings.
struct RunConfig {
    PlantConfig plant;
    std::vector<FaultSpec> faults;
    MonitorConfig monitor;
    std::map<Component, MonitorConfig> monitor_overrides;
    TrainConfig train;
    SavGolSpec savgol;
    PhysicalRanges ranges = default_physical_ranges();
    SvmConfig svm;

    MonitorConfig monitor_for(Component c) const;
};

// Keys:
//   plant.{feed_conductivity_mean,feed_std,feed_ar,pump_setpoint,pump_inlet_mean,
//          pump_gain,ro_rejection,edi_rejection,concentrate_gain,edi_pressure_ratio,seed}
//   plant.noise_std.<channel>, plant.ar_coefficient.<channel>
//   fault.<i>.{kind,target,onset,magnitude,ramp_minutes}   (i = 1, 2, ...)
//   monitor.{zeta,window,mode,debounce,latch}, monitor.<component>.<key>
//   train.{learning_rate,epochs,batch_size,momentum,seed,train_fraction,shuffle,split}
//   savgol.{window,order}
//   cleanse.<channel>.{lo,hi}
//   svm.{lambda,epochs,seed}
// Throws ConfigError whose key() is the full dotted key.
RunConfig run_config_from(const Settings& settings);

// "kind:target:onset:magnitude:ramp", target '-' for component-level kinds.
FaultSpec parse_fault(const std::string& text);

}  // namespace osmoguard
