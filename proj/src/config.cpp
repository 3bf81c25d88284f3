#include "osmoguard/config.hpp"

#include "osmoguard/error.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace osmoguard {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Re-raises a field-level ConfigError under its dotted key.
template <typename F>
void with_prefix(const std::string& prefix, F&& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        const auto colon = what.find(": ");
        throw ConfigError(prefix + e.key(), colon == std::string::npos ? what : what.substr(colon + 2));
    }
}

}  // namespace

Settings Settings::parse(std::istream& in) {
    Settings s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto text = trim(line);
        if (text.empty() || text[0] == '#') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno), "expected 'key = value'");
        const auto key = trim(text.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno), "empty key");
        s.values_[key] = trim(text.substr(eq + 1));
    }
    return s;
}

Settings Settings::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    return parse(in);
}

void Settings::set_assignment(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError(assignment, "override must look like key=value");
    set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

std::optional<std::string> Settings::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

double Settings::get_double(const std::string& key, double fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    try {
        return parse_double(*v);
    } catch (const ArgumentError&) {
        throw ConfigError(key, "expected a number, got '" + *v + "'");
    }
}

std::int64_t Settings::get_int(const std::string& key, std::int64_t fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    std::int64_t out = 0;
    auto res = std::from_chars(v->data(), v->data() + v->size(), out);
    if (res.ec != std::errc() || res.ptr != v->data() + v->size()) {
        throw ConfigError(key, "expected an integer, got '" + *v + "'");
    }
    return out;
}

bool Settings::get_bool(const std::string& key, bool fallback) const {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError(key, "expected true/false, got '" + *v + "'");
}

std::string Settings::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

MonitorConfig RunConfig::monitor_for(Component c) const {
    auto it = monitor_overrides.find(c);
    return it == monitor_overrides.end() ? monitor : it->second;
}

namespace {

MonitorConfig read_monitor(const Settings& s, const std::string& prefix, MonitorConfig base) {
    base.zeta = s.get_double(prefix + "zeta", base.zeta);
    base.window = static_cast<int>(s.get_int(prefix + "window", base.window));
    base.debounce = static_cast<int>(s.get_int(prefix + "debounce", base.debounce));
    base.latch = s.get_bool(prefix + "latch", base.latch);
    if (auto mode = s.get(prefix + "mode")) {
        auto parsed = parse_monitor_mode(*mode);
        if (!parsed) throw ConfigError(prefix + "mode", "expected fixed or adaptive, got '" + *mode + "'");
        base.mode = *parsed;
    }
    with_prefix(prefix, [&] { base.validate(); });
    return base;
}

}  // namespace

FaultSpec parse_fault(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(trim(part));
    if (parts.size() != 5) throw ConfigError("fault", "expected kind:target:onset:magnitude:ramp, got '" + text + "'");
    Settings s;
    s.set("kind", parts[0]);
    if (parts[1] != "-" && !parts[1].empty()) s.set("target", parts[1]);
    s.set("onset", parts[2]);
    s.set("magnitude", parts[3]);
    s.set("ramp_minutes", parts[4]);

    FaultSpec f;
    const auto kind = parse_fault_kind(s.get_string("kind", ""));
    if (!kind) throw ConfigError("fault.kind", "unknown fault kind '" + parts[0] + "'");
    f.kind = *kind;
    if (auto target = s.get("target")) {
        f.channel = parse_channel(*target);
        if (!f.channel) throw ConfigError("fault.target", "unknown channel '" + *target + "'");
    }
    f.onset = s.get_int("onset", 0);
    f.magnitude = s.get_double("magnitude", 0.0);
    f.ramp_minutes = s.get_int("ramp_minutes", 0);
    return f;
}

RunConfig run_config_from(const Settings& s) {
    RunConfig rc;

    auto& p = rc.plant;
    p.feed_conductivity_mean = s.get_double("plant.feed_conductivity_mean", p.feed_conductivity_mean);
    p.feed_std = s.get_double("plant.feed_std", p.feed_std);
    p.feed_ar = s.get_double("plant.feed_ar", p.feed_ar);
    p.pump_setpoint = s.get_double("plant.pump_setpoint", p.pump_setpoint);
    p.pump_inlet_mean = s.get_double("plant.pump_inlet_mean", p.pump_inlet_mean);
    p.pump_gain = s.get_double("plant.pump_gain", p.pump_gain);
    p.ro_rejection = s.get_double("plant.ro_rejection", p.ro_rejection);
    p.edi_rejection = s.get_double("plant.edi_rejection", p.edi_rejection);
    p.concentrate_gain = s.get_double("plant.concentrate_gain", p.concentrate_gain);
    p.edi_pressure_ratio = s.get_double("plant.edi_pressure_ratio", p.edi_pressure_ratio);
    p.seed = static_cast<std::uint64_t>(s.get_int("plant.seed", static_cast<std::int64_t>(p.seed)));
    for (Channel c : kAllChannels) {
        const std::string name(channel_name(c));
        p.noise_std(index(c)) = s.get_double("plant.noise_std." + name, p.noise_std(index(c)));
        p.ar_coefficient(index(c)) = s.get_double("plant.ar_coefficient." + name, p.ar_coefficient(index(c)));
    }
    with_prefix("plant.", [&] { p.validate(); });

    for (int i = 1;; ++i) {
        const std::string prefix = "fault." + std::to_string(i) + ".";
        if (!s.has(prefix + "kind")) break;
        FaultSpec f;
        const auto kind_text = s.get_string(prefix + "kind", "");
        const auto kind = parse_fault_kind(kind_text);
        if (!kind) throw ConfigError(prefix + "kind", "unknown fault kind '" + kind_text + "'");
        f.kind = *kind;
        if (auto target = s.get(prefix + "target")) {
            f.channel = parse_channel(*target);
            if (!f.channel) throw ConfigError(prefix + "target", "unknown channel '" + *target + "'");
        }
        f.onset = s.get_int(prefix + "onset", 0);
        f.magnitude = s.get_double(prefix + "magnitude", 0.0);
        f.ramp_minutes = s.get_int(prefix + "ramp_minutes", 0);
        if (f.ramp_minutes < 0) throw ConfigError(prefix + "ramp_minutes", "must be >= 0");
        rc.faults.push_back(f);
    }

    rc.monitor = read_monitor(s, "monitor.", rc.monitor);
    for (Component c : kAllComponents) {
        const std::string prefix = "monitor." + std::string(component_name(c)) + ".";
        bool any = false;
        for (const char* key : {"zeta", "window", "mode", "debounce", "latch"}) any = any || s.has(prefix + key);
        if (any) rc.monitor_overrides[c] = read_monitor(s, prefix, rc.monitor);
    }

    auto& t = rc.train;
    t.learning_rate = s.get_double("train.learning_rate", t.learning_rate);
    t.epochs = static_cast<int>(s.get_int("train.epochs", t.epochs));
    t.batch_size = static_cast<int>(s.get_int("train.batch_size", t.batch_size));
    t.momentum = s.get_double("train.momentum", t.momentum);
    t.seed = static_cast<std::uint64_t>(s.get_int("train.seed", static_cast<std::int64_t>(t.seed)));
    t.train_fraction = s.get_double("train.train_fraction", t.train_fraction);
    t.shuffle = s.get_bool("train.shuffle", t.shuffle);
    if (auto split = s.get("train.split")) {
        if (*split == "chronological") t.split = SplitMode::Chronological;
        else if (*split == "random") t.split = SplitMode::Random;
        else throw ConfigError("train.split", "expected chronological or random, got '" + *split + "'");
    }
    if (auto opt = s.get("train.optimizer")) {
        if (*opt == "adam") t.optimizer = Optimizer::Adam;
        else if (*opt == "sgd") t.optimizer = Optimizer::Sgd;
        else throw ConfigError("train.optimizer", "expected adam or sgd, got '" + *opt + "'");
    }
    t.anneal = s.get_bool("train.anneal", t.anneal);
    with_prefix("train.", [&] { t.validate(); });

    rc.savgol.window = static_cast<int>(s.get_int("savgol.window", rc.savgol.window));
    rc.savgol.order = static_cast<int>(s.get_int("savgol.order", rc.savgol.order));
    try {
        rc.savgol.validate();
    } catch (const ArgumentError& e) {
        throw ConfigError("savgol", e.what());
    }

    for (Channel c : kAllChannels) {
        const std::string prefix = "cleanse." + std::string(channel_name(c)) + ".";
        auto& r = rc.ranges[static_cast<std::size_t>(index(c))];
        r.lo = s.get_double(prefix + "lo", r.lo);
        r.hi = s.get_double(prefix + "hi", r.hi);
        if (!(r.lo < r.hi)) throw ConfigError(prefix + "hi", "must exceed lo");
    }

    rc.svm.lambda = s.get_double("svm.lambda", rc.svm.lambda);
    rc.svm.epochs = static_cast<int>(s.get_int("svm.epochs", rc.svm.epochs));
    rc.svm.seed = static_cast<std::uint64_t>(s.get_int("svm.seed", static_cast<std::int64_t>(rc.svm.seed)));
    if (!(rc.svm.lambda > 0.0)) throw ConfigError("svm.lambda", "must be positive");
    if (rc.svm.epochs < 1) throw ConfigError("svm.epochs", "must be positive");

    return rc;
}

}  // namespace osmoguard
