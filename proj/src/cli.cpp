#include "osmoguard/cli.hpp"

#include "osmoguard/classify.hpp"
#include "osmoguard/config.hpp"
#include "osmoguard/dataset.hpp"
#include "osmoguard/detect.hpp"
#include "osmoguard/error.hpp"
#include "osmoguard/identify.hpp"
#include "osmoguard/plant_sim.hpp"
#include "osmoguard/preprocess.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <set>

namespace osmoguard::cli {

namespace {

namespace fs = std::filesystem;

// Options shared by every subcommand.
struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    // Dedicated flags, stored under their settings key.
    std::map<std::string, std::string> flags;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value settings file (default: $OSMOGUARD_CONFIG)");
        cmd->add_option("--set", overrides, "override a setting, key=value")->take_all();
    }

    void flag(CLI::App* cmd, const std::string& name, const std::string& key, const std::string& help) {
        cmd->add_option_function<std::string>(
            name, [this, key](const std::string& v) { flags[key] = v; }, help);
    }

    Settings settings() const {
        Settings s;
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv(kConfigEnv)) path = env;
        }
        if (!path.empty()) s = Settings::load(path);
        for (const auto& [k, v] : flags) s.set(k, v);
        for (const auto& o : overrides) s.set_assignment(o);
        return s;
    }
};

void print_report(std::ostream& os, const CleanseReport& r) {
    auto count = [&](DropReason reason) {
        auto it = r.reasons.find(reason);
        return it == r.reasons.end() ? std::size_t{0} : it->second;
    };
    os << "cleanse: rows_in=" << r.rows_in << " rows_dropped=" << r.rows_dropped
       << " invalid_flag=" << count(DropReason::InvalidFlag) << " non_finite=" << count(DropReason::NonFinite)
       << " out_of_physical_range=" << count(DropReason::OutOfPhysicalRange) << '\n';
}

void print_confusion(std::ostream& os, const std::string& name, const ConfusionMatrix& cm) {
    os << name << ": tp=" << cm.tp << " fp=" << cm.fp << " tn=" << cm.tn << " fn=" << cm.fn
       << " accuracy=" << format_double(cm.accuracy()) << " precision=" << format_double(cm.precision())
       << " recall=" << format_double(cm.recall()) << " f_score=" << format_double(cm.f_score()) << '\n';
}

void print_metrics(std::ostream& os, const DetectionMetrics& m) {
    os << "detected=" << (m.detected ? "true" : "false") << '\n'
       << "detection_delay=" << (m.detection_delay ? std::to_string(*m.detection_delay) : "none") << '\n'
       << "false_alarms=" << m.false_alarms << '\n'
       << "false_alarm_rate=" << format_double(m.false_alarm_rate) << '\n';
}

void ensure_parent_dir(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) throw IoError("output directory does not exist: " + parent.string());
}

TimeSeriesDataset apply_faults(TimeSeriesDataset data, const std::vector<FaultSpec>& faults, const PlantConfig& plant) {
    for (const auto& f : faults) data = inject_fault(data, f, plant);
    return data;
}

// ---------------------------------------------------------------------------
// Model-based monitoring shared by `monitor` and `pipeline`.

struct ComponentModel {
    Component component;
    MlpModel model;
    ThresholdBand calibration;
};

struct MonitorOutput {
    std::vector<AlarmEvent> alarms;
    std::optional<std::int64_t> cumulative_at;
};

MonitorOutput run_monitors(const std::vector<ComponentModel>& models, const RunConfig& rc,
                           const TimeSeriesDataset& data, std::ostream* bands) {
    std::vector<Monitor> monitors;
    std::vector<std::map<std::int64_t, std::pair<double, double>>> series;  // t -> (y_out, y_nn)
    std::set<std::int64_t> stamps;
    for (const auto& cm : models) {
        monitors.emplace_back(std::string(component_name(cm.component)), rc.monitor_for(cm.component), cm.calibration);
        const auto pred = predict_series(cm.model, data, default_regressor(cm.component));
        auto& s = series.emplace_back();
        for (std::size_t i = 0; i < pred.t.size(); ++i) {
            s[pred.t[i]] = {pred.y_out(static_cast<Eigen::Index>(i)), pred.y_nn(static_cast<Eigen::Index>(i))};
            stamps.insert(pred.t[i]);
        }
    }

    if (bands) *bands << "component,t,y_out,y_nn,residual,lower,upper,out_of_band,alarmed,cumulative\n";
    MonitorOutput out;
    for (std::int64_t t : stamps) {
        std::vector<std::size_t> stepped;
        for (std::size_t m = 0; m < monitors.size(); ++m) {
            auto it = series[m].find(t);
            if (it == series[m].end()) continue;
            const auto [y_out, y_nn] = it->second;
            if (auto ev = monitors[m].step(t, residual(y_out, y_nn))) out.alarms.push_back(*ev);
            stepped.push_back(m);
        }
        const bool cumulative = cumulative_alarm(std::span<const Monitor>(monitors));
        if (cumulative && !out.cumulative_at) out.cumulative_at = t;
        if (!bands) continue;
        for (std::size_t m : stepped) {
            const auto& rec = *monitors[m].last_step();
            const auto [y_out, y_nn] = series[m].at(t);
            *bands << monitors[m].component() << ',' << t << ',' << format_double(y_out) << ',' << format_double(y_nn)
                   << ',' << format_double(rec.residual) << ','
                   << (rec.band ? format_double(rec.band->lower()) : "") << ','
                   << (rec.band ? format_double(rec.band->upper()) : "") << ',' << (rec.out_of_band ? 1 : 0) << ','
                   << (rec.alarmed ? 1 : 0) << ',' << (cumulative ? 1 : 0) << '\n';
        }
    }
    return out;
}

ThresholdBand calibrate(const Eigen::VectorXd& residuals, double zeta, const std::string& method) {
    if (method == "sigma") return fixed_band(residuals, zeta);
    if (method == "max") return empirical_max_band(residuals);
    throw ConfigError("calibration-method", "expected sigma or max, got '" + method + "'");
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_simulate(const Common& common, std::int64_t minutes, const std::string& out_path,
                 const std::vector<std::string>& fault_texts, std::ostream& out) {
    const auto rc = run_config_from(common.settings());
    auto faults = rc.faults;
    for (const auto& text : fault_texts) faults.push_back(parse_fault(text));
    auto data = apply_faults(simulate(rc.plant, minutes), faults, rc.plant);
    ensure_parent_dir(out_path);
    write_csv(out_path, data);
    out << "wrote " << data.size() << " frames to " << out_path << '\n';
    return kExitOk;
}

int cmd_preprocess(const Common& common, const std::string& in_path, const std::string& out_path,
                   const std::string& normalizer_in, const std::string& normalizer_out, bool no_smooth,
                   std::ostream& err) {
    const auto rc = run_config_from(common.settings());
    if (normalizer_in.empty() == normalizer_out.empty()) {
        throw ArgumentError("preprocess: give exactly one of --normalizer or --fit-normalizer");
    }
    const auto raw = read_csv(in_path);
    auto cleaned = cleanse(raw, rc.ranges);
    print_report(err, cleaned.report);

    Normalizer norm;
    if (!normalizer_in.empty()) {
        norm = load_normalizer(normalizer_in);
    } else {
        norm = fit_normalizer(cleaned.data);
        ensure_parent_dir(normalizer_out);
        save_normalizer(normalizer_out, norm);
    }
    auto data = normalize(norm, cleaned.data);
    if (!no_smooth) data = smooth(data, rc.savgol);
    ensure_parent_dir(out_path);
    write_csv(out_path, data);
    return kExitOk;
}

struct Identified {
    TrainResult<double> result;
    Regressors regressors;
};

Identified identify_component(const TimeSeriesDataset& data, Component c, const TrainConfig& cfg) {
    const auto spec = default_regressor(c);
    Identified id;
    id.regressors = build_regressors(data, spec);
    id.result = train(MlpModel::random(identifier_layers(spec), cfg.seed), id.regressors.samples, cfg);
    return id;
}

Eigen::VectorXd holdout_residuals(const Identified& id) {
    const auto hold = select(id.regressors.samples, id.result.holdout_indices);
    return (hold.targets - forward(id.result.model, hold.inputs)).row(0).transpose();
}

int cmd_train_id(const Common& common, const std::string& in_path, const std::string& component,
                 const std::string& model_out, const std::string& loss_out, std::ostream& out) {
    const auto rc = run_config_from(common.settings());
    const auto c = parse_component(component);
    if (!c) throw ConfigError("component", "expected pump, ro or edi, got '" + component + "'");
    const auto data = read_csv(in_path);
    const auto id = identify_component(data, *c, rc.train);
    ensure_parent_dir(model_out);
    save_model(model_out, id.result.model);
    if (!loss_out.empty()) {
        ensure_parent_dir(loss_out);
        std::ofstream los(loss_out, std::ios::binary);
        if (!los) throw IoError("cannot open for writing: " + loss_out);
        los << "epoch,train_mse\n";
        for (std::size_t e = 0; e < id.result.loss_history.size(); ++e) {
            los << e + 1 << ',' << format_double(id.result.loss_history[e]) << '\n';
        }
    }
    out << "component=" << component << " pairs=" << id.regressors.samples.size()
        << " train_mse=" << format_double(id.result.train_mse)
        << " holdout_mse=" << format_double(id.result.holdout_mse) << '\n';
    return kExitOk;
}

int cmd_monitor(const Common& common, const std::string& in_path, const std::vector<std::string>& model_args,
                const std::string& calibration_path, const std::string& method, const std::string& alarms_out,
                const std::string& bands_out, std::ostream& out) {
    const auto rc = run_config_from(common.settings());
    if (model_args.empty()) throw ArgumentError("monitor: at least one --model component=path is required");
    const auto data = read_csv(in_path);
    std::optional<TimeSeriesDataset> calibration;
    if (!calibration_path.empty()) calibration = read_csv(calibration_path);

    std::vector<ComponentModel> models;
    for (const auto& arg : model_args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) throw ArgumentError("--model expects component=path, got '" + arg + "'");
        const auto c = parse_component(arg.substr(0, eq));
        if (!c) throw ConfigError("model", "unknown component '" + arg.substr(0, eq) + "'");
        ComponentModel cm{*c, load_model(arg.substr(eq + 1)), {}};
        const auto cfg = rc.monitor_for(*c);
        if (cfg.mode == MonitorMode::Fixed) {
            if (!calibration) throw StateError("monitor: fixed mode needs --calibration with normal data");
            const auto pred = predict_series(cm.model, *calibration, default_regressor(*c));
            cm.calibration = calibrate(pred.residuals(), cfg.zeta, method);
        }
        models.push_back(std::move(cm));
    }

    std::ofstream bands;
    if (!bands_out.empty()) {
        ensure_parent_dir(bands_out);
        bands.open(bands_out, std::ios::binary);
        if (!bands) throw IoError("cannot open for writing: " + bands_out);
    }
    const auto result = run_monitors(models, rc, data, bands_out.empty() ? nullptr : &bands);
    if (!bands_out.empty() && !bands) throw IoError("write failed: " + bands_out);
    if (!alarms_out.empty()) {
        ensure_parent_dir(alarms_out);
        write_alarms(alarms_out, result.alarms);
    }
    for (const auto& cm : models) {
        out << "band " << component_name(cm.component) << ": lower=" << format_double(cm.calibration.lower())
            << " upper=" << format_double(cm.calibration.upper()) << '\n';
    }
    for (const auto& a : result.alarms) {
        out << "alarm " << a.component << " t=" << a.t << " residual=" << format_double(a.residual) << '\n';
    }
    out << "cumulative_alarm=" << (result.cumulative_at ? "true" : "false");
    if (result.cumulative_at) out << " t=" << *result.cumulative_at;
    out << '\n';
    return result.alarms.empty() ? kExitOk : kExitAlarm;
}

int cmd_train_clf(const Common& common, const std::string& in_path, const std::string& model_out,
                  const std::string& mlp_out, double holdout_fraction, std::ostream& out) {
    const auto rc = run_config_from(common.settings());
    const auto features = frame_features(read_csv(in_path));
    const auto split = stratified_split(features.y, holdout_fraction, rc.svm.seed);
    const auto train_set = select(features, split.train);
    const auto holdout = select(features, split.holdout);
    const auto model = train_svm(train_set, rc.svm);
    ensure_parent_dir(model_out);
    save_svm(model_out, model);
    print_confusion(out, "svm holdout", confusion(model, holdout));
    print_confusion(out, "svm resubstitution", confusion(model, train_set));
    if (!mlp_out.empty()) {
        TrainConfig cfg = rc.train;
        cfg.split = SplitMode::Random;
        const auto mlp = train_mlp_classifier(train_set, {10}, cfg);
        ensure_parent_dir(mlp_out);
        save_model(mlp_out, mlp);
        print_confusion(out, "mlp holdout", confusion(mlp, holdout));
        print_confusion(out, "mlp resubstitution", confusion(mlp, train_set));
    }
    return kExitOk;
}

int cmd_classify(const std::string& in_path, const std::string& model_path, const std::string& report_out,
                 std::ostream& out) {
    const auto data = read_csv(in_path);
    const auto model = load_svm(model_path);
    std::ofstream report;
    if (!report_out.empty()) {
        ensure_parent_dir(report_out);
        report.open(report_out, std::ios::binary);
        if (!report) throw IoError("cannot open for writing: " + report_out);
        report << "t,label,predicted,margin\n";
    }
    std::vector<int> predicted;
    Eigen::VectorXd truth(static_cast<Eigen::Index>(data.size()));
    Eigen::Index n = 0;
    for (const auto& f : data.frames) {
        if (!f.valid) continue;
        const double margin = model.margin(f.values);
        const int label = margin >= 0.0 ? 1 : -1;
        predicted.push_back(label);
        truth(n++) = f.label == Label::Faulty ? 1.0 : -1.0;
        if (report) {
            report << f.t << ',' << (f.label == Label::Faulty ? "faulty" : "normal") << ','
                   << (label > 0 ? "faulty" : "normal") << ',' << format_double(margin) << '\n';
        }
    }
    if (!report_out.empty() && !report) throw IoError("write failed: " + report_out);
    print_confusion(out, "svm", confusion(predicted, truth.head(n)));
    return kExitOk;
}

int cmd_evaluate(const std::string& alarms_path, const std::string& truth_path, std::int64_t onset,
                 const std::string& component, std::ostream& out) {
    auto alarms = read_alarms(alarms_path);
    if (!component.empty()) {
        std::erase_if(alarms, [&](const AlarmEvent& a) { return a.component != component; });
    }
    print_metrics(out, evaluate(alarms, read_csv(truth_path), onset));
    return kExitOk;
}

// Full reproduction run: simulate normal and faulty streams, preprocess,
// identify every component, monitor, evaluate and classify.
int cmd_pipeline(const Common& common, const std::string& out_dir, std::ostream& out) {
    const auto settings = common.settings();
    const auto rc = run_config_from(settings);
    const auto train_minutes = settings.get_int("pipeline.train_minutes", 1500);
    const auto test_minutes = settings.get_int("pipeline.test_minutes", 2000);
    const auto method = settings.get_string("pipeline.calibration", "sigma");

    if (!fs::is_directory(out_dir)) {
        std::error_code ec;
        fs::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory: " + out_dir);
    }
    auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

    auto faults = rc.faults;
    if (faults.empty()) faults.push_back({FaultKind::PumpDegradation, std::nullopt, 500, 0.2, 60});

    const auto normal = simulate(rc.plant, train_minutes);
    PlantConfig test_plant = rc.plant;
    test_plant.seed = rc.plant.seed + 1;
    const auto test = apply_faults(simulate(test_plant, test_minutes), faults, test_plant);
    write_csv(path("normal.csv"), normal);
    write_csv(path("test.csv"), test);

    auto cleaned = cleanse(normal, rc.ranges);
    print_report(out, cleaned.report);
    const auto norm = fit_normalizer(cleaned.data);
    save_normalizer(path("normalizer.txt"), norm);
    const auto normal_pre = preprocess(normal, norm, rc.savgol, rc.ranges).data;
    const auto test_pre_result = preprocess(test, norm, rc.savgol, rc.ranges);
    print_report(out, test_pre_result.report);
    const auto& test_pre = test_pre_result.data;
    write_csv(path("normal_pre.csv"), normal_pre);
    write_csv(path("test_pre.csv"), test_pre);

    std::vector<ComponentModel> models;
    for (Component c : kAllComponents) {
        const auto id = identify_component(normal_pre, c, rc.train);
        const std::string name(component_name(c));
        save_model((fs::path(out_dir) / (name + ".mlp")).string(), id.result.model);
        const auto cfg = rc.monitor_for(c);
        const auto band = calibrate(holdout_residuals(id), cfg.zeta, method);
        out << "identify " << name << ": train_mse=" << format_double(id.result.train_mse)
            << " holdout_mse=" << format_double(id.result.holdout_mse) << " band=[" << format_double(band.lower())
            << ", " << format_double(band.upper()) << "]\n";
        models.push_back({c, id.result.model, band});
    }

    std::ofstream bands(path("bands.csv"), std::ios::binary);
    if (!bands) throw IoError("cannot open for writing: " + path("bands.csv"));
    const auto monitored = run_monitors(models, rc, test_pre, &bands);
    write_alarms(path("alarms.csv"), monitored.alarms);

    const std::int64_t onset = test.frames[static_cast<std::size_t>(faults.front().onset)].t;
    const auto metrics = evaluate(monitored.alarms, test_pre, onset);
    {
        std::ofstream mos(path("metrics.txt"), std::ios::binary);
        if (!mos) throw IoError("cannot open for writing: " + path("metrics.txt"));
        mos << "onset=" << onset << '\n';
        print_metrics(mos, metrics);
    }
    out << "monitor: alarms=" << monitored.alarms.size() << ' ';
    print_metrics(out, metrics);

    const auto features = frame_features(test_pre);
    bool both = (features.y.array() > 0).any() && (features.y.array() < 0).any();
    if (both) {
        const auto split = stratified_split(features.y, 0.25, rc.svm.seed);
        const auto svm = train_svm(select(features, split.train), rc.svm);
        save_svm(path("svm.txt"), svm);
        print_confusion(out, "svm holdout", confusion(svm, select(features, split.holdout)));
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"osmoguard: fault detection toolkit for a water-purification plant", "osmoguard"};
    app.require_subcommand(1);

    Common common;

    std::int64_t minutes = 0;
    std::string in_path, out_path, normalizer_in, normalizer_out, component, model_out, loss_out, calibration,
        method = "sigma", alarms_out, bands_out, model_path, report_out, mlp_out, alarms_path, truth_path, out_dir;
    std::vector<std::string> faults, model_args;
    bool no_smooth = false;
    double holdout = 0.25;
    std::int64_t onset = 0;

    auto* sim = app.add_subcommand("simulate", "generate a sensor stream CSV");
    common.attach(sim);
    sim->add_option("--minutes", minutes, "stream length")->required();
    sim->add_option("--out", out_path, "output CSV")->required();
    sim->add_option("--fault", faults, "kind:target:onset:magnitude:ramp (repeatable)");
    common.flag(sim, "--seed", "plant.seed", "simulator seed");

    auto* pre = app.add_subcommand("preprocess", "cleanse, normalize and smooth a dataset");
    common.attach(pre);
    pre->add_option("--in", in_path, "input CSV")->required();
    pre->add_option("--out", out_path, "output CSV")->required();
    pre->add_option("--normalizer", normalizer_in, "apply a saved normalizer");
    pre->add_option("--fit-normalizer", normalizer_out, "fit a normalizer on the input and save it here");
    pre->add_flag("--no-smooth", no_smooth, "skip Savitzky-Golay smoothing");
    common.flag(pre, "--savgol-window", "savgol.window", "smoothing window (odd)");
    common.flag(pre, "--savgol-order", "savgol.order", "smoothing polynomial order");

    auto* tid = app.add_subcommand("train-id", "train a component identifier");
    common.attach(tid);
    tid->add_option("--in", in_path, "preprocessed normal-operation CSV")->required();
    tid->add_option("--component", component, "pump, ro or edi")->required();
    tid->add_option("--model-out", model_out, "model file")->required();
    tid->add_option("--loss-out", loss_out, "per-epoch training loss CSV");
    common.flag(tid, "--epochs", "train.epochs", "training epochs");
    common.flag(tid, "--learning-rate", "train.learning_rate", "step size");
    common.flag(tid, "--batch-size", "train.batch_size", "mini-batch size");
    common.flag(tid, "--train-seed", "train.seed", "initialization and shuffling seed");
    common.flag(tid, "--split", "train.split", "chronological or random");

    auto* mon = app.add_subcommand("monitor", "residual monitoring with fixed or adaptive thresholds");
    common.attach(mon);
    mon->add_option("--in", in_path, "preprocessed CSV to monitor")->required();
    mon->add_option("--model", model_args, "component=model-file (repeatable)")->required();
    mon->add_option("--calibration", calibration, "normal-operation CSV for the fixed band");
    mon->add_option("--calibration-method", method, "sigma (mean +- zeta*std) or max (largest |residual|)");
    mon->add_option("--alarms-out", alarms_out, "alarm log CSV");
    mon->add_option("--bands-out", bands_out, "per-step residual and band CSV");
    common.flag(mon, "--mode", "monitor.mode", "fixed or adaptive");
    common.flag(mon, "--zeta", "monitor.zeta", "band width in standard deviations");
    common.flag(mon, "--window", "monitor.window", "adaptive window length");
    common.flag(mon, "--debounce", "monitor.debounce", "consecutive out-of-band samples to alarm");

    auto* tclf = app.add_subcommand("train-clf", "train the linear SVM classifier");
    common.attach(tclf);
    tclf->add_option("--in", in_path, "labeled preprocessed CSV")->required();
    tclf->add_option("--model-out", model_out, "SVM model file")->required();
    tclf->add_option("--mlp-out", mlp_out, "also train an MLP classifier and save it here");
    tclf->add_option("--holdout", holdout, "held-out fraction per class");
    common.flag(tclf, "--lambda", "svm.lambda", "regularization strength");
    common.flag(tclf, "--svm-epochs", "svm.epochs", "passes over the data");
    common.flag(tclf, "--svm-seed", "svm.seed", "shuffling seed");

    auto* clf = app.add_subcommand("classify", "classify frames with a trained SVM");
    clf->add_option("--in", in_path, "labeled preprocessed CSV")->required();
    clf->add_option("--model", model_path, "SVM model file")->required();
    clf->add_option("--report-out", report_out, "per-frame prediction CSV");

    auto* eval = app.add_subcommand("evaluate", "detection delay and false alarms of an alarm log");
    eval->add_option("--alarms", alarms_path, "alarm log CSV")->required();
    eval->add_option("--truth", truth_path, "ground-truth dataset CSV")->required();
    eval->add_option("--onset", onset, "fault onset minute")->required();
    eval->add_option("--component", component, "only count alarms of this component");

    auto* pipe = app.add_subcommand("pipeline", "end-to-end reproduction run");
    common.attach(pipe);
    pipe->add_option("--out-dir", out_dir, "artifact directory")->required();

    std::vector<std::string> argv_store{"osmoguard"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*sim) return cmd_simulate(common, minutes, out_path, faults, out);
        if (*pre) return cmd_preprocess(common, in_path, out_path, normalizer_in, normalizer_out, no_smooth, err);
        if (*tid) return cmd_train_id(common, in_path, component, model_out, loss_out, out);
        if (*mon) return cmd_monitor(common, in_path, model_args, calibration, method, alarms_out, bands_out, out);
        if (*tclf) return cmd_train_clf(common, in_path, model_out, mlp_out, holdout, out);
        if (*clf) return cmd_classify(in_path, model_path, report_out, out);
        if (*eval) return cmd_evaluate(alarms_path, truth_path, onset, component, out);
        if (*pipe) return cmd_pipeline(common, out_dir, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ArgumentError& e) {
        err << "argument error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const StateError& e) {
        err << "state error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace osmoguard::cli
