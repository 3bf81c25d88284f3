#include "osmoguard/cli.hpp"
#include "osmoguard/dataset.hpp"
#include "osmoguard/detect.hpp"
#include "osmoguard/preprocess.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace osmoguard;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("osmoguard_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& file) const { return (path / file).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t line_count(const std::string& path) {
    const auto text = slurp(path);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("simulate writes the requested rows") {
    TempDir dir("simulate");
    const auto r = run_cli({"simulate", "--minutes", "25", "--out", dir / "s.csv"});
    CHECK(r.code == cli::kExitOk);
    CHECK(line_count(dir / "s.csv") == 26);
    const auto d = read_csv(dir / "s.csv");
    CHECK(d.size() == 25);
    CHECK(d.frames.back().t == 24);
}

TEST_CASE("simulate: invalid config names the key and exits 2") {
    TempDir dir("badcfg");
    auto r = run_cli({"simulate", "--minutes", "5", "--out", dir / "s.csv", "--set", "plant.ro_rejection=1.5"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("plant.ro_rejection") != std::string::npos);

    std::ofstream(dir / "cfg.txt") << "# plant\nplant.ro_rejection = 1.5\n";
    r = run_cli({"simulate", "--minutes", "5", "--out", dir / "s.csv", "--config", dir / "cfg.txt"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("plant.ro_rejection") != std::string::npos);

    r = run_cli({"simulate", "--minutes", "5", "--out", dir / "s.csv", "--set", "plant.seed=abc"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("plant.seed") != std::string::npos);

    r = run_cli({"simulate", "--out", dir / "s.csv"});
    CHECK(r.code == cli::kExitConfig);
    r = run_cli({"bogus"});
    CHECK(r.code == cli::kExitConfig);
    r = run_cli({"simulate", "--minutes", "5", "--out", dir / "s.csv", "--fault", "nonsense"});
    CHECK(r.code == cli::kExitConfig);
}

TEST_CASE("simulate: unwritable output exits 3") {
    TempDir dir("unwritable");
    std::ofstream(dir / "file") << "x";
    auto r = run_cli({"simulate", "--minutes", "5", "--out", (dir / "file") + "/sub/s.csv"});
    CHECK(r.code == cli::kExitIo);
    r = run_cli({"simulate", "--minutes", "5", "--out", dir / "s.csv", "--config", dir / "missing.cfg"});
    CHECK(r.code == cli::kExitIo);
}

TEST_CASE("flags override the config file, --set overrides flags") {
    TempDir dir("precedence");
    std::ofstream(dir / "cfg.txt") << "plant.seed = 5\n";
    run_cli({"simulate", "--minutes", "20", "--out", dir / "a.csv", "--config", dir / "cfg.txt"});
    run_cli({"simulate", "--minutes", "20", "--out", dir / "b.csv", "--set", "plant.seed=5"});
    run_cli({"simulate", "--minutes", "20", "--out", dir / "c.csv", "--config", dir / "cfg.txt", "--seed", "6"});
    run_cli({"simulate", "--minutes", "20", "--out", dir / "d.csv", "--seed", "5", "--set", "plant.seed=6"});
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.csv") != slurp(dir / "c.csv"));
    CHECK(slurp(dir / "c.csv") == slurp(dir / "d.csv"));
}

TEST_CASE("preprocess through files") {
    TempDir dir("preprocess");
    REQUIRE(run_cli({"simulate", "--minutes", "100", "--out", dir / "raw.csv"}).code == 0);
    auto r = run_cli({"preprocess", "--in", dir / "raw.csv", "--out", dir / "pre.csv", "--fit-normalizer",
                      dir / "norm.txt"});
    CHECK(r.code == 0);
    CHECK(line_count(dir / "pre.csv") == 101);
    CHECK(r.err.find("cleanse: rows_in=100 rows_dropped=0") != std::string::npos);

    auto d = read_csv(dir / "raw.csv");
    d.frames[10].valid = false;
    d.frames[20].valid = false;
    for (auto& f : d.frames) f[Channel::PT270_6_3] = 3.75;
    write_csv(dir / "edited.csv", d);
    r = run_cli({"preprocess", "--in", dir / "edited.csv", "--out", dir / "pre2.csv", "--normalizer",
                 dir / "norm.txt", "--no-smooth"});
    CHECK(r.code == 0);
    CHECK(r.err.find("rows_dropped=2 invalid_flag=2 non_finite=0 out_of_physical_range=0") != std::string::npos);
    CHECK(line_count(dir / "pre2.csv") == 99);

    r = run_cli({"preprocess", "--in", dir / "edited.csv", "--out", dir / "pre3.csv", "--fit-normalizer",
                 dir / "norm3.txt"});
    CHECK(r.code == 0);
    for (const auto& f : read_csv(dir / "pre3.csv").frames) CHECK(f[Channel::PT270_6_3] == 0.0);

    r = run_cli({"preprocess", "--in", dir / "raw.csv", "--out", dir / "x.csv"});
    CHECK(r.code == cli::kExitConfig);  // needs exactly one normalizer option
    r = run_cli({"preprocess", "--in", dir / "nope.csv", "--out", dir / "x.csv", "--fit-normalizer", dir / "n.txt"});
    CHECK(r.code == cli::kExitIo);
}

TEST_CASE("CSV schema round-trips byte for byte") {
    TempDir dir("schema");
    REQUIRE(run_cli({"simulate", "--minutes", "50", "--out", dir / "raw.csv", "--fault", "outage:-:10:0:3", "--fault",
                     "sensor_bias:QE270_5_1:30:2:0"})
                .code == 0);
    const auto text = slurp(dir / "raw.csv");
    CHECK(text.rfind("t,pt270_5_1,pt270_5_4,qe270_5_1,qe270_6_2,pt270_6_3,qe270_6_1,label\n", 0) == 0);
    write_csv(dir / "again.csv", read_csv(dir / "raw.csv"));
    CHECK(slurp(dir / "again.csv") == text);
    const auto d = read_csv(dir / "raw.csv");
    CHECK_FALSE(d.frames[11].valid);
    CHECK(d.frames[40].label == Label::Faulty);
}

TEST_CASE("train, monitor and evaluate a pump degradation") {
    TempDir dir("flow");
    REQUIRE(run_cli({"simulate", "--minutes", "1500", "--out", dir / "normal.csv"}).code == 0);
    REQUIRE(run_cli({"simulate", "--minutes", "1200", "--seed", "2", "--out", dir / "test.csv", "--fault",
                     "pump_degradation:-:500:0.2:60"})
                .code == 0);
    REQUIRE(run_cli({"preprocess", "--in", dir / "normal.csv", "--out", dir / "normal_pre.csv", "--fit-normalizer",
                     dir / "norm.txt"})
                .code == 0);
    REQUIRE(run_cli({"preprocess", "--in", dir / "test.csv", "--out", dir / "test_pre.csv", "--normalizer",
                     dir / "norm.txt"})
                .code == 0);

    auto r = run_cli({"train-id", "--in", dir / "normal_pre.csv", "--component", "pump", "--model-out",
                      dir / "pump.mlp", "--loss-out", dir / "loss.csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("component=pump pairs=1498") != std::string::npos);
    CHECK(line_count(dir / "loss.csv") == 201);

    r = run_cli({"train-id", "--in", dir / "normal_pre.csv", "--component", "boiler", "--model-out", dir / "x.mlp"});
    CHECK(r.code == cli::kExitConfig);

    r = run_cli({"monitor", "--in", dir / "test_pre.csv", "--model", "pump=" + (dir / "pump.mlp"), "--calibration",
                 dir / "normal_pre.csv", "--alarms-out", dir / "alarms.csv", "--bands-out", dir / "bands.csv"});
    CHECK(r.code == cli::kExitAlarm);
    CHECK(r.out.find("cumulative_alarm=true") != std::string::npos);
    CHECK(line_count(dir / "bands.csv") == 1 + 1198);
    const auto alarms = read_alarms(dir / "alarms.csv");
    REQUIRE(alarms.size() == 1);
    CHECK(alarms[0].t >= 500);
    CHECK(alarms[0].t < 700);

    r = run_cli({"evaluate", "--alarms", dir / "alarms.csv", "--truth", dir / "test.csv", "--onset", "500"});
    CHECK(r.code == 0);
    CHECK(r.out.find("detected=true") != std::string::npos);
    CHECK(r.out.find("false_alarms=0") != std::string::npos);

    // Monitoring the normal stream itself raises nothing.
    r = run_cli({"monitor", "--in", dir / "normal_pre.csv", "--model", "pump=" + (dir / "pump.mlp"), "--calibration",
                 dir / "normal_pre.csv", "--calibration-method", "max"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("cumulative_alarm=false") != std::string::npos);

    r = run_cli({"monitor", "--in", dir / "test_pre.csv", "--model", "pump=" + (dir / "pump.mlp"), "--mode",
                 "adaptive", "--window", "60"});
    CHECK(r.code == cli::kExitAlarm);

    r = run_cli({"monitor", "--in", dir / "test_pre.csv", "--model", "pump=" + (dir / "pump.mlp")});
    CHECK(r.code == cli::kExitConfig);  // fixed mode needs a calibration set
    r = run_cli({"monitor", "--in", dir / "test_pre.csv", "--model", "pump=" + (dir / "pump.mlp"), "--calibration",
                 dir / "normal_pre.csv", "--zeta", "-1"});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("zeta") != std::string::npos);
}

TEST_CASE("train-clf and classify") {
    TempDir dir("clf");
    REQUIRE(run_cli({"simulate", "--minutes", "600", "--out", dir / "raw.csv", "--fault",
                     "sensor_bias:QE270_5_1:300:2:0"})
                .code == 0);
    REQUIRE(run_cli({"preprocess", "--in", dir / "raw.csv", "--out", dir / "pre.csv", "--fit-normalizer",
                     dir / "norm.txt", "--no-smooth"})
                .code == 0);
    auto r = run_cli({"train-clf", "--in", dir / "pre.csv", "--model-out", dir / "svm.txt", "--mlp-out",
                      dir / "clf.mlp"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("svm holdout: tp=75 fp=0 tn=75 fn=0 accuracy=1") != std::string::npos);
    CHECK(fs::exists(dir / "clf.mlp"));

    r = run_cli({"classify", "--in", dir / "pre.csv", "--model", dir / "svm.txt", "--report-out", dir / "rep.csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find("accuracy=1 ") != std::string::npos);
    CHECK(line_count(dir / "rep.csv") == 601);
    CHECK(slurp(dir / "rep.csv").rfind("t,label,predicted,margin\n", 0) == 0);

    r = run_cli({"classify", "--in", dir / "pre.csv", "--model", dir / "missing.txt"});
    CHECK(r.code == cli::kExitIo);
}

TEST_CASE("the binary honours the config environment variable and exit codes") {
    TempDir dir("binary");
    std::ofstream(dir / "cfg.txt") << "plant.ro_rejection = 1.5\n";
    const std::string bin = OSMOGUARD_CLI_BINARY;
    const std::string sim = bin + " simulate --minutes 5 --out " + (dir / "s.csv") + " 2>/dev/null";
    auto status = std::system(sim.c_str());
    CHECK(WEXITSTATUS(status) == 0);
    status = std::system(("OSMOGUARD_CONFIG=" + (dir / "cfg.txt") + " " + sim).c_str());
    CHECK(WEXITSTATUS(status) == 2);
    status = std::system((bin + " --help >/dev/null").c_str());
    CHECK(WEXITSTATUS(status) == 0);
}
