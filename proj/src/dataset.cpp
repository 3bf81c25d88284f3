#include "osmoguard/dataset.hpp"

#include "osmoguard/error.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace osmoguard {

namespace {

constexpr std::array<std::string_view, kChannelCount> kNames = {
    "pt270_5_1", "pt270_5_4", "qe270_5_1", "qe270_6_2", "pt270_6_3", "qe270_6_1"};

constexpr std::string_view kHeader =
    "t,pt270_5_1,pt270_5_4,qe270_5_1,qe270_6_2,pt270_6_3,qe270_6_1,label";

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

}  // namespace

std::string_view channel_name(Channel c) { return kNames[index(c)]; }

std::optional<Channel> parse_channel(std::string_view name) {
    for (Channel c : kAllChannels) {
        if (kNames[index(c)] == name) return c;
    }
    // Accept the dotted tag spelling as well, e.g. "PT270.5.4".
    std::string lowered(name);
    for (char& ch : lowered) {
        if (ch == '.') ch = '_';
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    for (Channel c : kAllChannels) {
        if (kNames[index(c)] == lowered) return c;
    }
    return std::nullopt;
}

bool is_pressure(Channel c) {
    return c == Channel::PT270_5_1 || c == Channel::PT270_5_4 || c == Channel::PT270_6_3;
}

Eigen::VectorXd TimeSeriesDataset::column(Channel c) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(frames.size()));
    for (std::size_t i = 0; i < frames.size(); ++i) out(static_cast<Eigen::Index>(i)) = frames[i][c];
    return out;
}

Eigen::MatrixXd TimeSeriesDataset::matrix() const {
    Eigen::MatrixXd out(kChannelCount, static_cast<Eigen::Index>(frames.size()));
    for (std::size_t i = 0; i < frames.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = frames[i].values;
    return out;
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) {
        throw ArgumentError("not a number: '" + std::string(s) + "'");
    }
    return v;
}

void write_csv(std::ostream& out, const TimeSeriesDataset& data) {
    out << kHeader << '\n';
    for (const auto& f : data.frames) {
        out << f.t;
        for (int c = 0; c < kChannelCount; ++c) out << ',' << format_double(f.values(c));
        out << ',' << (!f.valid ? "invalid" : f.label == Label::Faulty ? "faulty" : "normal") << '\n';
    }
}

void write_csv(const std::string& path, const TimeSeriesDataset& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_csv(out, data);
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

TimeSeriesDataset read_csv(std::istream& in) {
    TimeSeriesDataset data;
    std::string line;
    if (!std::getline(in, line) || trim_cr(line) != kHeader) {
        throw IoError("dataset CSV must start with header '" + std::string(kHeader) + "'");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        auto view = trim_cr(line);
        if (view.empty()) continue;
        auto fields = split(view, ',');
        if (fields.size() != kChannelCount + 2) {
            throw IoError("line " + std::to_string(lineno) + ": expected 8 fields");
        }
        SensorFrame f;
        try {
            std::int64_t t = 0;
            auto res = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), t);
            if (res.ec != std::errc() || res.ptr != fields[0].data() + fields[0].size()) {
                throw ArgumentError("bad timestamp");
            }
            f.t = t;
            for (int c = 0; c < kChannelCount; ++c) f.values(c) = parse_double(fields[c + 1]);
        } catch (const ArgumentError& e) {
            throw IoError("line " + std::to_string(lineno) + ": " + e.what());
        }
        auto label = fields[kChannelCount + 1];
        if (label == "normal") {
            f.label = Label::Normal;
        } else if (label == "faulty") {
            f.label = Label::Faulty;
        } else if (label == "invalid") {
            f.valid = false;
        } else {
            throw IoError("line " + std::to_string(lineno) + ": unknown label '" + std::string(label) + "'");
        }
        data.frames.push_back(f);
    }
    return data;
}

TimeSeriesDataset read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    return read_csv(in);
}

}  // namespace osmoguard
