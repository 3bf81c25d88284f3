#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace osmoguard {

// The six monitored sensors of the purification unit.
enum class Channel : int {
    PT270_5_1 = 0,  // pressure before the frequency-regulated pump, bar
    PT270_5_4,      // pressure after the pump, bar
    QE270_5_1,      // conductivity after reverse osmosis, uS/cm
    QE270_6_2,      // conductivity of the RO concentrate, uS/cm
    PT270_6_3,      // pressure of the EDI stage, bar
    QE270_6_1,      // conductivity of EDI output to tank, uS/cm
};

inline constexpr int kChannelCount = 6;

inline constexpr std::array<Channel, kChannelCount> kAllChannels = {
    Channel::PT270_5_1, Channel::PT270_5_4, Channel::QE270_5_1,
    Channel::QE270_6_2, Channel::PT270_6_3, Channel::QE270_6_1};

constexpr int index(Channel c) { return static_cast<int>(c); }

// Lower-case CSV column name, e.g. "pt270_5_4".
std::string_view channel_name(Channel c);
std::optional<Channel> parse_channel(std::string_view name);
bool is_pressure(Channel c);

using ChannelVector = Eigen::Matrix<double, kChannelCount, 1>;

enum class Label { Normal, Faulty };

struct SensorFrame {
    std::int64_t t = 0;  // minutes since stream start
    ChannelVector values = ChannelVector::Zero();
    Label label = Label::Normal;
    bool valid = true;  // false for frames recorded during an outage

    double operator[](Channel c) const { return values(index(c)); }
    double& operator[](Channel c) { return values(index(c)); }
};

// Processing steps already applied to a dataset.
struct Provenance {
    bool simulated = false;
    bool fault_injected = false;
    bool cleansed = false;
    bool normalized = false;
    bool smoothed = false;
};

struct TimeSeriesDataset {
    std::vector<SensorFrame> frames;
    Provenance provenance;

    std::size_t size() const { return frames.size(); }
    bool empty() const { return frames.empty(); }

    Eigen::VectorXd column(Channel c) const;
    // 6 x N matrix, one column per frame.
    Eigen::MatrixXd matrix() const;
};

// CSV schema: t,pt270_5_1,pt270_5_4,qe270_5_1,qe270_6_2,pt270_6_3,qe270_6_1,label
// with label in {normal, faulty, invalid}. Values are written in shortest
// round-trip form, so read -> write is byte-identical.
void write_csv(std::ostream& out, const TimeSeriesDataset& data);
void write_csv(const std::string& path, const TimeSeriesDataset& data);
TimeSeriesDataset read_csv(std::istream& in);
TimeSeriesDataset read_csv(const std::string& path);

// Shortest decimal that parses back to exactly `v`.
std::string format_double(double v);
double parse_double(std::string_view s);

}  // namespace osmoguard
