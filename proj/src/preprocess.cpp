#include "osmoguard/preprocess.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace osmoguard {

PhysicalRanges default_physical_ranges() {
    PhysicalRanges r{};
    for (Channel c : kAllChannels) {
        r[static_cast<std::size_t>(index(c))] = is_pressure(c) ? PhysicalRange{0.0, 40.0} : PhysicalRange{0.0, 2000.0};
    }
    return r;
}

std::string_view drop_reason_name(DropReason r) {
    switch (r) {
        case DropReason::InvalidFlag: return "invalid_flag";
        case DropReason::NonFinite: return "non_finite";
        case DropReason::OutOfPhysicalRange: return "out_of_physical_range";
    }
    return "unknown";
}

CleanseResult cleanse(const TimeSeriesDataset& data, const PhysicalRanges& ranges) {
    for (const auto& r : ranges) {
        if (!(r.lo < r.hi)) throw ArgumentError("cleanse: each range needs lo < hi");
    }
    CleanseResult result;
    result.data.provenance = data.provenance;
    result.data.provenance.cleansed = true;
    result.report.rows_in = data.size();

    for (const auto& f : data.frames) {
        std::optional<DropReason> reason;
        if (!f.valid) {
            reason = DropReason::InvalidFlag;
        } else if (!f.values.allFinite()) {
            reason = DropReason::NonFinite;
        } else {
            for (int c = 0; c < kChannelCount; ++c) {
                const auto& r = ranges[static_cast<std::size_t>(c)];
                if (f.values(c) < r.lo || f.values(c) > r.hi) {
                    reason = DropReason::OutOfPhysicalRange;
                    break;
                }
            }
        }
        if (reason) {
            ++result.report.reasons[*reason];
            ++result.report.rows_dropped;
        } else {
            result.data.frames.push_back(f);
        }
    }
    return result;
}

Normalizer fit_normalizer(const TimeSeriesDataset& data) {
    if (data.empty()) throw ArgumentError("fit_normalizer: empty dataset");
    Normalizer norm;
    norm.min = data.frames.front().values;
    norm.max = data.frames.front().values;
    for (const auto& f : data.frames) {
        norm.min = norm.min.cwiseMin(f.values);
        norm.max = norm.max.cwiseMax(f.values);
    }
    if (!norm.min.allFinite() || !norm.max.allFinite()) {
        throw ArgumentError("fit_normalizer: dataset contains non-finite values");
    }
    return norm;
}

TimeSeriesDataset normalize(const Normalizer& norm, const TimeSeriesDataset& data) {
    TimeSeriesDataset out = data;
    out.provenance.normalized = true;
    for (auto& f : out.frames) {
        for (Channel c : kAllChannels) f[c] = norm.apply(c, f[c]);
    }
    return out;
}

void save_normalizer(const std::string& path, const Normalizer& norm) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (Channel c : kAllChannels) {
        out << channel_name(c) << ',' << format_double(norm.min(index(c))) << ','
            << format_double(norm.max(index(c))) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

Normalizer load_normalizer(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    Normalizer norm;
    std::array<bool, kChannelCount> seen{};
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto a = line.find(',');
        const auto b = line.find(',', a == std::string::npos ? a : a + 1);
        if (a == std::string::npos || b == std::string::npos) throw IoError("normalizer: malformed line '" + line + "'");
        const auto channel = parse_channel(std::string_view(line).substr(0, a));
        if (!channel) throw IoError("normalizer: unknown channel in '" + line + "'");
        try {
            norm.min(index(*channel)) = parse_double(std::string_view(line).substr(a + 1, b - a - 1));
            norm.max(index(*channel)) = parse_double(std::string_view(line).substr(b + 1));
        } catch (const ArgumentError& e) {
            throw IoError(std::string("normalizer: ") + e.what());
        }
        seen[static_cast<std::size_t>(index(*channel))] = true;
    }
    for (Channel c : kAllChannels) {
        if (!seen[static_cast<std::size_t>(index(c))]) {
            throw IoError("normalizer: missing channel " + std::string(channel_name(c)));
        }
        if (!(norm.max(index(c)) >= norm.min(index(c)))) {
            throw IoError("normalizer: max < min for " + std::string(channel_name(c)));
        }
    }
    return norm;
}

TimeSeriesDataset smooth(const TimeSeriesDataset& data, const SavGolSpec& spec) {
    spec.validate();
    TimeSeriesDataset out = data;
    out.provenance.smoothed = true;
    const std::size_t n = data.size();
    std::size_t start = 0;
    while (start < n) {
        if (!data.frames[start].valid) {
            ++start;
            continue;
        }
        std::size_t end = start + 1;
        while (end < n && data.frames[end].valid && data.frames[end].t == data.frames[end - 1].t + 1) ++end;
        const auto len = static_cast<Eigen::Index>(end - start);
        if (len >= spec.window) {
            for (int c = 0; c < kChannelCount; ++c) {
                Eigen::VectorXd run(len);
                for (Eigen::Index i = 0; i < len; ++i) run(i) = data.frames[start + static_cast<std::size_t>(i)].values(c);
                const Eigen::VectorXd filtered = savgol(run, spec);
                for (Eigen::Index i = 0; i < len; ++i) out.frames[start + static_cast<std::size_t>(i)].values(c) = filtered(i);
            }
        }
        start = end;
    }
    return out;
}

PreprocessResult preprocess(const TimeSeriesDataset& data, const Normalizer& norm, const SavGolSpec& spec,
                            const PhysicalRanges& ranges) {
    auto cleaned = cleanse(data, ranges);
    return {smooth(normalize(norm, cleaned.data), spec), cleaned.report};
}

}  // namespace osmoguard
