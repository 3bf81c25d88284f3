#pragma once

#include "osmoguard/dataset.hpp"
#include "osmoguard/error.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <map>
#include <string>

namespace osmoguard {

// ---------------------------------------------------------------------------
// Cleansing

struct PhysicalRange {
    double lo;
    double hi;
};

using PhysicalRanges = std::array<PhysicalRange, kChannelCount>;

// Pressures [0, 40] bar, conductivities [0, 2000] uS/cm.
PhysicalRanges default_physical_ranges();

enum class DropReason { InvalidFlag, NonFinite, OutOfPhysicalRange };

struct CleanseReport {
    std::size_t rows_in = 0;
    std::size_t rows_dropped = 0;
    std::map<DropReason, std::size_t> reasons;
};

std::string_view drop_reason_name(DropReason r);

struct CleanseResult {
    TimeSeriesDataset data;
    CleanseReport report;
};

// Keeps rows that are valid, all-finite and inside `ranges`, in order. Each
// dropped row is counted once, under the first failing check in the order
// invalid flag, non-finite, out of range.
CleanseResult cleanse(const TimeSeriesDataset& data, const PhysicalRanges& ranges = default_physical_ranges());

// ---------------------------------------------------------------------------
// Min/max normalization

struct Normalizer {
    ChannelVector min = ChannelVector::Zero();
    ChannelVector max = ChannelVector::Zero();

    double apply(Channel c, double x) const {
        const double span = max(index(c)) - min(index(c));
        return span > 0.0 ? (x - min(index(c))) / span : 0.0;
    }

    double invert(Channel c, double x) const {
        return x * (max(index(c)) - min(index(c))) + min(index(c));
    }
};

Normalizer fit_normalizer(const TimeSeriesDataset& data);

// (x - min) / (max - min) per channel, 0 for degenerate channels. No clamping.
TimeSeriesDataset normalize(const Normalizer& norm, const TimeSeriesDataset& data);

// Text form: one `channel,min,max` line per channel.
void save_normalizer(const std::string& path, const Normalizer& norm);
Normalizer load_normalizer(const std::string& path);

// ---------------------------------------------------------------------------
// Savitzky-Golay smoothing

struct SavGolSpec {
    int window = 11;
    int order = 3;

    void validate() const {
        if (window < 3 || window % 2 == 0) throw ArgumentError("savgol window must be odd and >= 3");
        if (order < 0 || order >= window) throw ArgumentError("savgol order must satisfy 0 <= order < window");
    }
};

namespace detail {

// Least-squares projector P ((order+1) x window) mapping window samples to
// polynomial coefficients in the scaled abscissa x = offset / half_width.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> savgol_projector(const SavGolSpec& spec) {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    spec.validate();
    const int half = spec.window / 2;
    Matrix vander(spec.window, spec.order + 1);
    for (int i = 0; i < spec.window; ++i) {
        const Scalar x = Scalar(i - half) / Scalar(half);
        Scalar p(1);
        for (int j = 0; j <= spec.order; ++j) {
            vander(i, j) = p;
            p *= x;
        }
    }
    return vander.colPivHouseholderQr().solve(Matrix::Identity(spec.window, spec.window));
}

// Weights that evaluate the fitted polynomial at window position `pos`.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> savgol_weights_at(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& projector, const SavGolSpec& spec, int pos) {
    const int half = spec.window / 2;
    Eigen::Matrix<Scalar, 1, Eigen::Dynamic> powers(spec.order + 1);
    const Scalar x = Scalar(pos - half) / Scalar(half);
    Scalar p(1);
    for (int j = 0; j <= spec.order; ++j) {
        powers(j) = p;
        p *= x;
    }
    return (powers * projector).transpose();
}

}  // namespace detail

// Central-point convolution weights, length `window`.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> savgol_coefficients(const SavGolSpec& spec) {
    const auto projector = detail::savgol_projector<Scalar>(spec);
    return detail::savgol_weights_at<Scalar>(projector, spec, spec.window / 2);
}

// Smooths `series`, returning a vector of the same length. The first and
// last window/2 samples come from the polynomial fitted to the first/last
// full window, evaluated at their offsets.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> savgol(const Eigen::MatrixBase<Derived>& series,
                                                                  const SavGolSpec& spec) {
    using Scalar = typename Derived::Scalar;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    spec.validate();
    const Eigen::Index n = series.size();
    if (n < spec.window) throw ArgumentError("savgol: series shorter than window");

    const int half = spec.window / 2;
    const auto projector = detail::savgol_projector<Scalar>(spec);
    const Vector center = detail::savgol_weights_at<Scalar>(projector, spec, half);

    Vector out(n);
    for (Eigen::Index i = half; i < n - half; ++i) {
        out(i) = center.dot(series.derived().segment(i - half, spec.window));
    }
    for (int pos = 0; pos < half; ++pos) {
        const Vector head = detail::savgol_weights_at<Scalar>(projector, spec, pos);
        const Vector tail = detail::savgol_weights_at<Scalar>(projector, spec, spec.window - 1 - pos);
        out(pos) = head.dot(series.derived().head(spec.window));
        out(n - 1 - pos) = tail.dot(series.derived().tail(spec.window));
    }
    return out;
}

// Smooths every channel of `data`. Runs of consecutive valid timestamps are
// filtered independently; runs shorter than the window pass through as is.
TimeSeriesDataset smooth(const TimeSeriesDataset& data, const SavGolSpec& spec);

// cleanse -> normalize -> smooth.
struct PreprocessResult {
    TimeSeriesDataset data;
    CleanseReport report;
};

PreprocessResult preprocess(const TimeSeriesDataset& data, const Normalizer& norm, const SavGolSpec& spec,
                            const PhysicalRanges& ranges = default_physical_ranges());

}  // namespace osmoguard
