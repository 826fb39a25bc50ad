#pragma once

// Accelerometer preprocessing: uniform resampling, low-pass filtering and
// fixed-size windowing.

#include <har/core.hpp>

#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace har {

inline constexpr double kDefaultRate = 50.0;
inline constexpr std::size_t kWindowSize = 256;
inline constexpr double kAccelBound = 8.0;
inline constexpr std::size_t kFilterTaps = 31;

struct RawSample {
    double timestamp = 0.0;  // seconds
    Vec3 accel{};            // g
    Label label = kUnlabeled;
};

struct UniformSeries {
    double start_time = 0.0;
    double rate = kDefaultRate;
    std::vector<Vec3> values;
    std::vector<Label> labels;

    std::size_t size() const { return values.size(); }
};

struct Window {
    std::vector<Vec3> samples;
    Label label = kUnlabeled;
    std::size_t stream_id = 0;
    std::size_t start_index = 0;
};

/// Resamples an irregular stream onto a uniform grid at `rate` Hz.
///
/// Values are linearly interpolated between the bracketing raw samples.
/// A gap larger than `gap_threshold` seconds ends the current series and
/// starts a new one at the next raw sample, so nothing is interpolated
/// across it. Each grid point takes the label of the raw sample nearest
/// in time (earlier sample on an exact tie).
inline std::vector<UniformSeries> resample_uniform(std::span<const RawSample> stream, double rate = kDefaultRate,
                                                   double gap_threshold = 1.0) {
    require(rate > 0.0 && std::isfinite(rate), "invalid_argument", "rate must be positive");
    require(gap_threshold > 0.0, "invalid_argument", "gap_threshold must be positive");

    for (std::size_t i = 0; i < stream.size(); ++i) {
        const auto& s = stream[i];
        require(std::isfinite(s.timestamp), "invalid_argument",
                "non-finite timestamp at index " + std::to_string(i));
        for (double a : s.accel) {
            require(std::isfinite(a) && std::abs(a) <= kAccelBound, "invalid_argument",
                    "acceleration out of bounds at index " + std::to_string(i));
        }
        if (i > 0) {
            require(s.timestamp >= stream[i - 1].timestamp, "non_monotone",
                    "timestamps decrease at index " + std::to_string(i));
        }
    }

    std::vector<UniformSeries> out;
    std::size_t begin = 0;
    while (begin < stream.size()) {
        std::size_t end = begin + 1;
        while (end < stream.size() && stream[end].timestamp - stream[end - 1].timestamp <= gap_threshold) {
            ++end;
        }

        const double t0 = stream[begin].timestamp;
        const double span = stream[end - 1].timestamp - t0;
        // The 1e-9 slack keeps the last grid point when span*rate lands just below an integer.
        const auto count = static_cast<std::size_t>(std::floor(span * rate + 1e-9)) + 1;

        UniformSeries series;
        series.start_time = t0;
        series.rate = rate;
        series.values.reserve(count);
        series.labels.reserve(count);

        std::size_t lo = begin;
        for (std::size_t k = 0; k < count; ++k) {
            const double t = t0 + static_cast<double>(k) / rate;
            while (lo + 1 < end && stream[lo + 1].timestamp <= t) {
                ++lo;
            }
            // Among duplicate timestamps, interpolate from the first one.
            std::size_t left = lo;
            while (left > begin && stream[left - 1].timestamp == stream[left].timestamp) {
                --left;
            }
            const RawSample& a = stream[left];
            Vec3 value = a.accel;
            Label label = a.label;
            if (lo + 1 < end && t > stream[lo].timestamp) {
                const RawSample& l = stream[lo];
                const RawSample& r = stream[lo + 1];
                const double w = (t - l.timestamp) / (r.timestamp - l.timestamp);
                for (std::size_t axis = 0; axis < 3; ++axis) {
                    value[axis] = l.accel[axis] + w * (r.accel[axis] - l.accel[axis]);
                }
                label = (t - l.timestamp <= r.timestamp - t) ? l.label : r.label;
            }
            series.values.push_back(value);
            series.labels.push_back(label);
        }
        out.push_back(std::move(series));
        begin = end;
    }
    return out;
}

/// Hamming-windowed sinc low-pass kernel with unit DC gain.
inline std::vector<double> design_lowpass(double cutoff, double rate, std::size_t taps = kFilterTaps) {
    require(taps % 2 == 1, "invalid_argument", "filter tap count must be odd");
    const double fc = cutoff / rate;  // cycles per sample
    const double center = static_cast<double>(taps - 1) / 2.0;
    std::vector<double> kernel(taps);
    double sum = 0.0;
    for (std::size_t n = 0; n < taps; ++n) {
        const double m = static_cast<double>(n) - center;
        const double arg = 2.0 * fc * m;
        const double sinc = (m == 0.0) ? 1.0 : std::sin(M_PI * arg) / (M_PI * arg);
        const double hamming = 0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(n) / static_cast<double>(taps - 1));
        kernel[n] = 2.0 * fc * sinc * hamming;
        sum += kernel[n];
    }
    for (double& h : kernel) {
        h /= sum;
    }
    return kernel;
}

/// Zero-phase FIR low-pass filter, applied per axis.
///
/// The symmetric kernel is centred on each output sample, which removes the
/// (taps-1)/2 group delay. Samples beyond either end are replicated from the
/// boundary so constant signals pass unchanged.
inline UniformSeries lowpass_filter(const UniformSeries& series, double cutoff) {
    require(cutoff > 0.0 && cutoff <= series.rate / 2.0, "invalid_argument",
            "cutoff must lie in (0, rate/2]");
    const auto kernel = design_lowpass(cutoff, series.rate);
    const auto half = static_cast<std::ptrdiff_t>(kernel.size() / 2);
    const auto n = static_cast<std::ptrdiff_t>(series.size());

    UniformSeries out = series;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        Vec3 acc{};
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(kernel.size()); ++k) {
            const std::ptrdiff_t j = std::clamp<std::ptrdiff_t>(i + k - half, 0, n - 1);
            for (std::size_t axis = 0; axis < 3; ++axis) {
                acc[axis] += kernel[static_cast<std::size_t>(k)] * series.values[static_cast<std::size_t>(j)][axis];
            }
        }
        out.values[static_cast<std::size_t>(i)] = acc;
    }
    return out;
}

inline bool is_power_of_two(std::size_t n) {
    return n != 0 && (n & (n - 1)) == 0;
}

inline std::size_t window_stride(std::size_t size, double overlap_fraction) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(static_cast<double>(size) * (1.0 - overlap_fraction))));
}

/// Cuts a series into fixed-size windows. Trailing partial windows and
/// windows spanning a label change are dropped.
inline std::vector<Window> make_windows(const UniformSeries& series, std::size_t size = kWindowSize,
                                        double overlap_fraction = 0.0, std::size_t stream_id = 0) {
    require(size >= 2 && is_power_of_two(size), "invalid_argument", "window size must be a power of two >= 2");
    require(overlap_fraction >= 0.0 && overlap_fraction < 1.0, "invalid_argument",
            "overlap_fraction must lie in [0, 1)");
    const std::size_t stride = window_stride(size, overlap_fraction);

    std::vector<Window> windows;
    for (std::size_t start = 0; start + size <= series.size(); start += stride) {
        const Label label = series.labels[start];
        bool pure = true;
        for (std::size_t i = start + 1; i < start + size; ++i) {
            if (series.labels[i] != label) {
                pure = false;
                break;
            }
        }
        if (!pure) {
            continue;
        }
        Window w;
        w.samples.assign(series.values.begin() + static_cast<std::ptrdiff_t>(start),
                         series.values.begin() + static_cast<std::ptrdiff_t>(start + size));
        w.label = label;
        w.stream_id = stream_id;
        w.start_index = start;
        windows.push_back(std::move(w));
    }
    return windows;
}

// Raw stream CSV: header `timestamp_s,ax_g,ay_g,az_g,label`.

inline constexpr std::string_view kRawHeader = "timestamp_s,ax_g,ay_g,az_g,label";

inline void write_raw_stream(std::ostream& out, std::span<const RawSample> samples) {
    out << kRawHeader << '\n';
    for (const auto& s : samples) {
        out << format_double(s.timestamp) << ',' << format_double(s.accel[0]) << ','
            << format_double(s.accel[1]) << ',' << format_double(s.accel[2]) << ','
            << activity_name(s.label) << '\n';
    }
}

inline std::vector<RawSample> read_raw_stream(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "parse_error", "raw stream: missing header");
    require(trim(line) == kRawHeader, "parse_error", "raw stream: unexpected header '" + line + "'");

    std::vector<RawSample> samples;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split(trim(line), ',');
        require(fields.size() == 5, "parse_error",
                "raw stream: expected 5 fields on line " + std::to_string(line_no));
        RawSample s;
        try {
            s.timestamp = parse_double(fields[0]);
            for (std::size_t axis = 0; axis < 3; ++axis) {
                s.accel[axis] = parse_double(fields[axis + 1]);
            }
        } catch (const Error& e) {
            throw Error("parse_error", "raw stream line " + std::to_string(line_no) + ": " + e.what());
        }
        const auto label = parse_activity(trim(fields[4]));
        require(label.has_value(), "parse_error",
                "raw stream: unknown label on line " + std::to_string(line_no));
        s.label = *label;
        samples.push_back(s);
    }
    return samples;
}

}  // namespace har
