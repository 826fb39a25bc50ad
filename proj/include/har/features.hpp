#pragma once

// Time- and frequency-domain window features (31 per window).

#include <har/core.hpp>
#include <har/signal.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace har {

inline constexpr std::size_t kFeatureCount = 31;

/// Canonical feature order: per-axis statistics (x, y, z), the three
/// pairwise correlations, the mean resultant magnitude, then per-axis
/// spectral features (x, y, z).
inline const std::array<std::string, kFeatureCount>& feature_names() {
    static const std::array<std::string, kFeatureCount> names = [] {
        std::array<std::string, kFeatureCount> n;
        std::size_t i = 0;
        for (const char* axis : {"x", "y", "z"}) {
            for (const char* stat : {"var", "mean", "median", "p25", "p75"}) {
                n[i++] = std::string(stat) + "_" + axis;
            }
        }
        n[i++] = "corr_xy";
        n[i++] = "corr_xz";
        n[i++] = "corr_yz";
        n[i++] = "resultant_mean";
        for (const char* axis : {"x", "y", "z"}) {
            for (const char* stat : {"energy", "entropy", "centroid", "peak"}) {
                n[i++] = std::string(stat) + "_" + axis;
            }
        }
        return n;
    }();
    return names;
}

// Offsets into the feature vector.
namespace feature_index {
inline constexpr std::size_t kStatsPerAxis = 5;
inline constexpr std::size_t kCorrelations = 15;
inline constexpr std::size_t kResultant = 18;
inline constexpr std::size_t kSpectral = 19;
inline constexpr std::size_t kSpectralPerAxis = 4;

constexpr std::size_t variance(std::size_t axis) { return axis * kStatsPerAxis; }
constexpr std::size_t mean(std::size_t axis) { return axis * kStatsPerAxis + 1; }
constexpr std::size_t median(std::size_t axis) { return axis * kStatsPerAxis + 2; }
constexpr std::size_t p25(std::size_t axis) { return axis * kStatsPerAxis + 3; }
constexpr std::size_t p75(std::size_t axis) { return axis * kStatsPerAxis + 4; }
constexpr std::size_t energy(std::size_t axis) { return kSpectral + axis * kSpectralPerAxis; }
constexpr std::size_t entropy(std::size_t axis) { return kSpectral + axis * kSpectralPerAxis + 1; }
constexpr std::size_t centroid(std::size_t axis) { return kSpectral + axis * kSpectralPerAxis + 2; }
constexpr std::size_t peak(std::size_t axis) { return kSpectral + axis * kSpectralPerAxis + 3; }
}  // namespace feature_index

struct FeatureVector {
    std::array<double, kFeatureCount> values{};
    Label label = kUnlabeled;
};

/// In-place iterative radix-2 Cooley-Tukey FFT.
inline void fft(std::vector<std::complex<double>>& data) {
    const std::size_t n = data.size();
    require(is_power_of_two(n), "invalid_argument", "FFT length must be a power of two");

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(data[i], data[j]);
        }
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = -2.0 * M_PI / static_cast<double>(len);
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                // Twiddles from std::polar directly; a running product drifts at n = 256.
                const std::complex<double> w = std::polar(1.0, angle * static_cast<double>(k));
                const auto u = data[start + k];
                const auto v = data[start + k + len / 2] * w;
                data[start + k] = u + v;
                data[start + k + len / 2] = u - v;
            }
        }
    }
}

struct Spectrum {
    std::vector<double> bin_freqs;  // bins 1..size/2
    std::vector<double> power;
};

/// Power spectrum of a mean-removed window axis, DC excluded.
inline Spectrum power_spectrum(std::span<const double> samples, double rate) {
    const std::size_t n = samples.size();
    require(is_power_of_two(n) && n >= 2, "invalid_argument", "window length must be a power of two");
    double mean = 0.0;
    for (double v : samples) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    if (std::all_of(samples.begin(), samples.end(), [&](double v) { return v == samples[0]; })) {
        mean = samples[0];  // exact, so a constant axis has exactly zero power
    }

    std::vector<std::complex<double>> buffer(n);
    for (std::size_t i = 0; i < n; ++i) {
        buffer[i] = samples[i] - mean;
    }
    fft(buffer);

    Spectrum s;
    s.bin_freqs.resize(n / 2);
    s.power.resize(n / 2);
    for (std::size_t i = 1; i <= n / 2; ++i) {
        s.bin_freqs[i - 1] = static_cast<double>(i) * rate / static_cast<double>(n);
        s.power[i - 1] = std::norm(buffer[i]);
    }
    return s;
}

namespace detail {

/// Linear interpolation between order statistics at position p*(n-1).
inline double percentile_sorted(std::span<const double> sorted, double p) {
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

inline double pearson(std::span<const double> a, double mean_a, double var_a, std::span<const double> b,
                      double mean_b, double var_b) {
    if (var_a <= 0.0 || var_b <= 0.0) {
        return 0.0;
    }
    double cov = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        cov += (a[i] - mean_a) * (b[i] - mean_b);
    }
    cov /= static_cast<double>(a.size());
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

}  // namespace detail

/// Computes the 31 features of one window.
///
/// Degenerate windows follow fixed conventions instead of producing NaN:
/// zero-variance axes give correlation 0, zero spectral power gives
/// entropy 0 and puts centroid and peak at the lowest non-DC bin.
inline FeatureVector extract_features(const Window& window, double rate = kDefaultRate) {
    const std::size_t n = window.samples.size();
    require(n >= 2 && is_power_of_two(n), "invalid_argument", "window length must be a power of two");

    std::array<std::vector<double>, 3> axes;
    for (auto& a : axes) {
        a.resize(n);
    }
    double resultant = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const auto& s = window.samples[t];
        for (std::size_t axis = 0; axis < 3; ++axis) {
            axes[axis][t] = s[axis];
        }
        resultant += std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    }

    FeatureVector fv;
    fv.label = window.label;
    std::array<double, 3> means{};
    std::array<double, 3> variances{};

    for (std::size_t axis = 0; axis < 3; ++axis) {
        const auto& a = axes[axis];
        double mean = 0.0;
        for (double v : a) {
            mean += v;
        }
        mean /= static_cast<double>(n);
        if (std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; })) {
            mean = a[0];
        }
        double var = 0.0;
        for (double v : a) {
            var += (v - mean) * (v - mean);
        }
        var /= static_cast<double>(n);

        std::vector<double> sorted = a;
        std::sort(sorted.begin(), sorted.end());

        means[axis] = mean;
        variances[axis] = var;
        fv.values[feature_index::variance(axis)] = var;
        fv.values[feature_index::mean(axis)] = mean;
        fv.values[feature_index::median(axis)] = detail::percentile_sorted(sorted, 0.5);
        fv.values[feature_index::p25(axis)] = detail::percentile_sorted(sorted, 0.25);
        fv.values[feature_index::p75(axis)] = detail::percentile_sorted(sorted, 0.75);
    }

    fv.values[feature_index::kCorrelations + 0] =
        detail::pearson(axes[0], means[0], variances[0], axes[1], means[1], variances[1]);
    fv.values[feature_index::kCorrelations + 1] =
        detail::pearson(axes[0], means[0], variances[0], axes[2], means[2], variances[2]);
    fv.values[feature_index::kCorrelations + 2] =
        detail::pearson(axes[1], means[1], variances[1], axes[2], means[2], variances[2]);
    fv.values[feature_index::kResultant] = resultant / static_cast<double>(n);

    for (std::size_t axis = 0; axis < 3; ++axis) {
        const Spectrum spectrum = power_spectrum(axes[axis], rate);
        const std::size_t bins = spectrum.power.size();
        double total = 0.0;
        double weighted = 0.0;
        std::size_t argmax = 0;
        for (std::size_t i = 0; i < bins; ++i) {
            total += spectrum.power[i];
            weighted += spectrum.bin_freqs[i] * spectrum.power[i];
            if (spectrum.power[i] > spectrum.power[argmax]) {
                argmax = i;
            }
        }
        double entropy = 0.0;
        double centroid = spectrum.bin_freqs[0];
        if (total > 0.0) {
            for (double p : spectrum.power) {
                const double q = p / total;
                if (q > 0.0) {
                    entropy -= q * std::log(q);
                }
            }
            centroid = weighted / total;
        }
        fv.values[feature_index::energy(axis)] = total / static_cast<double>(bins);
        fv.values[feature_index::entropy(axis)] = entropy;
        fv.values[feature_index::centroid(axis)] = centroid;
        fv.values[feature_index::peak(axis)] = spectrum.bin_freqs[argmax];
    }
    return fv;
}

/// Per-feature z-score statistics fitted on a training set.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    std::vector<double> apply(std::span<const double> x) const {
        require(x.size() == mean.size(), "dimension_mismatch", "standardizer: dimension mismatch");
        std::vector<double> out(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) {
            out[j] = stddev[j] > 0.0 ? (x[j] - mean[j]) / stddev[j] : 0.0;
        }
        return out;
    }

    Matrix apply(const Matrix& m) const {
        Matrix out(m.rows, m.cols);
        for (std::size_t r = 0; r < m.rows; ++r) {
            const auto z = apply(m.row(r));
            std::copy(z.begin(), z.end(), out.row(r).begin());
        }
        return out;
    }
};

/// Population mean/std per column; zero-variance columns map to 0.
inline Standardizer fit_standardizer(const Matrix& m) {
    require(m.rows >= 2, "invalid_argument", "standardize needs at least 2 vectors");
    Standardizer s;
    s.mean.assign(m.cols, 0.0);
    s.stddev.assign(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            s.mean[c] += m(r, c);
        }
    }
    for (double& v : s.mean) {
        v /= static_cast<double>(m.rows);
    }
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            const double d = m(r, c) - s.mean[c];
            s.stddev[c] += d * d;
        }
    }
    for (double& v : s.stddev) {
        v = std::sqrt(v / static_cast<double>(m.rows));
    }
    return s;
}

inline std::pair<Matrix, Standardizer> standardize(const Matrix& m) {
    Standardizer s = fit_standardizer(m);
    return {s.apply(m), std::move(s)};
}

// Feature CSV: header of the feature names followed by `label`.

inline void write_feature_table(std::ostream& out, std::span<const std::string> names, const Matrix& values,
                                std::span<const Label> labels) {
    require(values.rows == labels.size() && values.cols == names.size(), "dimension_mismatch",
            "feature table: shape mismatch");
    for (const auto& n : names) {
        out << n << ',';
    }
    out << "label\n";
    for (std::size_t r = 0; r < values.rows; ++r) {
        for (std::size_t c = 0; c < values.cols; ++c) {
            out << format_double(values(r, c)) << ',';
        }
        out << activity_name(labels[r]) << '\n';
    }
}

struct FeatureTable {
    std::vector<std::string> names;
    Matrix values;
    std::vector<Label> labels;
};

inline FeatureTable read_feature_table(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "parse_error", "feature table: missing header");
    auto header = split(trim(line), ',');
    require(header.size() >= 2 && header.back() == "label", "parse_error",
            "feature table: header must end with 'label'");
    FeatureTable table;
    for (std::size_t i = 0; i + 1 < header.size(); ++i) {
        table.names.emplace_back(header[i]);
    }
    table.values = Matrix(0, table.names.size());
    std::size_t line_no = 1;
    std::vector<double> row(table.names.size());
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split(trim(line), ',');
        require(fields.size() == header.size(), "parse_error",
                "feature table: wrong field count on line " + std::to_string(line_no));
        for (std::size_t c = 0; c < row.size(); ++c) {
            row[c] = parse_double(fields[c]);
        }
        const auto label = parse_activity(trim(fields.back()));
        require(label.has_value(), "parse_error", "feature table: unknown label on line " + std::to_string(line_no));
        table.values.push_row(row);
        table.labels.push_back(*label);
    }
    return table;
}

}  // namespace har
