#pragma once

// Pool-based active learning: per-classifier uncertainty measures,
// epsilon-mixed query selection, and learning-curve experiments with a
// simulated oracle that replays held-out labels.

#include <har/classifier.hpp>
#include <har/pipeline.hpp>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace har {

inline constexpr double kMinUncertaintyGap = 1e-12;

/// Shannon entropy (natural log) with 0 log 0 = 0.
inline double entropy(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) {
            h -= v * std::log(v);
        }
    }
    return std::max(0.0, h);
}

/// max over class pairs of 1 / |g_i - g_j|, gaps clamped at 1e-12.
inline double pairwise_gap_uncertainty(std::span<const double> g) {
    double u = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        for (std::size_t j = i + 1; j < g.size(); ++j) {
            u = std::max(u, 1.0 / std::max(std::abs(g[i] - g[j]), kMinUncertaintyGap));
        }
    }
    return u;
}

/// 1 / min_c |f_c|, clamped at 1e-12: closeness to any one-vs-all boundary.
inline double boundary_uncertainty(std::span<const double> decision_values) {
    double closest = std::numeric_limits<double>::infinity();
    for (double f : decision_values) {
        closest = std::min(closest, std::abs(f));
    }
    return 1.0 / std::max(closest, kMinUncertaintyGap);
}

inline double uncertainty_qda(const QdaModel& model, std::span<const double> x) {
    return pairwise_gap_uncertainty(qda_discriminants(model, x));
}

inline double uncertainty_knn(const KnnModel& model, std::span<const double> x) {
    return entropy(knn_vote_fractions(model, x));
}

inline double uncertainty_svm(const SvmOvaModel& model, std::span<const double> x) {
    return boundary_uncertainty(svm_scores(model, x));
}

inline double uncertainty_ann(const MlpModel& model, std::span<const double> x) {
    return entropy(mlp_posteriors(model, x));
}

inline double uncertainty(const Model& model, std::span<const double> x) {
    switch (kind_of(model)) {
        case ClassifierKind::qda: return pairwise_gap_uncertainty(scores(model, x));
        case ClassifierKind::knn: return entropy(scores(model, x));
        case ClassifierKind::svm: return boundary_uncertainty(scores(model, x));
        case ClassifierKind::mlp: return entropy(scores(model, x));
    }
    return 0.0;
}

enum class QueryKind { uncertainty, random };

struct QueryStrategy {
    QueryKind kind = QueryKind::uncertainty;
    double epsilon = 0.10;
};

/// Index sets over one dataset. `pool` is kept sorted ascending.
struct PoolState {
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> pool;
    std::vector<std::size_t> test;

    /// Moves a pool element into the labeled set.
    void label(std::size_t index) {
        const auto it = std::lower_bound(pool.begin(), pool.end(), index);
        require(it != pool.end() && *it == index, "invalid_argument", "index is not in the pool");
        pool.erase(it);
        labeled.push_back(index);
    }
};

/// Picks the next pool index to label.
///
/// One uniform draw is always taken first; if it falls below epsilon (or
/// the strategy is random) a uniform pool element is returned, otherwise
/// the element of maximum uncertainty under `model`, smallest index on ties.
/// `features` holds the rows in the model's input space.
inline std::size_t select_query(const PoolState& state, const Model& model, const Matrix& features,
                                const QueryStrategy& strategy, Rng& rng) {
    require(!state.pool.empty(), "invalid_argument", "select_query: pool is empty");
    require(strategy.epsilon >= 0.0 && strategy.epsilon <= 1.0, "invalid_argument",
            "select_query: epsilon must lie in [0, 1]");
    const double draw = uniform01(rng);
    if (strategy.kind == QueryKind::random || draw < strategy.epsilon) {
        return state.pool[uniform_index(rng, state.pool.size())];
    }
    std::size_t best = state.pool.front();
    double best_u = -1.0;
    for (std::size_t idx : state.pool) {
        const double u = uncertainty(model, features.row(idx));
        if (u > best_u) {
            best_u = u;
            best = idx;
        }
    }
    return best;
}

struct ActiveConfig {
    std::size_t rounds = 300;
    std::size_t seeds_per_class = 4;
    std::size_t runs = 50;
    double test_fraction = 0.25;
    std::uint64_t master_seed = 0;
    SpaceConfig space;
};

struct LearningCurve {
    std::size_t rounds = 0;
    Matrix accuracy;  // runs x (rounds + 1), column 0 before any query
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<std::string> warnings;

    void summarize() {
        mean.assign(accuracy.cols, 0.0);
        stddev.assign(accuracy.cols, 0.0);
        if (accuracy.rows == 0) {
            return;
        }
        for (std::size_t c = 0; c < accuracy.cols; ++c) {
            for (std::size_t r = 0; r < accuracy.rows; ++r) {
                mean[c] += accuracy(r, c);
            }
            mean[c] /= static_cast<double>(accuracy.rows);
            for (std::size_t r = 0; r < accuracy.rows; ++r) {
                const double d = accuracy(r, c) - mean[c];
                stddev[c] += d * d;
            }
            stddev[c] = std::sqrt(stddev[c] / static_cast<double>(accuracy.rows));
        }
    }
};

inline double accuracy_on(const Model& model, const Matrix& features, std::span<const Label> labels,
                          std::span<const std::size_t> rows) {
    if (rows.empty()) {
        return 0.0;
    }
    std::size_t correct = 0;
    for (std::size_t r : rows) {
        correct += predict(model, features.row(r)) == labels[r] ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(rows.size());
}

/// Stratified test split and per-class seeding for one run.
inline PoolState initial_pool(std::span<const Label> labels, std::size_t class_count, double test_fraction,
                              std::size_t seeds_per_class, Rng& rng) {
    PoolState state;
    for (std::size_t c = 0; c < class_count; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < labels.size(); ++r) {
            if (static_cast<std::size_t>(labels[r]) == c) {
                rows.push_back(r);
            }
        }
        shuffle(rows, rng);
        const auto test_count = static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(rows.size())));
        require(rows.size() >= test_count + seeds_per_class, "invalid_argument",
                "active learning: class " + std::to_string(c) + " has too few samples to seed");
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i < test_count) {
                state.test.push_back(rows[i]);
            } else if (i < test_count + seeds_per_class) {
                state.labeled.push_back(rows[i]);
            } else {
                state.pool.push_back(rows[i]);
            }
        }
    }
    std::sort(state.pool.begin(), state.pool.end());
    std::sort(state.test.begin(), state.test.end());
    return state;
}

/// Runs `config.runs` independent active-learning experiments and collects
/// their test-accuracy curves.
///
/// Each run derives two streams from the master seed: one for the split and
/// seeding, one for query draws. The feature-space transform is fitted on
/// the run's labeled and pool rows (never the test rows), the model is
/// refit from scratch every round.
inline LearningCurve run_active_learning(const LabeledSet& dataset, const ClassifierSpec& spec,
                                         const QueryStrategy& strategy, const ActiveConfig& config) {
    dataset.validate();
    require(config.runs >= 1, "invalid_argument", "active learning: runs must be at least 1");
    require(config.test_fraction > 0.0 && config.test_fraction < 1.0, "invalid_argument",
            "active learning: test_fraction must lie in (0, 1)");

    LearningCurve curve;
    curve.rounds = config.rounds;
    std::vector<std::vector<double>> per_run(config.runs);

    for (std::size_t run = 0; run < config.runs; ++run) {
        const std::uint64_t run_seed = mix_seed(config.master_seed, run);
        Rng split_rng(mix_seed(run_seed, 0));
        Rng query_rng(mix_seed(run_seed, 1));

        PoolState state = initial_pool(dataset.y, dataset.class_count, config.test_fraction,
                                       config.seeds_per_class, split_rng);

        std::vector<std::size_t> fit_rows = state.labeled;
        fit_rows.insert(fit_rows.end(), state.pool.begin(), state.pool.end());
        std::sort(fit_rows.begin(), fit_rows.end());
        SpaceConfig space = config.space;
        space.sfs_seed = mix_seed(run_seed, 2);
        const FeatureTransform transform = fit_transform(dataset.subset(fit_rows), space, spec);
        const Matrix features = transform.apply(dataset.x);

        std::size_t rounds = config.rounds;
        if (rounds > state.pool.size()) {
            curve.warnings.push_back("run " + std::to_string(run) + ": rounds truncated from " +
                                     std::to_string(rounds) + " to pool size " + std::to_string(state.pool.size()));
            rounds = state.pool.size();
        }

        auto& acc = per_run[run];
        for (std::size_t round = 0; round <= rounds; ++round) {
            LabeledSet labeled{select_rows(features, state.labeled), {}, dataset.class_count};
            for (std::size_t r : state.labeled) {
                labeled.y.push_back(dataset.y[r]);
            }
            const Model model = fit(spec, labeled);
            acc.push_back(accuracy_on(model, features, dataset.y, state.test));
            if (round == rounds) {
                break;
            }
            state.label(select_query(state, model, features, strategy, query_rng));
        }
    }

    std::size_t width = 0;
    for (const auto& r : per_run) {
        width = std::max(width, r.size());
    }
    curve.rounds = width - 1;
    curve.accuracy = Matrix(config.runs, width);
    for (std::size_t run = 0; run < config.runs; ++run) {
        for (std::size_t c = 0; c < width; ++c) {
            // Truncated runs hold their final value.
            curve.accuracy(run, c) = per_run[run][std::min(c, per_run[run].size() - 1)];
        }
    }
    curve.summarize();
    return curve;
}

// Curve files: `round,mean_accuracy,std_accuracy` and the long form
// `run,round,accuracy`.

inline void write_curve_summary(std::ostream& out, const LearningCurve& curve) {
    out << "round,mean_accuracy,std_accuracy\n";
    for (std::size_t c = 0; c < curve.mean.size(); ++c) {
        out << c << ',' << format_double(curve.mean[c]) << ',' << format_double(curve.stddev[c]) << '\n';
    }
}

inline void write_curve_long(std::ostream& out, const LearningCurve& curve) {
    out << "run,round,accuracy\n";
    for (std::size_t r = 0; r < curve.accuracy.rows; ++r) {
        for (std::size_t c = 0; c < curve.accuracy.cols; ++c) {
            out << r << ',' << c << ',' << format_double(curve.accuracy(r, c)) << '\n';
        }
    }
}

struct CurveSummary {
    std::vector<double> mean;
    std::vector<double> stddev;
};

inline CurveSummary read_curve_summary(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && trim(line) == "round,mean_accuracy,std_accuracy",
            "parse_error", "curve summary: unexpected header");
    CurveSummary s;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        const auto f = split(trim(line), ',');
        require(f.size() == 3, "parse_error", "curve summary: expected 3 fields");
        require(static_cast<std::size_t>(parse_integer(f[0])) == s.mean.size(), "parse_error",
                "curve summary: rounds must be consecutive from 0");
        s.mean.push_back(parse_double(f[1]));
        s.stddev.push_back(parse_double(f[2]));
    }
    return s;
}

inline LearningCurve read_curve_long(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && trim(line) == "run,round,accuracy", "parse_error",
            "curve file: unexpected header");
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        const auto f = split(trim(line), ',');
        require(f.size() == 3, "parse_error", "curve file: expected 3 fields");
        const auto run = static_cast<std::size_t>(parse_integer(f[0]));
        const auto round = static_cast<std::size_t>(parse_integer(f[1]));
        if (run >= rows.size()) {
            rows.resize(run + 1);
        }
        require(round == rows[run].size(), "parse_error", "curve file: rounds must be consecutive");
        rows[run].push_back(parse_double(f[2]));
    }
    LearningCurve curve;
    if (rows.empty()) {
        return curve;
    }
    curve.accuracy = Matrix(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        require(rows[r].size() == curve.accuracy.cols, "parse_error", "curve file: ragged runs");
        std::copy(rows[r].begin(), rows[r].end(), curve.accuracy.row(r).begin());
    }
    curve.rounds = curve.accuracy.cols - 1;
    curve.summarize();
    return curve;
}

struct NamedSeries {
    std::string name;
    std::vector<double> values;
};

inline std::string xml_escape(std::string_view text) {
    std::string out;
    for (char ch : text) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

/// Minimal SVG line chart of accuracy (y, 0..1) against round (x).
inline void write_curves_svg(std::ostream& out, std::span<const NamedSeries> series, std::string_view title) {
    constexpr double width = 640.0;
    constexpr double height = 400.0;
    constexpr double margin = 50.0;
    static constexpr std::array<std::string_view, 6> colors = {"#1f77b4", "#d62728", "#2ca02c",
                                                               "#ff7f0e", "#9467bd", "#8c564b"};
    std::size_t longest = 2;
    for (const auto& s : series) {
        longest = std::max(longest, s.values.size());
    }
    const double x_scale = (width - 2 * margin) / static_cast<double>(longest - 1);
    const double y_scale = height - 2 * margin;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" << xml_escape(title)
        << "</text>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\"" << width - margin << "\" y2=\""
        << height - margin << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double y = height - margin - y_scale * tick / 4.0;
        out << "<text x=\"" << margin - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\" font-size=\"10\">"
            << tick * 0.25 << "</text>\n";
    }
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
        << "\" text-anchor=\"middle\" font-size=\"11\">queries</text>\n";
    out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
        << "\" text-anchor=\"end\" font-size=\"10\">" << longest - 1 << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto color = colors[i % colors.size()];
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t k = 0; k < series[i].values.size(); ++k) {
            const double x = margin + x_scale * static_cast<double>(k);
            const double y = height - margin - y_scale * std::clamp(series[i].values[k], 0.0, 1.0);
            out << format_double(std::round(x * 100) / 100) << ',' << format_double(std::round(y * 100) / 100)
                << ' ';
        }
        out << "\"/>\n";
        out << "<text x=\"" << width - margin - 4 << "\" y=\"" << margin + 16 * static_cast<double>(i + 1)
            << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << xml_escape(series[i].name)
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace har
