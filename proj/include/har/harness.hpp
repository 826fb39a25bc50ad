#pragma once

// Experiment harness: synthetic accelerometer generation, featurization of
// raw streams, stratified splitting, evaluation and the passive
// classifier x feature-space grid.

#include <har/features.hpp>
#include <har/model_io.hpp>
#include <har/pipeline.hpp>
#include <har/signal.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace har {

struct Dataset {
    Matrix features;
    std::vector<Label> labels;
    std::vector<std::string> feature_names;
    std::string provenance;

    std::size_t size() const { return features.rows; }

    LabeledSet labeled() const { return {features, labels, kClassCount}; }
};

// --- synthetic streams -----------------------------------------------------

struct ClassSignal {
    double fundamental = 1.0;         // Hz
    std::vector<double> harmonics;    // amplitude of harmonic h+1, g
    Vec3 axis_gain{1.0, 1.0, 1.0};    // per-axis amplitude profile
    Vec3 offset{0.0, 0.0, 1.0};       // static component (gravity), g
    double noise_std = 0.1;           // g
};

struct SynthSpec {
    std::vector<ClassSignal> classes;
    double duration = 60.0;  // seconds per class
    double rate = kDefaultRate;
    std::uint64_t seed = 42;
    // Slow sinusoidal wander of amplitude and cadence (relative depth); 0 disables.
    double amplitude_wander = 0.25;
    double frequency_wander = 0.04;
    // Fraction of interior samples dropped to mimic sensor dropouts.
    double drop_fraction = 0.01;

    void validate() const {
        require(!classes.empty() && classes.size() <= kClassCount, "invalid_argument",
                "synth: between 1 and 5 classes required");
        require(rate > 0.0 && duration > 0.0, "invalid_argument", "synth: rate and duration must be positive");
        require(amplitude_wander >= 0.0 && amplitude_wander < 1.0 && frequency_wander >= 0.0 &&
                    frequency_wander < 1.0,
                "invalid_argument", "synth: wander depths must lie in [0, 1)");
        require(drop_fraction >= 0.0 && drop_fraction < 0.5, "invalid_argument",
                "synth: drop_fraction must lie in [0, 0.5)");
        for (const auto& c : classes) {
            require(c.fundamental > 0.0, "invalid_argument", "synth: fundamental must be positive");
            const double top = c.fundamental * static_cast<double>(std::max<std::size_t>(1, c.harmonics.size())) *
                               (1.0 + frequency_wander);
            require(top < rate / 2.0, "invalid_argument", "synth: harmonics must stay below rate/2");
            require(c.noise_std >= 0.0, "invalid_argument", "synth: noise_std must be non-negative");
        }
    }
};

/// Five activity signatures with fundamentals 1.0, 1.5, 2.5, 1.8, 2.2 Hz.
inline SynthSpec default_synth_spec() {
    SynthSpec s;
    s.classes = {
        {1.0, {0.45, 0.20}, {0.35, 0.50, 0.80}, {0.05, 0.10, 0.98}, 0.30},        // walking
        {1.5, {0.35, 0.30, 0.15}, {0.55, 0.40, 0.70}, {0.05, 0.10, 0.98}, 0.30},  // limping
        {2.5, {0.80, 0.25}, {0.60, 0.80, 1.30}, {0.05, 0.10, 0.98}, 0.30},        // jogging
        {1.8, {0.40, 0.20}, {0.40, 0.45, 0.75}, {0.05, 0.10, 0.98}, 0.30},        // upstairs
        {2.2, {0.45, 0.22}, {0.45, 0.50, 0.85}, {0.05, 0.10, 0.98}, 0.30},        // downstairs
    };
    return s;
}

/// One labeled raw stream per class.
///
/// Each axis is offset + gain * m(t) * sum_h amp_h sin(2 pi h phi(t) + phase_{h,axis})
/// plus Gaussian noise, where phi integrates the (slowly wandering)
/// fundamental and m(t) is a slow amplitude envelope.
inline std::vector<std::vector<RawSample>> generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    std::vector<std::vector<RawSample>> streams;
    const auto count = static_cast<std::size_t>(std::llround(spec.duration * spec.rate));
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const auto& cls = spec.classes[c];
        Rng rng(mix_seed(spec.seed, c));
        std::vector<std::array<double, 3>> phases(cls.harmonics.size());
        for (auto& p : phases) {
            for (double& v : p) {
                v = 2.0 * M_PI * uniform01(rng);
            }
        }
        const double env_phase = 2.0 * M_PI * uniform01(rng);
        const double cad_phase = 2.0 * M_PI * uniform01(rng);
        const double env_period = 17.0 + 6.0 * uniform01(rng);
        const double cad_period = 23.0 + 8.0 * uniform01(rng);

        std::vector<RawSample> stream;
        stream.reserve(count);
        const double dt = 1.0 / spec.rate;
        double phi = 0.0;  // cycles of the fundamental
        for (std::size_t k = 0; k < count; ++k) {
            const double t = static_cast<double>(k) * dt;
            const double envelope = 1.0 + spec.amplitude_wander * std::sin(2.0 * M_PI * t / env_period + env_phase);
            RawSample s;
            s.timestamp = t;
            s.label = static_cast<Label>(c);
            for (std::size_t axis = 0; axis < 3; ++axis) {
                double v = 0.0;
                for (std::size_t h = 0; h < cls.harmonics.size(); ++h) {
                    v += cls.harmonics[h] *
                         std::sin(2.0 * M_PI * static_cast<double>(h + 1) * phi + phases[h][axis]);
                }
                s.accel[axis] = cls.offset[axis] + cls.axis_gain[axis] * envelope * v + cls.noise_std * standard_normal(rng);
                s.accel[axis] = std::clamp(s.accel[axis], -kAccelBound, kAccelBound);
            }
            const bool interior = k > 0 && k + 1 < count;
            const bool dropped = interior && spec.drop_fraction > 0.0 && uniform01(rng) < spec.drop_fraction;
            if (!dropped) {
                stream.push_back(s);
            }
            const double freq =
                cls.fundamental * (1.0 + spec.frequency_wander * std::sin(2.0 * M_PI * t / cad_period + cad_phase));
            phi += freq * dt;
        }
        streams.push_back(std::move(stream));
    }
    return streams;
}

// --- featurization ---------------------------------------------------------

struct SignalConfig {
    double rate = kDefaultRate;
    double cutoff = 25.0;
    double gap_threshold = 1.0;
    std::size_t window_size = kWindowSize;
    double overlap = 0.0;
};

/// Raw streams -> resample -> low-pass -> windows -> features. Unlabeled
/// windows are dropped since they cannot train or score a classifier.
inline Dataset featurize(std::span<const std::vector<RawSample>> streams, const SignalConfig& config,
                         std::string provenance = {}) {
    Dataset data;
    data.feature_names.assign(feature_names().begin(), feature_names().end());
    data.features = Matrix(0, kFeatureCount);
    data.provenance = std::move(provenance);
    for (std::size_t id = 0; id < streams.size(); ++id) {
        for (const auto& series : resample_uniform(streams[id], config.rate, config.gap_threshold)) {
            const auto filtered = lowpass_filter(series, config.cutoff);
            for (const auto& w : make_windows(filtered, config.window_size, config.overlap, id)) {
                if (w.label == kUnlabeled) {
                    continue;
                }
                const auto fv = extract_features(w, config.rate);
                data.features.push_row(fv.values);
                data.labels.push_back(fv.label);
            }
        }
    }
    return data;
}

inline Dataset dataset_from_table(const FeatureTable& table, std::string provenance) {
    for (Label l : table.labels) {
        require(l != kUnlabeled, "invalid_argument", "feature table contains unlabeled rows");
    }
    return {table.values, table.labels, table.names, std::move(provenance)};
}

inline Dataset subset_rows(const Dataset& data, std::span<const std::size_t> rows) {
    Dataset out;
    out.features = select_rows(data.features, rows);
    for (std::size_t r : rows) {
        out.labels.push_back(data.labels[r]);
    }
    out.feature_names = data.feature_names;
    out.provenance = data.provenance;
    return out;
}

// --- splitting and evaluation ----------------------------------------------

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Stratified split: round(train_fraction * n_c) rows of each class go to
/// training after a seeded shuffle. Index lists are returned sorted.
inline SplitIndices split_indices(std::span<const Label> labels, double train_fraction, std::uint64_t seed) {
    require(train_fraction > 0.0 && train_fraction < 1.0, "invalid_argument", "train_fraction must lie in (0, 1)");
    Rng rng(seed);
    SplitIndices split;
    for (std::size_t c = 0; c < kClassCount; ++c) {
        std::vector<std::size_t> rows;
        for (std::size_t r = 0; r < labels.size(); ++r) {
            if (static_cast<std::size_t>(labels[r]) == c) {
                rows.push_back(r);
            }
        }
        if (rows.empty()) {
            continue;
        }
        shuffle(rows, rng);
        const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(rows.size())));
        require(n_train > 0 && n_train < rows.size(), "invalid_argument",
                "split leaves class '" + std::string(activity_name(static_cast<Label>(c))) + "' empty on one side");
        split.train.insert(split.train.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
        split.test.insert(split.test.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_train), rows.end());
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.test.begin(), split.test.end());
    return split;
}

inline std::pair<Dataset, Dataset> split_dataset(const Dataset& data, double train_fraction, std::uint64_t seed) {
    const auto idx = split_indices(data.labels, train_fraction, seed);
    return {subset_rows(data, idx.train), subset_rows(data, idx.test)};
}

struct EvalReport {
    std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
    double rate = 0.0;
    std::vector<double> recall;
    std::vector<std::pair<std::string, std::string>> config;

    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& row : confusion) {
            for (std::size_t v : row) {
                n += v;
            }
        }
        return n;
    }
};

template <typename Predict>
EvalReport evaluate_with(Predict&& predict_fn, const LabeledSet& test) {
    EvalReport report;
    const std::size_t c = test.class_count;
    report.confusion.assign(c, std::vector<std::size_t>(c, 0));
    std::size_t correct = 0;
    for (std::size_t r = 0; r < test.size(); ++r) {
        const Label predicted = predict_fn(test.x.row(r));
        require(predicted >= 0 && static_cast<std::size_t>(predicted) < c, "internal", "prediction out of range");
        ++report.confusion[static_cast<std::size_t>(test.y[r])][static_cast<std::size_t>(predicted)];
        correct += predicted == test.y[r] ? 1 : 0;
    }
    report.rate = test.size() > 0 ? static_cast<double>(correct) / static_cast<double>(test.size()) : 0.0;
    report.recall.assign(c, 0.0);
    for (std::size_t i = 0; i < c; ++i) {
        std::size_t row = 0;
        for (std::size_t v : report.confusion[i]) {
            row += v;
        }
        report.recall[i] = row > 0 ? static_cast<double>(report.confusion[i][i]) / static_cast<double>(row) : 0.0;
    }
    return report;
}

inline EvalReport evaluate(const Model& model, const LabeledSet& test) {
    require(test.dim() == input_dim(model), "dimension_mismatch", "evaluate: test dimension does not match model");
    return evaluate_with([&](std::span<const double> x) { return predict(model, x); }, test);
}

inline EvalReport evaluate(const Pipeline& pipeline, const LabeledSet& test) {
    require(test.dim() == pipeline.transform.input_dim(), "dimension_mismatch",
            "evaluate: test dimension does not match pipeline");
    return evaluate_with([&](std::span<const double> x) { return pipeline.predict(x); }, test);
}

inline KvDocument save_report(const EvalReport& report) {
    KvDocument doc;
    io_detail::header(doc, "", "eval_report");
    doc.put_double("rate", report.rate);
    doc.put_size("classes", report.confusion.size());
    for (std::size_t i = 0; i < report.confusion.size(); ++i) {
        doc.put_ints<std::size_t>("confusion." + std::to_string(i), report.confusion[i]);
    }
    doc.put_vector("recall", report.recall);
    for (const auto& [k, v] : report.config) {
        doc.put("config." + k, v);
    }
    return doc;
}

inline EvalReport load_report(const KvDocument& doc, std::span<const std::string> config_keys = {}) {
    io_detail::expect_header(doc, "", "eval_report");
    EvalReport r;
    r.rate = doc.get_double("rate");
    const std::size_t c = doc.get_size("classes");
    for (std::size_t i = 0; i < c; ++i) {
        r.confusion.push_back(io_detail::to_unsigned<std::size_t>(doc.get_ints("confusion." + std::to_string(i))));
    }
    r.recall = doc.get_vector("recall");
    for (const auto& k : config_keys) {
        r.config.emplace_back(k, doc.get("config." + k));
    }
    return r;
}

// --- passive grid ----------------------------------------------------------

struct ExperimentConfig {
    std::map<ClassifierKind, ClassifierSpec> classifiers;
    std::size_t lda_components = kClassCount - 1;
    std::size_t sfs_target = 5;
    std::size_t sfs_folds = 5;
    std::uint64_t seed = 42;

    ClassifierSpec spec(ClassifierKind kind) const {
        const auto it = classifiers.find(kind);
        if (it != classifiers.end()) {
            return it->second;
        }
        ClassifierSpec s;
        s.kind = kind;
        return s;
    }

    SpaceConfig space(FeatureSpace s) const {
        SpaceConfig c;
        c.space = s;
        c.lda_components = lda_components;
        c.sfs_target = sfs_target;
        c.sfs_folds = sfs_folds;
        c.sfs_seed = seed;
        return c;
    }
};

struct PassiveCell {
    ClassifierKind classifier = ClassifierKind::qda;
    FeatureSpace space = FeatureSpace::original;
    std::optional<Pipeline> pipeline;
    EvalReport report;
    std::string error;  // non-empty when the cell failed
};

inline std::vector<std::pair<std::string, std::string>> describe(const ClassifierSpec& spec, const SpaceConfig& space,
                                                                  std::size_t dim) {
    std::vector<std::pair<std::string, std::string>> c = {
        {"classifier", std::string(to_string(spec.kind))},
        {"space", std::string(to_string(space.space))},
        {"dim", std::to_string(dim)},
    };
    switch (spec.kind) {
        case ClassifierKind::qda: break;
        case ClassifierKind::knn: c.emplace_back("k", std::to_string(spec.k)); break;
        case ClassifierKind::svm:
            c.emplace_back("sigma", spec.sigma > 0.0 ? format_double(spec.sigma) : "median");
            c.emplace_back("c_box", format_double(spec.c_box));
            break;
        case ClassifierKind::mlp:
            c.emplace_back("hidden", std::to_string(spec.mlp.hidden));
            c.emplace_back("epochs", std::to_string(spec.mlp.epochs));
            c.emplace_back("learning_rate", format_double(spec.mlp.learning_rate));
            c.emplace_back("momentum", format_double(spec.mlp.momentum));
            c.emplace_back("batch_size", std::to_string(spec.mlp.batch_size));
            c.emplace_back("mlp_seed", std::to_string(spec.mlp.seed));
            break;
    }
    if (space.space == FeatureSpace::lda) {
        c.emplace_back("lda_components", std::to_string(space.lda_components));
    } else if (space.space == FeatureSpace::sfs) {
        c.emplace_back("sfs_target", std::to_string(space.sfs_target));
        c.emplace_back("sfs_folds", std::to_string(space.sfs_folds));
        c.emplace_back("sfs_seed", std::to_string(space.sfs_seed));
    }
    return c;
}

/// Fits the transform on `train`, then the classifier in that space.
inline Pipeline train_pipeline(const LabeledSet& train, const ClassifierSpec& spec, const SpaceConfig& space) {
    FeatureTransform transform = fit_transform(train, space, spec);
    Model model = fit(spec, transform.apply(train));
    return {std::move(transform), std::move(model)};
}

/// Every classifier in every feature space. Reductions see the training
/// split only. A failing cell records its error and the grid continues.
inline std::vector<PassiveCell> run_passive_experiment(const LabeledSet& train, const LabeledSet& test,
                                                       const ExperimentConfig& config,
                                                       std::span<const ClassifierKind> classifiers = kAllClassifiers,
                                                       std::span<const FeatureSpace> spaces = kAllSpaces) {
    std::vector<PassiveCell> cells;
    for (auto kind : classifiers) {
        for (auto space : spaces) {
            PassiveCell cell;
            cell.classifier = kind;
            cell.space = space;
            const auto spec = config.spec(kind);
            const auto space_config = config.space(space);
            try {
                cell.pipeline = train_pipeline(train, spec, space_config);
                cell.report = evaluate(*cell.pipeline, test);
                cell.report.config = describe(spec, space_config, cell.pipeline->transform.output_dim());
            } catch (const Error& e) {
                cell.error = e.kind() + ": " + e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

/// Rows are classifiers, columns the three feature spaces.
inline void write_passive_summary(std::ostream& out, std::span<const PassiveCell> cells) {
    out << "classifier,original,lda,sfs\n";
    for (auto kind : kAllClassifiers) {
        bool any = false;
        std::array<std::string, 3> rates{"", "", ""};
        for (const auto& c : cells) {
            if (c.classifier != kind) {
                continue;
            }
            any = true;
            rates[static_cast<std::size_t>(c.space)] = c.error.empty() ? format_double(c.report.rate) : "error";
        }
        if (any) {
            out << to_string(kind) << ',' << rates[0] << ',' << rates[1] << ',' << rates[2] << '\n';
        }
    }
}

// --- files -----------------------------------------------------------------

/// Writes via a temporary file and rename so readers never see partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "io_error", "cannot open '" + tmp.string() + "' for writing");
        out << contents;
        out.flush();
        require(static_cast<bool>(out), "io_error", "failed writing '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer) {
    std::ostringstream buffer;
    writer(buffer);
    write_file_atomic(path, buffer.str());
}

inline std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "io_error", "cannot open '" + path.string() + "'");
    return in;
}

}  // namespace har
