#pragma once

// Experiment configuration: `key=value` lines grouped under `[section]`
// headers. Every key has a default; unknown sections or keys are errors.
//
//   [experiment] seed
//   [synth]      duration_s rate_hz noise_std amplitude_wander frequency_wander drop_fraction
//   [signal]     rate_hz cutoff_hz gap_threshold_s window_size overlap
//   [split]      train_fraction
//   [knn]        k
//   [svm]        sigma c_box                (sigma <= 0: median heuristic)
//   [mlp]        hidden epochs learning_rate momentum batch_size seed
//   [lda]        components
//   [sfs]        target_size folds
//   [active]     classifier space rounds seeds_per_class runs test_fraction epsilon

#include <har/active.hpp>
#include <har/harness.hpp>

#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>

namespace har {

struct ActiveSettings {
    ClassifierKind classifier = ClassifierKind::knn;
    FeatureSpace space = FeatureSpace::lda;
    std::size_t rounds = 300;
    std::size_t seeds_per_class = 4;
    std::size_t runs = 50;
    double test_fraction = 0.25;
    double epsilon = 0.10;
};

struct Config {
    std::uint64_t seed = 42;
    SynthSpec synth = default_synth_spec();
    SignalConfig signal;
    double train_fraction = 0.75;
    ClassifierSpec knn = make_spec(ClassifierKind::knn);
    ClassifierSpec svm = make_spec(ClassifierKind::svm);
    ClassifierSpec mlp = make_spec(ClassifierKind::mlp);
    std::size_t lda_components = kClassCount - 1;
    std::size_t sfs_target = 5;
    std::size_t sfs_folds = 5;
    ActiveSettings active;

    ClassifierSpec spec(ClassifierKind kind) const {
        switch (kind) {
            case ClassifierKind::qda: return make_spec(ClassifierKind::qda);
            case ClassifierKind::knn: return knn;
            case ClassifierKind::svm: return svm;
            case ClassifierKind::mlp: return mlp;
        }
        return {};
    }

    ExperimentConfig experiment() const {
        ExperimentConfig e;
        for (auto kind : kAllClassifiers) {
            e.classifiers[kind] = spec(kind);
        }
        e.lda_components = lda_components;
        e.sfs_target = sfs_target;
        e.sfs_folds = sfs_folds;
        e.seed = seed;
        return e;
    }

    SynthSpec synth_spec() const {
        SynthSpec s = synth;
        s.seed = seed;
        return s;
    }
};

namespace config_detail {

struct Binding {
    std::function<void(std::string_view)> set;
    std::function<std::string()> get;
};

inline std::size_t to_size(std::string_view v) {
    const long long x = parse_integer(v);
    require(x >= 0, "parse_error", "expected a non-negative integer, got '" + std::string(v) + "'");
    return static_cast<std::size_t>(x);
}

inline std::map<std::string, Binding> bindings(Config& c) {
    std::map<std::string, Binding> b;
    auto real = [&b](const std::string& key, double& field) {
        b[key] = {[&field](std::string_view v) { field = parse_double(v); }, [&field] { return format_double(field); }};
    };
    auto count = [&b](const std::string& key, std::size_t& field) {
        b[key] = {[&field](std::string_view v) { field = to_size(v); }, [&field] { return std::to_string(field); }};
    };
    auto seed = [&b](const std::string& key, std::uint64_t& field) {
        b[key] = {[&field](std::string_view v) { field = static_cast<std::uint64_t>(to_size(v)); },
                  [&field] { return std::to_string(field); }};
    };

    seed("experiment.seed", c.seed);
    real("synth.duration_s", c.synth.duration);
    real("synth.rate_hz", c.synth.rate);
    b["synth.noise_std"] = {[&c](std::string_view v) {
                                const double n = parse_double(v);
                                for (auto& cls : c.synth.classes) {
                                    cls.noise_std = n;
                                }
                            },
                            [&c] { return format_double(c.synth.classes.empty() ? 0.0 : c.synth.classes[0].noise_std); }};
    real("synth.amplitude_wander", c.synth.amplitude_wander);
    real("synth.frequency_wander", c.synth.frequency_wander);
    real("synth.drop_fraction", c.synth.drop_fraction);
    real("signal.rate_hz", c.signal.rate);
    real("signal.cutoff_hz", c.signal.cutoff);
    real("signal.gap_threshold_s", c.signal.gap_threshold);
    count("signal.window_size", c.signal.window_size);
    real("signal.overlap", c.signal.overlap);
    real("split.train_fraction", c.train_fraction);
    count("knn.k", c.knn.k);
    real("svm.sigma", c.svm.sigma);
    real("svm.c_box", c.svm.c_box);
    count("mlp.hidden", c.mlp.mlp.hidden);
    count("mlp.epochs", c.mlp.mlp.epochs);
    real("mlp.learning_rate", c.mlp.mlp.learning_rate);
    real("mlp.momentum", c.mlp.mlp.momentum);
    count("mlp.batch_size", c.mlp.mlp.batch_size);
    seed("mlp.seed", c.mlp.mlp.seed);
    count("lda.components", c.lda_components);
    count("sfs.target_size", c.sfs_target);
    count("sfs.folds", c.sfs_folds);
    b["active.classifier"] = {[&c](std::string_view v) { c.active.classifier = parse_classifier_kind(v); },
                              [&c] { return std::string(to_string(c.active.classifier)); }};
    b["active.space"] = {[&c](std::string_view v) { c.active.space = parse_feature_space(v); },
                         [&c] { return std::string(to_string(c.active.space)); }};
    count("active.rounds", c.active.rounds);
    count("active.seeds_per_class", c.active.seeds_per_class);
    count("active.runs", c.active.runs);
    real("active.test_fraction", c.active.test_fraction);
    real("active.epsilon", c.active.epsilon);
    return b;
}

}  // namespace config_detail

/// Applies the settings in `in` on top of `config`.
inline void parse_config(std::istream& in, Config& config) {
    auto b = config_detail::bindings(config);
    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = trim(line);
        if (const auto hash = t.find('#'); hash != std::string_view::npos) {
            t = trim(t.substr(0, hash));
        }
        if (t.empty()) {
            continue;
        }
        if (t.front() == '[') {
            require(t.back() == ']', "parse_error", "config line " + std::to_string(line_no) + ": bad section header");
            section = std::string(trim(t.substr(1, t.size() - 2)));
            continue;
        }
        const auto eq = t.find('=');
        require(eq != std::string_view::npos, "parse_error", "config line " + std::to_string(line_no) + ": missing '='");
        const std::string key = section + "." + std::string(trim(t.substr(0, eq)));
        const auto it = b.find(key);
        require(it != b.end(), "parse_error", "config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        try {
            it->second.set(trim(t.substr(eq + 1)));
        } catch (const Error& e) {
            throw Error("parse_error", "config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

/// Writes every key with its current value, grouped by section.
inline void write_config(std::ostream& out, const Config& config) {
    Config copy = config;
    const auto b = config_detail::bindings(copy);
    std::string section;
    for (const auto& [key, binding] : b) {
        const auto dot = key.find('.');
        const std::string s = key.substr(0, dot);
        if (s != section) {
            out << (section.empty() ? "" : "\n") << '[' << s << "]\n";
            section = s;
        }
        out << key.substr(dot + 1) << '=' << binding.get() << '\n';
    }
}

}  // namespace har
