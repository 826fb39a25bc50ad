// har: command-line front end for the activity-recognition pipeline.
//
// Errors are reported on stderr as a single line `error: <kind>: <message>`
// with exit status 1 (2 for usage errors).

#include <har/har.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace har;

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string out_dir = "out";
};

Config load_config(const Globals& g) {
    Config config;
    if (!g.config_path.empty()) {
        auto in = open_input(g.config_path);
        parse_config(in, config);
    }
    if (g.seed) {
        config.seed = *g.seed;
    }
    return config;
}

Dataset read_features(const std::string& path) {
    auto in = open_input(path);
    return dataset_from_table(read_feature_table(in), path);
}

/// The feature file if one is given, otherwise freshly synthesized data.
Dataset dataset_for(const std::string& features, const Config& config) {
    if (!features.empty()) {
        return read_features(features);
    }
    return featurize(generate_synthetic(config.synth_spec()), config.signal,
                     "synthetic seed=" + std::to_string(config.seed));
}

void write_features(const fs::path& path, const Dataset& data) {
    write_with(path, [&](std::ostream& out) { write_feature_table(out, data.feature_names, data.features, data.labels); });
}

void write_kv(const fs::path& path, const KvDocument& doc) {
    write_with(path, [&](std::ostream& out) { doc.write(out); });
}

std::string cell_name(ClassifierKind kind, FeatureSpace space) {
    return std::string(to_string(kind)) + "_" + std::string(to_string(space));
}

SpaceConfig space_config(const Config& config, FeatureSpace space) {
    return config.experiment().space(space);
}

// --- subcommands -----------------------------------------------------------

void cmd_synth(const Globals& g, double duration) {
    Config config = load_config(g);
    if (duration > 0.0) {
        config.synth.duration = duration;
    }
    const auto streams = generate_synthetic(config.synth_spec());
    for (std::size_t c = 0; c < streams.size(); ++c) {
        const fs::path path = fs::path(g.out_dir) / ("raw_" + std::string(activity_name(static_cast<Label>(c))) + ".csv");
        write_with(path, [&](std::ostream& out) { write_raw_stream(out, streams[c]); });
        std::cout << path.string() << '\n';
    }
}

void cmd_features(const Globals& g, const std::vector<std::string>& raw_files) {
    const Config config = load_config(g);
    std::vector<std::vector<RawSample>> streams;
    for (const auto& f : raw_files) {
        auto in = open_input(f);
        streams.push_back(read_raw_stream(in));
    }
    const Dataset data = featurize(streams, config.signal);
    require(data.size() > 0, "invalid_argument", "no labeled windows in the input streams");
    const fs::path dir(g.out_dir);
    write_features(dir / "features.csv", data);
    const auto [train, test] = split_dataset(data, config.train_fraction, config.seed);
    write_features(dir / "train.csv", train);
    write_features(dir / "test.csv", test);
    std::cout << "windows=" << data.size() << " train=" << train.size() << " test=" << test.size() << '\n';
}

void cmd_train(const Globals& g, const std::string& features, const std::string& classifier,
               const std::string& space, std::string output) {
    const Config config = load_config(g);
    const auto kind = parse_classifier_kind(classifier);
    const auto fspace = parse_feature_space(space);
    const Dataset data = read_features(features);
    const Pipeline pipeline = train_pipeline(data.labeled(), config.spec(kind), space_config(config, fspace));
    if (output.empty()) {
        output = (fs::path(g.out_dir) / ("model_" + cell_name(kind, fspace) + ".kv")).string();
    }
    write_kv(output, save_pipeline(pipeline));
    std::cout << output << " dim=" << pipeline.transform.output_dim() << '\n';
}

void cmd_eval(const Globals& g, const std::string& model_path, const std::string& features, std::string output) {
    auto in = open_input(model_path);
    const Pipeline pipeline = load_pipeline(KvDocument::read(in));
    const Dataset data = read_features(features);
    EvalReport report = evaluate(pipeline, data.labeled());
    report.config = {{"model", model_path}, {"features", features}};
    if (output.empty()) {
        output = (fs::path(g.out_dir) / ("report_" + fs::path(model_path).stem().string() + ".kv")).string();
    }
    write_kv(output, save_report(report));
    std::cout << "rate=" << format_double(report.rate) << '\n';
}

void cmd_reduce(const Globals& g, FeatureSpace space, const std::string& features, const std::string& classifier,
                std::size_t size) {
    Config config = load_config(g);
    if (size > 0) {
        (space == FeatureSpace::lda ? config.lda_components : config.sfs_target) = size;
    }
    const Dataset data = read_features(features);
    const auto spec = config.spec(parse_classifier_kind(classifier));
    const FeatureTransform t = fit_transform(data.labeled(), space_config(config, space), spec);

    KvDocument doc;
    save(doc, "", t);
    const std::string stem = space == FeatureSpace::lda ? "lda" : "sfs_" + classifier;
    write_kv(fs::path(g.out_dir) / (stem + ".kv"), doc);

    Dataset reduced;
    reduced.features = t.apply(data.features);
    reduced.labels = data.labels;
    for (std::size_t j = 0; j < t.output_dim(); ++j) {
        reduced.feature_names.push_back(t.subset ? data.feature_names[t.subset->indices[j]] : "ld" + std::to_string(j + 1));
    }
    write_features(fs::path(g.out_dir) / (stem + "_features.csv"), reduced);

    if (t.subset) {
        for (std::size_t j = 0; j < t.subset->indices.size(); ++j) {
            std::cout << data.feature_names[t.subset->indices[j]] << ' ' << format_double(t.subset->scores[j]) << '\n';
        }
    } else {
        for (double v : t.lda->eigenvalues) {
            std::cout << format_double(v) << '\n';
        }
    }
}

void cmd_passive(const Globals& g, const std::string& features) {
    const Config config = load_config(g);
    const Dataset data = dataset_for(features, config);
    const auto [train, test] = split_dataset(data, config.train_fraction, config.seed);
    const auto cells = run_passive_experiment(train.labeled(), test.labeled(), config.experiment());

    const fs::path dir = fs::path(g.out_dir) / "passive";
    write_with(dir / "config.ini", [&](std::ostream& out) { write_config(out, config); });
    for (const auto& c : cells) {
        const auto name = cell_name(c.classifier, c.space);
        if (!c.error.empty()) {
            std::cerr << "warning: cell " << name << " failed: " << c.error << '\n';
            continue;
        }
        write_kv(dir / ("report_" + name + ".kv"), save_report(c.report));
        write_kv(dir / ("model_" + name + ".kv"), save_pipeline(*c.pipeline));
    }
    write_with(dir / "summary.csv", [&](std::ostream& out) { write_passive_summary(out, cells); });
    write_passive_summary(std::cout, cells);
}

struct ActiveOverrides {
    std::string classifier;
    std::string space;
    std::size_t rounds = 0;
    std::size_t runs = 0;
    double epsilon = -1.0;
};

void cmd_active(const Globals& g, const std::string& features, const ActiveOverrides& o) {
    Config config = load_config(g);
    if (!o.classifier.empty()) {
        config.active.classifier = parse_classifier_kind(o.classifier);
    }
    if (!o.space.empty()) {
        config.active.space = parse_feature_space(o.space);
    }
    if (o.rounds > 0) {
        config.active.rounds = o.rounds;
    }
    if (o.runs > 0) {
        config.active.runs = o.runs;
    }
    if (o.epsilon >= 0.0) {
        config.active.epsilon = o.epsilon;
    }
    const Dataset data = dataset_for(features, config);

    ActiveConfig ac;
    ac.rounds = config.active.rounds;
    ac.runs = config.active.runs;
    ac.seeds_per_class = config.active.seeds_per_class;
    ac.test_fraction = config.active.test_fraction;
    ac.master_seed = config.seed;
    ac.space = space_config(config, config.active.space);
    const auto spec = config.spec(config.active.classifier);

    QueryStrategy uncertainty;
    uncertainty.epsilon = config.active.epsilon;
    QueryStrategy random;
    random.kind = QueryKind::random;
    const auto active_curve = run_active_learning(data.labeled(), spec, uncertainty, ac);
    const auto random_curve = run_active_learning(data.labeled(), spec, random, ac);

    const std::string name = cell_name(config.active.classifier, config.active.space);
    const fs::path dir = fs::path(g.out_dir) / "active";
    write_with(dir / "config.ini", [&](std::ostream& out) { write_config(out, config); });
    for (const auto& [label, curve] : {std::pair{"uncertainty", &active_curve}, std::pair{"random", &random_curve}}) {
        write_with(dir / ("curve_" + name + "_" + label + ".csv"),
                   [&](std::ostream& out) { write_curve_summary(out, *curve); });
        write_with(dir / ("runs_" + name + "_" + label + ".csv"),
                   [&](std::ostream& out) { write_curve_long(out, *curve); });
        for (const auto& w : curve->warnings) {
            std::cerr << "warning: " << label << ": " << w << '\n';
        }
    }
    const std::vector<NamedSeries> series = {{"uncertainty", active_curve.mean}, {"random", random_curve.mean}};
    write_with(dir / ("curve_" + name + ".svg"), [&](std::ostream& out) { write_curves_svg(out, series, name); });
    std::cout << "rounds=" << active_curve.rounds << " final_uncertainty=" << format_double(active_curve.mean.back())
              << " final_random=" << format_double(random_curve.mean.back()) << '\n';
}

void cmd_report(const Globals& g, const std::vector<std::string>& curves, const std::string& title) {
    std::vector<NamedSeries> series;
    std::ostringstream table;
    table << "curve,rounds,first,final,mean\n";
    for (const auto& path : curves) {
        auto in = open_input(path);
        const auto s = read_curve_summary(in);
        require(!s.mean.empty(), "parse_error", "curve '" + path + "' is empty");
        double area = 0.0;
        for (double v : s.mean) {
            area += v;
        }
        const std::string name = fs::path(path).stem().string();
        table << name << ',' << s.mean.size() - 1 << ',' << format_double(s.mean.front()) << ','
              << format_double(s.mean.back()) << ',' << format_double(area / static_cast<double>(s.mean.size()))
              << '\n';
        series.push_back({name, s.mean});
    }
    const fs::path dir(g.out_dir);
    write_with(dir / "report.svg", [&](std::ostream& out) { write_curves_svg(out, series, title); });
    write_file_atomic(dir / "report.csv", table.str());
    std::cout << table.str();
}

std::string one_line(std::string text) {
    for (char& c : text) {
        if (c == '\n' || c == '\r') {
            c = ' ';
        }
    }
    return text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Smartphone activity recognition: features, classifiers, active learning"};
    app.require_subcommand(1);

    Globals g;
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config file)");
    app.add_option("--config", g.config_path, "Config file (key=value under [section] headers)");
    app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();

    double duration = 0.0;
    auto* synth = app.add_subcommand("synth", "Write synthetic raw streams, one CSV per class");
    synth->add_option("--duration", duration, "Seconds per class");

    std::vector<std::string> raw_files;
    auto* features = app.add_subcommand("features", "Raw streams to feature table plus train/test split");
    features->add_option("raw", raw_files, "Raw stream CSV files")->required()->check(CLI::ExistingFile);

    std::string features_path;
    std::string classifier = "svm";
    std::string space = "original";
    std::string output;
    auto* train = app.add_subcommand("train", "Fit a pipeline on a feature table");
    train->add_option("--features", features_path, "Feature table")->required();
    train->add_option("--classifier", classifier, "qda, knn, svm or mlp")->capture_default_str();
    train->add_option("--space", space, "original, lda or sfs")->capture_default_str();
    train->add_option("-o,--output", output, "Model file");

    std::string model_path;
    auto* eval = app.add_subcommand("eval", "Evaluate a saved pipeline on a feature table");
    eval->add_option("--model", model_path, "Model file")->required();
    eval->add_option("--features", features_path, "Feature table")->required();
    eval->add_option("-o,--output", output, "Report file");

    std::size_t size = 0;
    auto* sfs = app.add_subcommand("sfs", "Sequential forward selection");
    sfs->add_option("--features", features_path, "Feature table")->required();
    sfs->add_option("--classifier", classifier, "Wrapped classifier")->capture_default_str();
    sfs->add_option("--target", size, "Number of features to select");

    auto* lda = app.add_subcommand("lda", "Fit an LDA projection");
    lda->add_option("--features", features_path, "Feature table")->required();
    lda->add_option("--components", size, "Number of components");

    auto* passive = app.add_subcommand("passive", "Every classifier in every feature space");
    passive->add_option("--features", features_path, "Feature table (default: synthesize)");

    ActiveOverrides ao;
    auto* active = app.add_subcommand("active", "Uncertainty and random sampling learning curves");
    active->add_option("--features", features_path, "Feature table (default: synthesize)");
    active->add_option("--classifier", ao.classifier, "Classifier");
    active->add_option("--space", ao.space, "Feature space");
    active->add_option("--rounds", ao.rounds, "Queries per run");
    active->add_option("--runs", ao.runs, "Number of runs");
    active->add_option("--epsilon", ao.epsilon, "Random-query probability");

    std::vector<std::string> curves;
    std::string title = "learning curves";
    auto* report = app.add_subcommand("report", "Summarize curve files and plot them");
    report->add_option("curves", curves, "Curve summary CSV files")->required()->check(CLI::ExistingFile);
    report->add_option("--title", title, "Plot title")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::fprintf(stderr, "error: usage: %s\n", one_line(e.what()).c_str());
        return 2;
    }
    if (*seed_opt) {
        g.seed = seed;
    }

    try {
        if (*synth) {
            cmd_synth(g, duration);
        } else if (*features) {
            cmd_features(g, raw_files);
        } else if (*train) {
            cmd_train(g, features_path, classifier, space, output);
        } else if (*eval) {
            cmd_eval(g, model_path, features_path, output);
        } else if (*sfs) {
            cmd_reduce(g, FeatureSpace::sfs, features_path, classifier, size);
        } else if (*lda) {
            cmd_reduce(g, FeatureSpace::lda, features_path, "qda", size);
        } else if (*passive) {
            cmd_passive(g, features_path);
        } else if (*active) {
            cmd_active(g, features_path, ao);
        } else if (*report) {
            cmd_report(g, curves, title);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s: %s\n", e.kind().c_str(), one_line(e.what()).c_str());
        return 1;
    } catch (const fs::filesystem_error& e) {
        std::fprintf(stderr, "error: io_error: %s\n", one_line(e.what()).c_str());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: internal: %s\n", one_line(e.what()).c_str());
        return 1;
    }
    return 0;
}
