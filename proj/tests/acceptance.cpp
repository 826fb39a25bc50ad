// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <har/har.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace har;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) {
                detail += "; ";
            }
            detail += what;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

LabeledSet gaussian_classes(std::size_t classes, std::size_t per_class, std::size_t d, Rng& rng) {
    LabeledSet s;
    s.class_count = classes;
    s.x = Matrix(0, d);
    std::vector<std::vector<double>> centres(classes, std::vector<double>(d));
    for (auto& c : centres) {
        for (double& v : c) {
            v = 2.0 * standard_normal(rng);
        }
    }
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> row(d);
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = centres[c][j] + (0.5 + uniform01(rng)) * standard_normal(rng);
            }
            s.x.push_row(row);
            s.y.push_back(static_cast<Label>(c));
        }
    }
    return s;
}

// 1 -------------------------------------------------------------------------
Outcome fft_oracle() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    Rng rng(1);
    double worst = 0.0;
    double worst_parseval = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(256);
        for (double& v : x) {
            v = standard_normal(rng);
        }
        std::vector<std::complex<double>> buffer(x.begin(), x.end());
        fft(buffer);
        const auto expected = oracle::naive_dft(x);
        for (std::size_t k = 0; k < 256; ++k) {
            worst = std::max(worst, std::abs(buffer[k].real() - expected[k].real()));
            worst = std::max(worst, std::abs(buffer[k].imag() - expected[k].imag()));
        }
        const double m = oracle::mean(x);
        std::vector<std::complex<double>> centred(256);
        double time_energy = 0.0;
        for (std::size_t i = 0; i < 256; ++i) {
            centred[i] = x[i] - m;
            time_energy += (x[i] - m) * (x[i] - m);
        }
        fft(centred);
        double freq_energy = 0.0;
        for (const auto& c : centred) {
            freq_energy += std::norm(c);
        }
        worst_parseval = std::max(worst_parseval, std::abs(freq_energy / 256.0 - time_energy) / time_energy);
    }
    const double elapsed = seconds_since(start);
    o.check(worst <= 1e-9, "max |fft - dft| = " + fmt(worst));
    o.check(worst_parseval <= 1e-6, "parseval rel error = " + fmt(worst_parseval));
    o.check(elapsed < 5.0, "runtime " + fmt(elapsed) + " s");
    if (o.pass) {
        o.detail = "max abs error " + fmt(worst) + ", parseval " + fmt(worst_parseval) + ", " + fmt(elapsed) + " s";
    }
    return o;
}

// 2 -------------------------------------------------------------------------
Outcome feature_oracle() {
    Outcome o;
    Rng rng(2);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        Window w;
        const double scale = 0.1 + 2.0 * uniform01(rng);
        for (std::size_t t = 0; t < 256; ++t) {
            w.samples.push_back({scale * standard_normal(rng), 0.5 * standard_normal(rng),
                                 1.0 + 0.2 * standard_normal(rng)});
        }
        const auto got = extract_features(w, 50.0).values;
        const auto want = oracle::features(w.samples, 50.0);
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
            worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(1.0, std::abs(want[i])));
        }
    }
    o.check(worst <= 1e-9, "max feature error " + fmt(worst));

    bool conventions = true;
    for (double c : {0.3, 1.0, 2.5}) {
        Window w;
        w.samples.assign(256, Vec3{c, c, c});
        const auto f = extract_features(w, 50.0).values;
        for (std::size_t a = 0; a < 3; ++a) {
            conventions = conventions && f[feature_index::variance(a)] == 0.0 && f[feature_index::energy(a)] == 0.0 &&
                          f[feature_index::entropy(a)] == 0.0;
        }
        for (std::size_t k = 0; k < 3; ++k) {
            conventions = conventions && f[feature_index::kCorrelations + k] == 0.0;
        }
        conventions = conventions && std::abs(f[feature_index::kResultant] - c * std::sqrt(3.0)) <= 1e-12;
    }
    o.check(conventions, "constant-window conventions violated");
    if (o.pass) {
        o.detail = "max relative error " + fmt(worst) + " over 50 windows; constant-window conventions exact";
    }
    return o;
}

// 3 -------------------------------------------------------------------------
Outcome knn_oracle() {
    Outcome o;
    Rng rng(3);
    const std::size_t d = 5;
    const std::size_t classes = 5;
    std::vector<std::vector<double>> train(300, std::vector<double>(d));
    std::vector<int> labels(300);
    LabeledSet s;
    s.class_count = classes;
    s.x = Matrix(0, d);
    for (std::size_t i = 0; i < 300; ++i) {
        labels[i] = static_cast<int>(uniform_index(rng, classes));
        for (std::size_t j = 0; j < d; ++j) {
            train[i][j] = (1.0 + static_cast<double>(j)) * standard_normal(rng) + (j == 1 ? labels[i] : 0.0);
        }
        s.x.push_row(train[i]);
        s.y.push_back(labels[i]);
    }
    std::size_t mismatches = 0;
    for (std::size_t k : {1u, 3u, 5u}) {
        const auto model = fit_knn(s, k);
        for (int q = 0; q < 1000; ++q) {
            std::vector<double> query(d);
            for (std::size_t j = 0; j < d; ++j) {
                query[j] = 2.0 * (1.0 + static_cast<double>(j)) * standard_normal(rng);
            }
            mismatches += knn_predict(model, query) != oracle::brute_force_knn(train, labels, query, k, classes) ? 1 : 0;
        }
    }
    o.check(mismatches == 0, std::to_string(mismatches) + " mismatches");
    if (o.pass) {
        o.detail = "3000 queries, 0 mismatches";
    }
    return o;
}

// 4 -------------------------------------------------------------------------
Outcome qda_analytic() {
    Outcome o;
    Rng rng(4);
    LabeledSet train;
    train.class_count = 2;
    train.x = Matrix(0, 1);
    for (int i = 0; i < 10000; ++i) {
        const Label y = static_cast<Label>(i % 2);
        train.x.push_row(std::vector<double>{(y == 0 ? 0.0 : 2.0) + standard_normal(rng)});
        train.y.push_back(y);
    }
    const auto model = fit_qda(train);
    auto gap = [&](double x) {
        const auto g = qda_discriminants(model, std::vector<double>{x});
        return g[0] - g[1];
    };
    double lo = 0.0;
    double hi = 2.0;
    o.check(gap(lo) > 0.0 && gap(hi) < 0.0, "no sign change on [0, 2]");
    for (int it = 0; it < 100 && o.pass; ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? lo : hi) = mid;
    }
    const double boundary = 0.5 * (lo + hi);
    o.check(std::abs(boundary - 1.0) <= 0.05, "boundary at " + fmt(boundary));

    std::size_t hits = 0;
    const std::size_t n = 10000;
    for (std::size_t i = 0; i < n; ++i) {
        const Label y = static_cast<Label>(i % 2);
        hits += predict_qda(model, std::vector<double>{(y == 0 ? 0.0 : 2.0) + standard_normal(rng)}) == y ? 1 : 0;
    }
    const double rate = static_cast<double>(hits) / static_cast<double>(n);
    const double bayes = oracle::normal_cdf(1.0);
    o.check(std::abs(rate - bayes) <= 0.02, "rate " + fmt(rate) + " vs Bayes " + fmt(bayes));
    if (o.pass) {
        o.detail = "boundary " + fmt(boundary) + ", rate " + fmt(rate) + " vs Bayes " + fmt(bayes);
    }
    return o;
}

// 5 -------------------------------------------------------------------------
Outcome svm_duality() {
    Outcome o;
    std::size_t models = 0;
    double worst_eq = 0.0;
    double worst_kkt = 0.0;
    auto audit = [&](const SvmBinaryModel& m) {
        ++models;
        double eq = 0.0;
        for (double c : m.coefficients) {
            eq += c;
            const double alpha = std::abs(c);
            o.check(alpha >= 0.0 && alpha <= m.c_box + 1e-12, "alpha outside box");
        }
        worst_eq = std::max(worst_eq, std::abs(eq));
        worst_kkt = std::max(worst_kkt, m.max_violation);
        o.check(m.converged, "binary model did not converge");
    };

    Rng rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto data = gaussian_classes(4, 25, 3, rng);
        for (const auto& m : fit_svm_ova(data).models) {
            audit(m);
        }
    }
    const auto streams = generate_synthetic(default_synth_spec());
    const Dataset dataset = featurize(streams, SignalConfig{});
    const auto standardized = fit_standardizer(dataset.features).apply(dataset.features);
    for (const auto& m : fit_svm_ova({standardized, dataset.labels, kClassCount}).models) {
        audit(m);
    }
    o.check(worst_eq <= 1e-6, "|sum alpha y| = " + fmt(worst_eq));
    o.check(worst_kkt < 1e-3, "KKT violation " + fmt(worst_kkt));

    Matrix two(2, 1);
    two(0, 0) = -1.0;
    two(1, 0) = 1.0;
    const std::vector<double> y2 = {-1.0, 1.0};
    const auto sol = solve_svm_dual(two, y2, 1.0, 10.0);
    const double analytic = 1.0 / (1.0 - std::exp(-2.0));
    o.check(std::abs(sol.alpha[0] - analytic) <= 1e-3 && std::abs(sol.alpha[1] - analytic) <= 1e-3,
            "two-point alpha " + fmt(sol.alpha[0]));
    o.check(std::abs(sol.bias) <= 1e-6, "two-point bias " + fmt(sol.bias));

    Matrix xor_x(4, 2);
    const double pts[4][2] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    std::vector<std::vector<double>> kernel(4, std::vector<double>(4));
    for (std::size_t i = 0; i < 4; ++i) {
        xor_x(i, 0) = pts[i][0];
        xor_x(i, 1) = pts[i][1];
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            const double d2 = (pts[i][0] - pts[j][0]) * (pts[i][0] - pts[j][0]) +
                              (pts[i][1] - pts[j][1]) * (pts[i][1] - pts[j][1]);
            kernel[i][j] = std::exp(-d2 / 2.0);
        }
    }
    const std::vector<double> y4 = {1.0, 1.0, -1.0, -1.0};
    const auto exact = oracle::svm_dual_enumeration(kernel, y4, 10.0);
    const auto xor_sol = solve_svm_dual(xor_x, y4, 1.0, 10.0);
    o.check(std::abs(xor_sol.objective - exact.objective) <= 1e-3,
            "XOR objective " + fmt(xor_sol.objective) + " vs " + fmt(exact.objective));
    if (o.pass) {
        o.detail = std::to_string(models) + " models, max |sum alpha y| " + fmt(worst_eq) + ", max KKT gap " +
                   fmt(worst_kkt) + ", two-point alpha " + fmt(sol.alpha[0]) + ", XOR objective " +
                   fmt(xor_sol.objective) + " vs " + fmt(exact.objective);
    }
    return o;
}

// 6 -------------------------------------------------------------------------
Outcome mlp_gradient() {
    Outcome o;
    Rng rng(6);
    double worst = 0.0;
    for (int state = 0; state < 5; ++state) {
        LabeledSet data;
        data.class_count = 5;
        data.x = Matrix(0, 6);
        for (int i = 0; i < 15; ++i) {
            std::vector<double> row(6);
            for (double& v : row) {
                v = standard_normal(rng);
            }
            data.x.push_row(row);
            data.y.push_back(static_cast<Label>(uniform_index(rng, 5)));
        }
        std::vector<std::size_t> rows(15);
        std::iota(rows.begin(), rows.end(), 0);
        MlpModel model = init_mlp(6, 4 + static_cast<std::size_t>(state), 5, 100 + static_cast<std::uint64_t>(state));
        std::vector<double> grad;
        mlp_loss_gradient(model, data, rows, &grad);
        const auto params = mlp_parameters(model);
        for (int t = 0; t < 20; ++t) {
            const std::size_t i = uniform_index(rng, params.size());
            auto p = params;
            p[i] = params[i] + 1e-5;
            set_mlp_parameters(model, p);
            const double up = mlp_loss_gradient(model, data, rows, nullptr);
            p[i] = params[i] - 1e-5;
            set_mlp_parameters(model, p);
            const double down = mlp_loss_gradient(model, data, rows, nullptr);
            set_mlp_parameters(model, params);
            const double numeric = (up - down) / 2e-5;
            worst = std::max(worst, std::abs(grad[i] - numeric) /
                                        std::max({std::abs(grad[i]), std::abs(numeric), 1e-6}));
        }
    }
    o.check(worst < 1e-4, "max relative error " + fmt(worst));
    if (o.pass) {
        o.detail = "max relative error " + fmt(worst) + " over 100 coordinates";
    }
    return o;
}

// 7 -------------------------------------------------------------------------
Outcome lda_residual() {
    Outcome o;
    Rng rng(7);
    double worst = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t classes = 2 + uniform_index(rng, 4);
        const std::size_t d = 3 + uniform_index(rng, 8);
        const auto data = gaussian_classes(classes, 20, d, rng);
        const auto scatter = lda_scatter(data);
        const auto proj = fit_lda(data, d);
        o.check(proj.output_dim() <= classes - 1, "too many components");
        for (std::size_t c = 0; c < proj.output_dim(); ++c) {
            std::vector<double> sb(d, 0.0);
            std::vector<double> sw(d, 0.0);
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    sb[i] += scatter.between(i, j) * proj.matrix(j, c);
                    sw[i] += scatter.within(i, j) * proj.matrix(j, c);
                }
            }
            double res = 0.0;
            double norm = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                res += (sb[i] - proj.eigenvalues[c] * sw[i]) * (sb[i] - proj.eigenvalues[c] * sw[i]);
                norm += sb[i] * sb[i];
            }
            worst = std::max(worst, std::sqrt(res) / std::sqrt(norm));
        }
    }
    o.check(worst <= 1e-6, "max relative residual " + fmt(worst));
    if (o.pass) {
        o.detail = "max relative residual " + fmt(worst) + " over 10 datasets";
    }
    return o;
}

// 8 -------------------------------------------------------------------------
Outcome sfs_sanity() {
    Outcome o;
    std::size_t first = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        Rng rng(mix_seed(8, rep));
        LabeledSet s;
        s.class_count = 5;
        s.x = Matrix(0, 10);
        for (int i = 0; i < 50; ++i) {
            const Label y = static_cast<Label>(i % 5);
            std::vector<double> row(10);
            row[0] = 3.0 * y + 0.2 * standard_normal(rng);
            for (std::size_t j = 1; j < 10; ++j) {
                row[j] = standard_normal(rng);
            }
            s.x.push_row(row);
            s.y.push_back(y);
        }
        const auto subset = sfs_select(s, make_spec(ClassifierKind::knn), 1, 5, rep);
        first += subset.indices.front() == 0 ? 1 : 0;
    }
    o.check(first >= 95, "informative feature first in " + std::to_string(first) + "/100");
    if (o.pass) {
        o.detail = "informative feature first in " + std::to_string(first) + "/100";
    }
    return o;
}

// 9 -------------------------------------------------------------------------
Outcome passive_pipeline() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    Config config;
    const Dataset data = featurize(generate_synthetic(config.synth_spec()), config.signal);
    const auto [train, test] = split_dataset(data, config.train_fraction, config.seed);
    const auto cells = run_passive_experiment(train.labeled(), test.labeled(), config.experiment());
    const double elapsed = seconds_since(start);
    double best_svm = 0.0;
    std::string table;
    for (const auto& c : cells) {
        o.check(c.error.empty(), std::string(to_string(c.classifier)) + "/" + std::string(to_string(c.space)) +
                                     " failed: " + c.error);
        table += std::string(to_string(c.classifier)) + "/" + std::string(to_string(c.space)) + "=" +
                 fmt(c.report.rate) + " ";
        o.check(c.report.rate > 0.60, std::string(to_string(c.classifier)) + "/" + std::string(to_string(c.space)) +
                                          " rate " + fmt(c.report.rate));
        if (c.classifier == ClassifierKind::svm) {
            best_svm = std::max(best_svm, c.report.rate);
        }
    }
    o.check(cells.size() == 12, "grid has " + std::to_string(cells.size()) + " cells");
    o.check(best_svm > 0.85, "best SVM rate " + fmt(best_svm));
    o.check(elapsed < 600.0, "runtime " + fmt(elapsed) + " s");
    o.detail = (o.pass ? "" : o.detail + " | ") + table + "(" + fmt(elapsed) + " s)";
    return o;
}

// 10 ------------------------------------------------------------------------
Outcome active_dominance() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    Config config;
    config.synth.duration = 600.0;
    const Dataset data = featurize(generate_synthetic(config.synth_spec()), config.signal);
    ActiveConfig ac;
    ac.rounds = 100;
    ac.runs = 20;
    ac.seeds_per_class = 4;
    ac.test_fraction = 0.25;
    ac.master_seed = 7;
    ac.space.space = FeatureSpace::original;
    const auto spec = config.spec(ClassifierKind::knn);
    QueryStrategy active;
    active.epsilon = 0.10;
    QueryStrategy random;
    random.kind = QueryKind::random;
    const auto a = run_active_learning(data.labeled(), spec, active, ac);
    const auto r = run_active_learning(data.labeled(), spec, random, ac);
    const double elapsed = seconds_since(start);
    std::size_t ahead = 0;
    double auc_a = 0.0;
    double auc_r = 0.0;
    for (std::size_t c = 0; c < a.mean.size(); ++c) {
        ahead += a.mean[c] >= r.mean[c] ? 1 : 0;
        auc_a += a.mean[c];
        auc_r += r.mean[c];
    }
    const double share = static_cast<double>(ahead) / static_cast<double>(a.mean.size());
    o.check(a.mean.size() == 101, "curve has " + std::to_string(a.mean.size()) + " checkpoints");
    o.check(share >= 0.70, "active >= random at " + fmt(100 * share) + "% of checkpoints");
    o.check(auc_a > auc_r, "AUC " + fmt(auc_a) + " vs " + fmt(auc_r));
    o.check(elapsed < 900.0, "runtime " + fmt(elapsed) + " s");
    if (o.pass) {
        o.detail = "active >= random at " + std::to_string(ahead) + "/" + std::to_string(a.mean.size()) +
                   " checkpoints, AUC " + fmt(auc_a) + " vs " + fmt(auc_r) + ", final " + fmt(a.mean.back()) +
                   " vs " + fmt(r.mean.back()) + " (" + fmt(elapsed) + " s)";
    }
    return o;
}

// 11 ------------------------------------------------------------------------
std::vector<std::string> experiment_outputs(std::uint64_t seed) {
    std::vector<std::string> files;
    auto emit = [&](auto&& writer) {
        std::ostringstream out;
        writer(out);
        files.push_back(out.str());
    };
    Config config;
    config.seed = seed;
    config.mlp.mlp.epochs = 100;
    const Dataset data = featurize(generate_synthetic(config.synth_spec()), config.signal);
    emit([&](std::ostream& out) { write_feature_table(out, data.feature_names, data.features, data.labels); });

    const auto [train, test] = split_dataset(data, config.train_fraction, config.seed);
    const auto cells = run_passive_experiment(train.labeled(), test.labeled(), config.experiment());
    emit([&](std::ostream& out) { write_passive_summary(out, cells); });
    for (const auto& c : cells) {
        emit([&](std::ostream& out) { save_report(c.report).write(out); });
        if (c.pipeline) {
            emit([&](std::ostream& out) { save_pipeline(*c.pipeline).write(out); });
        }
    }

    ActiveConfig ac;
    ac.rounds = 20;
    ac.runs = 3;
    ac.master_seed = seed;
    ac.space.space = FeatureSpace::lda;
    QueryStrategy strategy;
    const auto curve = run_active_learning(data.labeled(), config.spec(ClassifierKind::svm), strategy, ac);
    emit([&](std::ostream& out) { write_curve_summary(out, curve); });
    emit([&](std::ostream& out) { write_curve_long(out, curve); });
    const std::vector<NamedSeries> series = {{"active", curve.mean}};
    emit([&](std::ostream& out) { write_curves_svg(out, series, "svm"); });
    return files;
}

Outcome reproducibility() {
    Outcome o;
    const auto a = experiment_outputs(42);
    const auto b = experiment_outputs(42);
    o.check(a.size() == b.size(), "different file counts");
    std::size_t bytes = 0;
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        o.check(a[i] == b[i], "file " + std::to_string(i) + " differs");
        bytes += a[i].size();
    }
    const auto c = experiment_outputs(43);
    o.check(c[0] != a[0], "a different seed produced identical features");
    if (o.pass) {
        o.detail = std::to_string(a.size()) + " files (" + std::to_string(bytes) + " bytes) byte-identical";
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"fft matches naive DFT, Parseval", fft_oracle},
        {"31 features match definition oracle", feature_oracle},
        {"kNN matches brute-force search", knn_oracle},
        {"QDA boundary and Bayes rate", qda_analytic},
        {"SVM dual constraints and KKT", svm_duality},
        {"MLP gradient check", mlp_gradient},
        {"LDA generalized eigen residual", lda_residual},
        {"SFS picks the informative feature", sfs_sanity},
        {"passive pipeline on synthetic data", passive_pipeline},
        {"active learning beats random sampling", active_dominance},
        {"byte-identical reruns", reproducibility},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
