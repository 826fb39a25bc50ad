#include <gtest/gtest.h>

#include <har/classifier.hpp>
#include <har/model_io.hpp>

#include "oracles.hpp"

#include <sstream>

using namespace har;

namespace {

LabeledSet make_set(const std::vector<std::vector<double>>& rows, const std::vector<Label>& labels,
                    std::size_t classes) {
    LabeledSet s;
    s.x = Matrix(0, rows.empty() ? 0 : rows[0].size());
    for (const auto& r : rows) {
        s.x.push_row(r);
    }
    s.y = labels;
    s.class_count = classes;
    return s;
}

LabeledSet one_d_example() {
    return make_set({{-1.0}, {1.0}, {1.0}, {3.0}}, {0, 0, 1, 1}, 2);
}

/// Isotropic Gaussian blobs centred at `centres` with unit spread.
LabeledSet blobs(const std::vector<std::vector<double>>& centres, std::size_t per_class, Rng& rng,
                 double spread = 1.0) {
    LabeledSet s;
    s.class_count = centres.size();
    s.x = Matrix(0, centres[0].size());
    for (std::size_t c = 0; c < centres.size(); ++c) {
        for (std::size_t i = 0; i < per_class; ++i) {
            std::vector<double> row(centres[c].size());
            for (std::size_t j = 0; j < row.size(); ++j) {
                row[j] = centres[c][j] + spread * standard_normal(rng);
            }
            s.x.push_row(row);
            s.y.push_back(static_cast<Label>(c));
        }
    }
    return s;
}

LabeledSet xor_set() {
    return make_set({{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}}, {0, 0, 1, 1}, 2);
}

double accuracy(const Model& model, const LabeledSet& data) {
    std::size_t hits = 0;
    for (std::size_t r = 0; r < data.size(); ++r) {
        hits += predict(model, data.x.row(r)) == data.y[r] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::vector<double> x1(double v) {
    return {v};
}

}  // namespace

// ---------------------------------------------------------------- QDA

TEST(Qda, OneDimensionalMoments) {
    const auto model = fit_qda(one_d_example());
    ASSERT_EQ(model.classes.size(), 2u);
    EXPECT_DOUBLE_EQ(model.classes[0].mean[0], 0.0);
    EXPECT_DOUBLE_EQ(model.classes[1].mean[0], 2.0);
    EXPECT_NEAR(model.classes[0].covariance(0, 0), 1.0, 1e-5);
    EXPECT_NEAR(model.classes[1].covariance(0, 0), 1.0, 1e-5);
    EXPECT_DOUBLE_EQ(model.classes[0].prior, 0.5);
    EXPECT_DOUBLE_EQ(model.classes[1].prior, 0.5);
}

TEST(Qda, BoundaryAtMidpoint) {
    const auto model = fit_qda(one_d_example());
    for (double x : {-2.0, 0.0, 0.5, 1.0, 1.7, 4.0}) {
        const auto g = qda_discriminants(model, x1(x));
        // g_1 - g_2 = -2x + 2 for unit variances
        EXPECT_NEAR(g[0] - g[1], (-2.0 * x + 2.0) / model.classes[0].covariance(0, 0), 1e-9);
    }
    const auto g = qda_discriminants(model, x1(1.0));
    EXPECT_NEAR(g[0] - g[1], 0.0, 1e-12);
    EXPECT_EQ(predict_qda(model, x1(0.0)), 0);
    EXPECT_EQ(predict_qda(model, x1(2.0)), 1);
    EXPECT_EQ(predict_qda(model, x1(1.0)), 0);
}

TEST(Qda, SingularCovarianceStillFits) {
    Rng rng(3);
    LabeledSet s = blobs({{0.0}, {3.0}}, 20, rng);
    LabeledSet dup;
    dup.class_count = 2;
    dup.y = s.y;
    dup.x = Matrix(0, 2);
    for (std::size_t r = 0; r < s.size(); ++r) {
        dup.x.push_row(std::vector<double>{s.x(r, 0), s.x(r, 0)});
    }
    const auto model = fit_qda(dup);
    for (const auto& c : model.classes) {
        EXPECT_GT(c.lambda, 0.0);
        EXPECT_TRUE(std::isfinite(c.log_det));
    }
    for (std::size_t r = 0; r < dup.size(); ++r) {
        for (double g : qda_discriminants(model, dup.x.row(r))) {
            EXPECT_TRUE(std::isfinite(g));
        }
    }
    EXPECT_GT(accuracy(Model(model), dup), 0.8);
}

TEST(Qda, TranslationInvariant) {
    Rng rng(5);
    const LabeledSet s = blobs({{0, 0, 0}, {2, 1, 0}, {0, 2, 2}}, 30, rng);
    const std::vector<double> shift = {100.0, -40.0, 7.5};
    LabeledSet moved = s;
    for (std::size_t r = 0; r < moved.size(); ++r) {
        for (std::size_t j = 0; j < 3; ++j) {
            moved.x(r, j) += shift[j];
        }
    }
    const auto a = fit_qda(s);
    const auto b = fit_qda(moved);
    for (int q = 0; q < 500; ++q) {
        std::vector<double> x = {3 * standard_normal(rng), 3 * standard_normal(rng), 3 * standard_normal(rng)};
        std::vector<double> y = x;
        for (std::size_t j = 0; j < 3; ++j) {
            y[j] += shift[j];
        }
        EXPECT_EQ(predict_qda(a, x), predict_qda(b, y));
    }
}

TEST(Qda, MatchesAnalyticBayesRate) {
    const auto model = fit_qda(one_d_example());
    Rng rng(77);
    std::size_t hits = 0;
    const std::size_t n = 10000;
    for (std::size_t i = 0; i < n; ++i) {
        const Label truth = static_cast<Label>(i % 2);
        const double x = (truth == 0 ? 0.0 : 2.0) + standard_normal(rng);
        hits += predict_qda(model, x1(x)) == truth ? 1 : 0;
    }
    const double bayes = oracle::normal_cdf(1.0);
    EXPECT_NEAR(static_cast<double>(hits) / n, bayes, 0.02);
}

TEST(Qda, RejectsUndersizedClassAndWrongDimension) {
    const LabeledSet s = make_set({{0.0}, {1.0}, {5.0}}, {0, 0, 1}, 2);
    try {
        fit_qda(s);
        FAIL() << "expected rejection";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
    }
    const auto model = fit_qda(one_d_example());
    EXPECT_THROW(qda_discriminants(model, std::vector<double>{1.0, 2.0}), Error);
}

// ---------------------------------------------------------------- kNN

TEST(Knn, ExactTrainingPointWithKOne) {
    Rng rng(9);
    const LabeledSet s = blobs({{0, 0}, {1, 1}, {2, 0}}, 15, rng, 0.8);
    const auto model = fit_knn(s, 1);
    for (std::size_t r = 0; r < s.size(); ++r) {
        EXPECT_EQ(knn_predict(model, s.x.row(r)), s.y[r]);
    }
}

TEST(Knn, MajorityVote) {
    const LabeledSet s = make_set({{0.0}, {1.0}, {2.0}, {10.0}, {11.0}}, {0, 0, 1, 1, 1}, 2);
    const auto model = fit_knn(s, 3);
    EXPECT_EQ(knn_predict(model, x1(0.9)), 0);
    const auto votes = knn_vote_fractions(model, x1(0.9));
    EXPECT_NEAR(votes[0], 2.0 / 3.0, 1e-15);
    EXPECT_NEAR(votes[1], 1.0 / 3.0, 1e-15);
}

TEST(Knn, VoteTieGoesToNearestTiedClass) {
    const LabeledSet s = make_set({{0.0}, {1.0}, {3.0}, {4.0}}, {0, 1, 1, 0}, 2);
    const auto model = fit_knn(s, 2);
    EXPECT_EQ(knn_predict(model, x1(0.8)), 1);  // neighbours 1.0 (B) and 0.0 (A)
    EXPECT_EQ(knn_predict(model, x1(0.2)), 0);
}

TEST(Knn, DistanceTieGoesToSmallerIndex) {
    const LabeledSet s = make_set({{0.0}, {2.0}, {5.0}}, {1, 0, 0}, 2);
    const auto model = fit_knn(s, 1);
    EXPECT_EQ(knn_neighbors(model, x1(1.0)).front(), 0u);
    EXPECT_EQ(knn_predict(model, x1(1.0)), 1);
}

TEST(Knn, MatchesBruteForceOracle) {
    Rng rng(31);
    const std::size_t d = 4;
    const std::size_t classes = 3;
    std::vector<std::vector<double>> train(200, std::vector<double>(d));
    std::vector<int> labels(200);
    for (std::size_t i = 0; i < 200; ++i) {
        labels[i] = static_cast<int>(uniform_index(rng, classes));
        for (std::size_t j = 0; j < d; ++j) {
            train[i][j] = standard_normal(rng) * (1.0 + j) + (j == 0 ? labels[i] : 0.0);
        }
    }
    const LabeledSet s = make_set(train, labels, classes);
    for (std::size_t k : {1u, 3u, 5u}) {
        const auto model = fit_knn(s, k);
        for (int q = 0; q < 1000; ++q) {
            std::vector<double> query(d);
            for (std::size_t j = 0; j < d; ++j) {
                query[j] = 2.0 * standard_normal(rng) * (1.0 + j);
            }
            ASSERT_EQ(knn_predict(model, query), oracle::brute_force_knn(train, labels, query, k, classes))
                << "k=" << k << " query " << q;
        }
    }
}

TEST(Knn, InvariantUnderPositiveRescaling) {
    Rng rng(12);
    const LabeledSet s = blobs({{0, 0, 0}, {1, 0, 1}, {0, 1, 1}}, 20, rng);
    LabeledSet scaled = s;
    for (double& v : scaled.x.data) {
        v *= 37.5;
    }
    const auto a = fit_knn(s, 5);
    const auto b = fit_knn(scaled, 5);
    for (int q = 0; q < 300; ++q) {
        std::vector<double> x = {standard_normal(rng), standard_normal(rng), standard_normal(rng)};
        std::vector<double> y = x;
        for (double& v : y) {
            v *= 37.5;
        }
        EXPECT_EQ(knn_predict(a, x), knn_predict(b, y));
    }
}

TEST(Knn, ClampsKAndRejectsWrongDimension) {
    const LabeledSet s = make_set({{0.0}, {1.0}}, {0, 1}, 2);
    EXPECT_EQ(fit_knn(s, 10).k, 2u);
    EXPECT_THROW(fit_knn(s, 0), Error);
    EXPECT_THROW(knn_predict(fit_knn(s, 1), std::vector<double>{1.0, 2.0}), Error);
}

// ---------------------------------------------------------------- SVM

TEST(Svm, TwoPointAnalyticSolution) {
    Matrix x(2, 1);
    x(0, 0) = -1.0;
    x(1, 0) = 1.0;
    const std::vector<double> y = {-1.0, 1.0};
    const auto sol = solve_svm_dual(x, y, 1.0, 10.0);
    const double expected = 1.0 / (1.0 - std::exp(-2.0));
    EXPECT_NEAR(expected, 1.1565, 1e-4);
    EXPECT_NEAR(sol.alpha[0], expected, 1e-6);
    EXPECT_NEAR(sol.alpha[1], expected, 1e-6);
    EXPECT_NEAR(sol.bias, 0.0, 1e-9);
    EXPECT_TRUE(sol.converged);
}

TEST(Svm, DualConstraintsAndKkt) {
    Rng rng(17);
    const LabeledSet s = blobs({{0, 0}, {1.2, 1.0}}, 40, rng);
    std::vector<double> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        y[i] = s.y[i] == 0 ? 1.0 : -1.0;
    }
    for (double c_box : {0.5, 10.0}) {
        const auto sol = solve_svm_dual(s.x, y, 1.0, c_box);
        ASSERT_TRUE(sol.converged);
        double eq = 0.0;
        for (std::size_t i = 0; i < y.size(); ++i) {
            EXPECT_GE(sol.alpha[i], 0.0);
            EXPECT_LE(sol.alpha[i], c_box);
            eq += sol.alpha[i] * y[i];
        }
        EXPECT_LE(std::abs(eq), 1e-6);
        const auto model = fit_svm_binary(s.x, y, 1.0, c_box);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double margin = y[i] * svm_decision(model, s.x.row(i));
            if (sol.alpha[i] <= kSvmAlphaEpsilon) {
                EXPECT_GE(margin, 1.0 - 2e-3);
            } else if (sol.alpha[i] < c_box - 1e-8) {
                EXPECT_NEAR(margin, 1.0, 2e-3);
            } else {
                EXPECT_LE(margin, 1.0 + 2e-3);
            }
        }
    }
}

TEST(Svm, XorMatchesEnumerationOracle) {
    const LabeledSet s = xor_set();
    const std::vector<double> y = {1.0, 1.0, -1.0, -1.0};
    std::vector<std::vector<double>> kernel(4, std::vector<double>(4));
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            double d2 = 0.0;
            for (std::size_t k = 0; k < 2; ++k) {
                d2 += (s.x(i, k) - s.x(j, k)) * (s.x(i, k) - s.x(j, k));
            }
            kernel[i][j] = std::exp(-d2 / 2.0);
        }
    }
    const auto exact = oracle::svm_dual_enumeration(kernel, y, 10.0);
    const auto sol = solve_svm_dual(s.x, y, 1.0, 10.0);
    EXPECT_NEAR(sol.objective, exact.objective, 1e-3);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_NEAR(sol.alpha[i], exact.alpha[i], 1e-2);
    }
    const auto model = fit_svm_binary(s.x, y, 1.0, 10.0);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_GT(y[i] * svm_decision(model, s.x.row(i)), 0.0);
    }
}

TEST(Svm, SmallProblemsMatchEnumerationOracle) {
    Rng rng(41);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 6;
        Matrix x(n, 2);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            x(i, 0) = standard_normal(rng);
            x(i, 1) = standard_normal(rng);
            y[i] = i < 3 ? 1.0 : -1.0;
        }
        std::vector<std::vector<double>> kernel(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                kernel[i][j] = rbf_kernel(x.row(i), x.row(j), 0.7);
            }
        }
        const double c_box = 2.0;
        const auto exact = oracle::svm_dual_enumeration(kernel, y, c_box);
        const auto sol = solve_svm_dual(x, y, 0.7, c_box);
        EXPECT_NEAR(sol.objective, exact.objective, 1e-3) << "trial " << trial;
    }
}

TEST(Svm, RejectsSingleClassAndBadParameters) {
    Matrix x(3, 1);
    const std::vector<double> same = {1.0, 1.0, 1.0};
    EXPECT_THROW(solve_svm_dual(x, same, 1.0, 1.0), Error);
    const std::vector<double> mixed = {1.0, -1.0, 1.0};
    EXPECT_THROW(solve_svm_dual(x, mixed, 0.0, 1.0), Error);
    EXPECT_THROW(solve_svm_dual(x, mixed, 1.0, -1.0), Error);
}

TEST(Svm, IterationCapReportsNonConvergence) {
    Rng rng(2);
    const LabeledSet s = blobs({{0, 0}, {0.5, 0.5}}, 30, rng);
    std::vector<double> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        y[i] = s.y[i] == 0 ? 1.0 : -1.0;
    }
    const auto sol = solve_svm_dual(s.x, y, 1.0, 10.0, kSvmTolerance, 3);
    EXPECT_FALSE(sol.converged);
    EXPECT_EQ(sol.iterations, 3u);
}

TEST(SvmOva, TwoClassesMatchBinarySign) {
    Rng rng(23);
    const LabeledSet s = blobs({{0, 0}, {1.5, 0.5}}, 30, rng);
    const auto ova = fit_svm_ova(s, 1.0, 10.0);
    std::vector<double> y(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        y[i] = s.y[i] == 0 ? 1.0 : -1.0;
    }
    const auto binary = fit_svm_binary(s.x, y, 1.0, 10.0);
    for (int q = 0; q < 300; ++q) {
        std::vector<double> x = {2 * standard_normal(rng), 2 * standard_normal(rng)};
        const double f = svm_decision(binary, x);
        if (std::abs(f) < 1e-2) {
            continue;
        }
        EXPECT_EQ(predict_svm(ova, x), f > 0 ? 0 : 1);
    }
}

TEST(SvmOva, FreeSupportVectorsSitOnTheMargin) {
    Rng rng(29);
    const LabeledSet s = blobs({{0, 0}, {2, 0}, {0, 2}}, 25, rng);
    const auto ova = fit_svm_ova(s, 0.0, 10.0);
    ASSERT_EQ(ova.models.size(), 3u);
    std::size_t checked = 0;
    for (const auto& m : ova.models) {
        for (std::size_t i = 0; i < m.support_vectors.rows; ++i) {
            const double alpha = std::abs(m.coefficients[i]);
            if (alpha < m.c_box - 1e-6) {
                const double y = m.coefficients[i] > 0 ? 1.0 : -1.0;
                EXPECT_NEAR(y * svm_decision(m, m.support_vectors.row(i)), 1.0, 2e-3);
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 0u);
}

TEST(SvmOva, SeparatedBlobsClassifiedAccurately) {
    Rng rng(37);
    const std::vector<std::vector<double>> centres = {{0, 0}, {6, 0}, {3, 6}};
    const LabeledSet train = blobs(centres, 40, rng);
    const LabeledSet test = blobs(centres, 100, rng);
    const Model model = fit_svm_ova(train);
    EXPECT_GE(accuracy(model, test), 0.98);
}

// ---------------------------------------------------------------- MLP

TEST(Mlp, PosteriorsFormDistribution) {
    const MlpModel model = init_mlp(6, 5, 4, 3);
    Rng rng(1);
    for (int q = 0; q < 100; ++q) {
        std::vector<double> x(6);
        for (double& v : x) {
            v = 5.0 * standard_normal(rng);
        }
        const auto p = mlp_posteriors(model, x);
        double sum = 0.0;
        for (double v : p) {
            EXPECT_GE(v, 0.0);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
    }
}

TEST(Mlp, InitialWeightsWithinGlorotBound) {
    const MlpModel model = init_mlp(10, 7, 5, 9);
    const double b1 = std::sqrt(6.0 / 17.0);
    const double b2 = std::sqrt(6.0 / 12.0);
    for (double w : model.w1.data) {
        EXPECT_LE(std::abs(w), b1);
    }
    for (double w : model.w2.data) {
        EXPECT_LE(std::abs(w), b2);
    }
}

TEST(Mlp, GradientMatchesFiniteDifferences) {
    Rng rng(55);
    LabeledSet data;
    data.class_count = 3;
    data.x = Matrix(0, 4);
    for (int i = 0; i < 12; ++i) {
        data.x.push_row(std::vector<double>{standard_normal(rng), standard_normal(rng), standard_normal(rng),
                                            standard_normal(rng)});
        data.y.push_back(static_cast<Label>(i % 3));
    }
    std::vector<std::size_t> rows(12);
    std::iota(rows.begin(), rows.end(), 0);
    MlpModel model = init_mlp(4, 5, 3, 8);
    std::vector<double> grad;
    mlp_loss_gradient(model, data, rows, &grad);
    const auto params = mlp_parameters(model);
    ASSERT_EQ(grad.size(), params.size());
    const double h = 1e-5;
    for (int t = 0; t < 20; ++t) {
        const std::size_t i = uniform_index(rng, params.size());
        auto p = params;
        p[i] = params[i] + h;
        set_mlp_parameters(model, p);
        const double up = mlp_loss_gradient(model, data, rows, nullptr);
        p[i] = params[i] - h;
        set_mlp_parameters(model, p);
        const double down = mlp_loss_gradient(model, data, rows, nullptr);
        set_mlp_parameters(model, params);
        const double numeric = (up - down) / (2 * h);
        const double rel = std::abs(grad[i] - numeric) / std::max({std::abs(grad[i]), std::abs(numeric), 1e-6});
        EXPECT_LT(rel, 1e-4) << "coordinate " << i;
    }
}

TEST(Mlp, LearnsXorForMostSeeds) {
    const LabeledSet data = xor_set();
    MlpParams params;
    params.hidden = 4;
    params.epochs = 2000;
    params.learning_rate = 0.5;
    params.momentum = 0.9;
    params.batch_size = 4;
    std::vector<std::uint64_t> solved;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        params.seed = seed;
        if (accuracy(fit_mlp(data, params), data) == 1.0) {
            solved.push_back(seed);
        }
    }
    EXPECT_GE(solved.size(), 8u);
    std::string list;
    for (auto s : solved) {
        list += std::to_string(s) + ' ';
    }
    RecordProperty("xor_seeds", list);
    std::cout << "xor solved seeds: " << list << '\n';
}

TEST(Mlp, LossNonIncreasingWithSmallSteps) {
    Rng rng(61);
    const LabeledSet data = blobs({{-2, 0}, {2, 0}}, 20, rng, 0.5);
    MlpParams params;
    params.hidden = 3;
    params.epochs = 200;
    params.learning_rate = 0.01;
    params.momentum = 0.0;
    params.batch_size = data.size();
    const auto model = fit_mlp(data, params);
    ASSERT_EQ(model.loss_history.size(), params.epochs);
    const std::size_t start = params.epochs / 5;
    for (std::size_t e = start + 1; e < params.epochs; ++e) {
        EXPECT_LE(model.loss_history[e], model.loss_history[e - 1] + 1e-15) << "epoch " << e;
    }
}

TEST(Mlp, RejectsBadHyperparameters) {
    MlpParams params;
    params.hidden = 0;
    EXPECT_THROW(fit_mlp(xor_set(), params), Error);
    params.hidden = 2;
    params.epochs = 0;
    EXPECT_THROW(fit_mlp(xor_set(), params), Error);
}

TEST(Mlp, DivergenceAborts) {
    MlpParams params;
    params.hidden = 4;
    params.learning_rate = 1e308;
    params.momentum = 0.9;
    params.epochs = 50;
    LabeledSet data = xor_set();
    for (double& v : data.x.data) {
        v *= 1e10;
    }
    EXPECT_THROW(fit_mlp(data, params), Error);
}

// ---------------------------------------------------------------- contract

class ClassifierContract : public ::testing::TestWithParam<ClassifierKind> {};

TEST_P(ClassifierContract, DeterministicAndPersistsExactly) {
    Rng rng(71);
    const LabeledSet train = blobs({{0, 0, 0}, {2, 0, 1}, {0, 2, 1}}, 20, rng);
    ClassifierSpec spec = make_spec(GetParam());
    spec.mlp.epochs = 60;
    const Model a = fit(spec, train);
    const Model b = fit(spec, train);
    EXPECT_EQ(kind_of(a), GetParam());
    EXPECT_EQ(input_dim(a), 3u);

    KvDocument doc;
    save(doc, "", a);
    std::stringstream buffer;
    doc.write(buffer);
    const Model loaded = load_model(KvDocument::read(buffer));
    EXPECT_EQ(kind_of(loaded), GetParam());

    for (int q = 0; q < 200; ++q) {
        std::vector<double> x = {2 * standard_normal(rng), 2 * standard_normal(rng), 2 * standard_normal(rng)};
        EXPECT_EQ(predict(a, x), predict(b, x));
        EXPECT_EQ(scores(a, x), scores(b, x));
        EXPECT_EQ(predict(a, x), predict(loaded, x));
        EXPECT_EQ(scores(a, x), scores(loaded, x));
        EXPECT_EQ(scores(a, x).size(), 3u);
    }
    EXPECT_GT(accuracy(a, train), 0.6);
}

TEST_P(ClassifierContract, RejectsWrongDimension) {
    Rng rng(72);
    const LabeledSet train = blobs({{0, 0}, {3, 3}}, 10, rng);
    ClassifierSpec spec = make_spec(GetParam());
    spec.mlp.epochs = 5;
    const Model m = fit(spec, train);
    EXPECT_THROW(predict(m, std::vector<double>{1.0}), Error);
}

INSTANTIATE_TEST_SUITE_P(All, ClassifierContract, ::testing::ValuesIn(kAllClassifiers),
                         [](const auto& info) { return std::string(to_string(info.param)); });

TEST(ModelFile, RejectsWrongTypeAndVersion) {
    KvDocument doc;
    doc.put("model_type", "qda");
    doc.put("schema_version", "99");
    EXPECT_THROW(load_model(doc), Error);
    KvDocument other;
    other.put("model_type", "banana");
    other.put("schema_version", "1");
    EXPECT_THROW(load_model(other), Error);
}
