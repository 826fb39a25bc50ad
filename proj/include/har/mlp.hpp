#pragma once

// One-hidden-layer perceptron (sigmoid hidden units, softmax output)
// trained by backpropagation with momentum.

#include <har/labeled_set.hpp>
#include <har/qda.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace har {

struct MlpParams {
    std::size_t hidden = 16;
    std::size_t epochs = 300;
    double learning_rate = 0.1;
    double momentum = 0.9;
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
};

struct MlpModel {
    std::size_t inputs = 0;
    std::size_t hidden = 0;
    std::size_t outputs = 0;
    Matrix w1;  // hidden x inputs
    std::vector<double> b1;
    Matrix w2;  // outputs x hidden
    std::vector<double> b2;
    MlpParams params;
    std::vector<double> loss_history;  // full-data loss after each epoch

    std::size_t parameter_count() const { return w1.data.size() + b1.size() + w2.data.size() + b2.size(); }
};

namespace detail {

inline double sigmoid(double v) {
    return 1.0 / (1.0 + std::exp(-v));
}

/// Visits every parameter in the fixed order w1, b1, w2, b2.
template <typename Model, typename F>
void for_each_parameter(Model& model, F&& f) {
    for (auto& v : model.w1.data) f(v);
    for (auto& v : model.b1) f(v);
    for (auto& v : model.w2.data) f(v);
    for (auto& v : model.b2) f(v);
}

struct MlpActivations {
    std::vector<double> hidden;
    std::vector<double> output;
};

inline MlpActivations mlp_forward(const MlpModel& m, std::span<const double> x) {
    MlpActivations a;
    a.hidden.resize(m.hidden);
    for (std::size_t h = 0; h < m.hidden; ++h) {
        double z = m.b1[h];
        for (std::size_t i = 0; i < m.inputs; ++i) {
            z += m.w1(h, i) * x[i];
        }
        a.hidden[h] = sigmoid(z);
    }
    a.output.resize(m.outputs);
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < m.outputs; ++o) {
        double z = m.b2[o];
        for (std::size_t h = 0; h < m.hidden; ++h) {
            z += m.w2(o, h) * a.hidden[h];
        }
        a.output[o] = z;
        peak = std::max(peak, z);
    }
    double total = 0.0;
    for (double& v : a.output) {
        v = std::exp(v - peak);
        total += v;
    }
    for (double& v : a.output) {
        v /= total;
    }
    return a;
}

}  // namespace detail

inline std::vector<double> mlp_parameters(const MlpModel& model) {
    std::vector<double> p;
    p.reserve(model.parameter_count());
    detail::for_each_parameter(model, [&](const double& v) { p.push_back(v); });
    return p;
}

inline void set_mlp_parameters(MlpModel& model, std::span<const double> p) {
    require(p.size() == model.parameter_count(), "dimension_mismatch", "mlp: parameter count mismatch");
    std::size_t i = 0;
    detail::for_each_parameter(model, [&](double& v) { v = p[i++]; });
}

/// Uniform Glorot initialization in +-sqrt(6/(fan_in+fan_out)); biases zero.
inline MlpModel init_mlp(std::size_t inputs, std::size_t hidden, std::size_t outputs, std::uint64_t seed) {
    require(inputs >= 1 && hidden >= 1 && outputs >= 1, "invalid_argument", "mlp: layer sizes must be positive");
    MlpModel m;
    m.inputs = inputs;
    m.hidden = hidden;
    m.outputs = outputs;
    m.w1 = Matrix(hidden, inputs);
    m.b1.assign(hidden, 0.0);
    m.w2 = Matrix(outputs, hidden);
    m.b2.assign(outputs, 0.0);
    Rng rng(seed);
    const double r1 = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    for (double& v : m.w1.data) {
        v = (2.0 * uniform01(rng) - 1.0) * r1;
    }
    const double r2 = std::sqrt(6.0 / static_cast<double>(hidden + outputs));
    for (double& v : m.w2.data) {
        v = (2.0 * uniform01(rng) - 1.0) * r2;
    }
    return m;
}

inline std::vector<double> mlp_posteriors(const MlpModel& model, std::span<const double> x) {
    require(x.size() == model.inputs, "dimension_mismatch", "mlp: input dimension mismatch");
    return detail::mlp_forward(model, x).output;
}

inline Label predict_mlp(const MlpModel& model, std::span<const double> x) {
    return static_cast<Label>(argmax(mlp_posteriors(model, x)));
}

/// Mean cross-entropy over `rows` and its gradient in parameter order.
inline double mlp_loss_gradient(const MlpModel& m, const LabeledSet& data, std::span<const std::size_t> rows,
                                std::vector<double>* gradient) {
    MlpModel g;
    if (gradient) {
        g.w1 = Matrix(m.hidden, m.inputs);
        g.b1.assign(m.hidden, 0.0);
        g.w2 = Matrix(m.outputs, m.hidden);
        g.b2.assign(m.outputs, 0.0);
    }
    double loss = 0.0;
    std::vector<double> delta_out(m.outputs);
    std::vector<double> delta_hidden(m.hidden);
    for (std::size_t r : rows) {
        const auto x = data.x.row(r);
        const auto target = static_cast<std::size_t>(data.y[r]);
        const auto act = detail::mlp_forward(m, x);
        loss -= std::log(std::max(act.output[target], std::numeric_limits<double>::min()));
        if (!gradient) {
            continue;
        }
        for (std::size_t o = 0; o < m.outputs; ++o) {
            delta_out[o] = act.output[o] - (o == target ? 1.0 : 0.0);
            g.b2[o] += delta_out[o];
            for (std::size_t h = 0; h < m.hidden; ++h) {
                g.w2(o, h) += delta_out[o] * act.hidden[h];
            }
        }
        for (std::size_t h = 0; h < m.hidden; ++h) {
            double back = 0.0;
            for (std::size_t o = 0; o < m.outputs; ++o) {
                back += m.w2(o, h) * delta_out[o];
            }
            delta_hidden[h] = back * act.hidden[h] * (1.0 - act.hidden[h]);
            g.b1[h] += delta_hidden[h];
            for (std::size_t i = 0; i < m.inputs; ++i) {
                g.w1(h, i) += delta_hidden[h] * x[i];
            }
        }
    }
    const double scale = 1.0 / static_cast<double>(rows.size());
    if (gradient) {
        *gradient = mlp_parameters(g);
        for (double& v : *gradient) {
            v *= scale;
        }
    }
    return loss * scale;
}

/// Mini-batch gradient descent with momentum on the cross-entropy loss.
/// Deterministic given `params.seed`.
inline MlpModel fit_mlp(const LabeledSet& train, const MlpParams& params = {}) {
    train.validate();
    require(params.hidden >= 1, "invalid_argument", "mlp: hidden must be at least 1");
    require(params.epochs >= 1, "invalid_argument", "mlp: epochs must be at least 1");
    require(params.batch_size >= 1, "invalid_argument", "mlp: batch_size must be at least 1");

    MlpModel model = init_mlp(train.dim(), params.hidden, train.class_count, params.seed);
    model.params = params;

    Rng rng(mix_seed(params.seed, 1));
    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<std::size_t> all = order;
    std::vector<double> weights = mlp_parameters(model);
    std::vector<double> velocity(weights.size(), 0.0);
    std::vector<double> grad;

    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
        shuffle(order, rng);
        for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
            const std::size_t end = std::min(order.size(), start + params.batch_size);
            mlp_loss_gradient(model, train, std::span<const std::size_t>(order).subspan(start, end - start), &grad);
            for (std::size_t p = 0; p < weights.size(); ++p) {
                velocity[p] = params.momentum * velocity[p] - params.learning_rate * grad[p];
                weights[p] += velocity[p];
            }
            set_mlp_parameters(model, weights);
        }
        const double loss = mlp_loss_gradient(model, train, all, nullptr);
        require(std::isfinite(loss) && all_finite(weights), "numerical", "mlp: training diverged (non-finite loss or weights) at epoch " + std::to_string(epoch));
        model.loss_history.push_back(loss);
    }
    return model;
}

}  // namespace har
