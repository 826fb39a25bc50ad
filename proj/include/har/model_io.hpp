#pragma once

// Plain-text key=value persistence for models, transforms and reductions.
//
// Every document starts with `model_type=<type>` and `schema_version=1`.
// Doubles are written in shortest round-trip form, so a reloaded model
// predicts bit-identically. Nested objects use dotted key prefixes.

#include <har/pipeline.hpp>

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace har {

inline constexpr int kSchemaVersion = 1;

class KvDocument {
public:
    void put(const std::string& key, std::string value) {
        require(key.find('=') == std::string::npos && key.find('\n') == std::string::npos, "invalid_argument",
                "kv: invalid key '" + key + "'");
        if (!index_.contains(key)) {
            order_.push_back(key);
        }
        index_[key] = std::move(value);
    }

    void put_double(const std::string& key, double v) { put(key, format_double(v)); }
    void put_size(const std::string& key, std::size_t v) { put(key, std::to_string(v)); }

    void put_vector(const std::string& key, std::span<const double> values) {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) {
                s += ' ';
            }
            s += format_double(values[i]);
        }
        put(key, std::move(s));
    }

    template <typename Int>
    void put_ints(const std::string& key, std::span<const Int> values) {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i > 0) {
                s += ' ';
            }
            s += std::to_string(values[i]);
        }
        put(key, std::move(s));
    }

    void put_matrix(const std::string& key, const Matrix& m) {
        put_size(key + ".rows", m.rows);
        put_size(key + ".cols", m.cols);
        put_vector(key + ".data", m.data);
    }

    bool has(const std::string& key) const { return index_.contains(key); }

    const std::string& get(const std::string& key) const {
        const auto it = index_.find(key);
        require(it != index_.end(), "parse_error", "kv: missing key '" + key + "'");
        return it->second;
    }

    double get_double(const std::string& key) const { return parse_double(get(key)); }

    std::size_t get_size(const std::string& key) const {
        const long long v = parse_integer(get(key));
        require(v >= 0, "parse_error", "kv: negative count for '" + key + "'");
        return static_cast<std::size_t>(v);
    }

    std::vector<double> get_vector(const std::string& key) const {
        std::vector<double> out;
        for (auto token : split(get(key), ' ')) {
            if (!token.empty()) {
                out.push_back(parse_double(token));
            }
        }
        return out;
    }

    std::vector<long long> get_ints(const std::string& key) const {
        std::vector<long long> out;
        for (auto token : split(get(key), ' ')) {
            if (!token.empty()) {
                out.push_back(parse_integer(token));
            }
        }
        return out;
    }

    Matrix get_matrix(const std::string& key) const {
        Matrix m(get_size(key + ".rows"), get_size(key + ".cols"));
        m.data = get_vector(key + ".data");
        require(m.data.size() == m.rows * m.cols, "parse_error", "kv: matrix '" + key + "' has wrong element count");
        return m;
    }

    void write(std::ostream& out) const {
        for (const auto& key : order_) {
            out << key << '=' << index_.at(key) << '\n';
        }
    }

    static KvDocument read(std::istream& in) {
        KvDocument doc;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            const auto t = trim(line);
            if (t.empty() || t.front() == '#') {
                continue;
            }
            const auto eq = t.find('=');
            require(eq != std::string_view::npos, "parse_error", "kv: missing '=' on line " + std::to_string(line_no));
            doc.put(std::string(t.substr(0, eq)), std::string(t.substr(eq + 1)));
        }
        return doc;
    }

private:
    std::vector<std::string> order_;
    std::map<std::string, std::string, std::less<>> index_;
};

namespace io_detail {

inline void header(KvDocument& doc, const std::string& prefix, std::string_view type) {
    doc.put(prefix + "model_type", std::string(type));
    doc.put(prefix + "schema_version", std::to_string(kSchemaVersion));
}

inline void expect_header(const KvDocument& doc, const std::string& prefix, std::string_view type) {
    require(doc.get(prefix + "model_type") == type, "parse_error",
            "expected model_type '" + std::string(type) + "', found '" + doc.get(prefix + "model_type") + "'");
    require(doc.get(prefix + "schema_version") == std::to_string(kSchemaVersion), "parse_error",
            "unsupported schema_version " + doc.get(prefix + "schema_version"));
}

template <typename T>
std::vector<T> to_unsigned(const std::vector<long long>& values) {
    std::vector<T> out;
    for (long long v : values) {
        require(v >= 0, "parse_error", "negative index in model file");
        out.push_back(static_cast<T>(v));
    }
    return out;
}

}  // namespace io_detail

inline void save(KvDocument& doc, const std::string& p, const Standardizer& s) {
    doc.put_vector(p + "mean", s.mean);
    doc.put_vector(p + "stddev", s.stddev);
}

inline Standardizer load_standardizer(const KvDocument& doc, const std::string& p) {
    Standardizer s{doc.get_vector(p + "mean"), doc.get_vector(p + "stddev")};
    require(s.mean.size() == s.stddev.size(), "parse_error", "standardizer: length mismatch");
    return s;
}

inline void save(KvDocument& doc, const std::string& p, const QdaModel& m) {
    io_detail::header(doc, p, "qda");
    doc.put_size(p + "dim", m.dim);
    doc.put_size(p + "classes", m.classes.size());
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const std::string k = p + "class." + std::to_string(c) + ".";
        doc.put_vector(k + "mean", m.classes[c].mean);
        doc.put_matrix(k + "covariance", m.classes[c].covariance);
        doc.put_double(k + "prior", m.classes[c].prior);
        doc.put_double(k + "lambda", m.classes[c].lambda);
    }
}

inline QdaModel load_qda(const KvDocument& doc, const std::string& p) {
    io_detail::expect_header(doc, p, "qda");
    QdaModel m;
    m.dim = doc.get_size(p + "dim");
    m.classes.resize(doc.get_size(p + "classes"));
    for (std::size_t c = 0; c < m.classes.size(); ++c) {
        const std::string k = p + "class." + std::to_string(c) + ".";
        auto& cls = m.classes[c];
        cls.mean = doc.get_vector(k + "mean");
        cls.covariance = doc.get_matrix(k + "covariance");
        cls.prior = doc.get_double(k + "prior");
        cls.lambda = doc.get_double(k + "lambda");
        require(cls.mean.size() == m.dim && cls.covariance.rows == m.dim && cls.covariance.cols == m.dim,
                "parse_error", "qda: class parameter shape mismatch");
        finalize_qda_class(cls);
    }
    return m;
}

inline void save(KvDocument& doc, const std::string& p, const KnnModel& m) {
    io_detail::header(doc, p, "knn");
    doc.put_size(p + "k", m.k);
    doc.put_size(p + "class_count", m.class_count);
    save(doc, p + "standardizer.", m.standardizer);
    doc.put_matrix(p + "train", m.train);
    doc.put_ints<Label>(p + "labels", m.labels);
}

inline KnnModel load_knn(const KvDocument& doc, const std::string& p) {
    io_detail::expect_header(doc, p, "knn");
    KnnModel m;
    m.k = doc.get_size(p + "k");
    m.class_count = doc.get_size(p + "class_count");
    m.standardizer = load_standardizer(doc, p + "standardizer.");
    m.train = doc.get_matrix(p + "train");
    for (long long l : doc.get_ints(p + "labels")) {
        m.labels.push_back(static_cast<Label>(l));
    }
    require(m.labels.size() == m.train.rows && m.k >= 1 && m.k <= m.train.rows, "parse_error",
            "knn: inconsistent model file");
    return m;
}

inline void save(KvDocument& doc, const std::string& p, const SvmOvaModel& m) {
    io_detail::header(doc, p, "svm_ova");
    doc.put_size(p + "dim", m.dim);
    doc.put_double(p + "sigma", m.sigma);
    doc.put_size(p + "classes", m.models.size());
    for (std::size_t c = 0; c < m.models.size(); ++c) {
        const auto& b = m.models[c];
        const std::string k = p + "binary." + std::to_string(c) + ".";
        doc.put(k + "target", std::to_string(b.target));
        doc.put_double(k + "sigma", b.sigma);
        doc.put_double(k + "c_box", b.c_box);
        doc.put_double(k + "bias", b.bias);
        doc.put(k + "converged", b.converged ? "1" : "0");
        doc.put_size(k + "iterations", b.iterations);
        doc.put_double(k + "max_violation", b.max_violation);
        doc.put_vector(k + "coefficients", b.coefficients);
        doc.put_matrix(k + "support_vectors", b.support_vectors);
    }
}

inline SvmOvaModel load_svm(const KvDocument& doc, const std::string& p) {
    io_detail::expect_header(doc, p, "svm_ova");
    SvmOvaModel m;
    m.dim = doc.get_size(p + "dim");
    m.sigma = doc.get_double(p + "sigma");
    const std::size_t classes = doc.get_size(p + "classes");
    for (std::size_t c = 0; c < classes; ++c) {
        const std::string k = p + "binary." + std::to_string(c) + ".";
        SvmBinaryModel b;
        b.target = static_cast<Label>(parse_integer(doc.get(k + "target")));
        b.sigma = doc.get_double(k + "sigma");
        b.c_box = doc.get_double(k + "c_box");
        b.bias = doc.get_double(k + "bias");
        b.converged = doc.get(k + "converged") == "1";
        b.iterations = doc.get_size(k + "iterations");
        b.max_violation = doc.get_double(k + "max_violation");
        b.coefficients = doc.get_vector(k + "coefficients");
        b.support_vectors = doc.get_matrix(k + "support_vectors");
        require(b.coefficients.size() == b.support_vectors.rows, "parse_error", "svm: coefficient count mismatch");
        m.models.push_back(std::move(b));
    }
    return m;
}

inline void save(KvDocument& doc, const std::string& p, const MlpModel& m) {
    io_detail::header(doc, p, "mlp");
    doc.put_size(p + "inputs", m.inputs);
    doc.put_size(p + "hidden", m.hidden);
    doc.put_size(p + "outputs", m.outputs);
    doc.put_size(p + "params.epochs", m.params.epochs);
    doc.put_double(p + "params.learning_rate", m.params.learning_rate);
    doc.put_double(p + "params.momentum", m.params.momentum);
    doc.put_size(p + "params.batch_size", m.params.batch_size);
    doc.put(p + "params.seed", std::to_string(m.params.seed));
    doc.put_matrix(p + "w1", m.w1);
    doc.put_vector(p + "b1", m.b1);
    doc.put_matrix(p + "w2", m.w2);
    doc.put_vector(p + "b2", m.b2);
    doc.put_vector(p + "loss_history", m.loss_history);
}

inline MlpModel load_mlp(const KvDocument& doc, const std::string& p) {
    io_detail::expect_header(doc, p, "mlp");
    MlpModel m;
    m.inputs = doc.get_size(p + "inputs");
    m.hidden = doc.get_size(p + "hidden");
    m.outputs = doc.get_size(p + "outputs");
    m.params.hidden = m.hidden;
    m.params.epochs = doc.get_size(p + "params.epochs");
    m.params.learning_rate = doc.get_double(p + "params.learning_rate");
    m.params.momentum = doc.get_double(p + "params.momentum");
    m.params.batch_size = doc.get_size(p + "params.batch_size");
    m.params.seed = static_cast<std::uint64_t>(std::stoull(doc.get(p + "params.seed")));
    m.w1 = doc.get_matrix(p + "w1");
    m.b1 = doc.get_vector(p + "b1");
    m.w2 = doc.get_matrix(p + "w2");
    m.b2 = doc.get_vector(p + "b2");
    m.loss_history = doc.get_vector(p + "loss_history");
    require(m.w1.rows == m.hidden && m.w1.cols == m.inputs && m.b1.size() == m.hidden && m.w2.rows == m.outputs &&
                m.w2.cols == m.hidden && m.b2.size() == m.outputs,
            "parse_error", "mlp: weight shape mismatch");
    return m;
}

inline void save(KvDocument& doc, const std::string& p, const Model& model) {
    std::visit([&](const auto& m) { save(doc, p, m); }, model);
}

inline Model load_model(const KvDocument& doc, const std::string& p = "") {
    const std::string& type = doc.get(p + "model_type");
    if (type == "qda") return load_qda(doc, p);
    if (type == "knn") return load_knn(doc, p);
    if (type == "svm_ova") return load_svm(doc, p);
    if (type == "mlp") return load_mlp(doc, p);
    throw Error("parse_error", "unknown model_type '" + type + "'");
}

inline void save(KvDocument& doc, const std::string& p, const LdaProjection& proj) {
    io_detail::header(doc, p, "lda_projection");
    doc.put_vector(p + "mean", proj.mean);
    doc.put_matrix(p + "matrix", proj.matrix);
    doc.put_vector(p + "eigenvalues", proj.eigenvalues);
}

inline LdaProjection load_lda(const KvDocument& doc, const std::string& p = "") {
    io_detail::expect_header(doc, p, "lda_projection");
    LdaProjection proj{doc.get_vector(p + "mean"), doc.get_matrix(p + "matrix"), doc.get_vector(p + "eigenvalues")};
    require(proj.mean.size() == proj.matrix.rows && proj.eigenvalues.size() == proj.matrix.cols, "parse_error",
            "lda: shape mismatch");
    return proj;
}

inline void save(KvDocument& doc, const std::string& p, const FeatureSubset& s,
                 std::span<const std::string> names = {}) {
    io_detail::header(doc, p, "feature_subset");
    doc.put_ints<std::size_t>(p + "indices", s.indices);
    doc.put_vector(p + "scores", s.scores);
    if (!names.empty()) {
        std::string joined;
        for (std::size_t i : s.indices) {
            if (!joined.empty()) {
                joined += ' ';
            }
            joined += i < names.size() ? names[i] : std::to_string(i);
        }
        doc.put(p + "names", joined);
    }
}

inline FeatureSubset load_subset(const KvDocument& doc, const std::string& p = "") {
    io_detail::expect_header(doc, p, "feature_subset");
    FeatureSubset s;
    s.indices = io_detail::to_unsigned<std::size_t>(doc.get_ints(p + "indices"));
    s.scores = doc.get_vector(p + "scores");
    require(s.indices.size() == s.scores.size(), "parse_error", "feature_subset: length mismatch");
    return s;
}

inline void save(KvDocument& doc, const std::string& p, const FeatureTransform& t) {
    io_detail::header(doc, p, "feature_transform");
    doc.put(p + "space", std::string(to_string(t.space)));
    save(doc, p + "standardizer.", t.standardizer);
    if (t.lda) {
        save(doc, p + "lda.", *t.lda);
    }
    if (t.subset) {
        save(doc, p + "subset.", *t.subset);
    }
}

inline FeatureTransform load_transform(const KvDocument& doc, const std::string& p) {
    io_detail::expect_header(doc, p, "feature_transform");
    FeatureTransform t;
    t.space = parse_feature_space(doc.get(p + "space"));
    t.standardizer = load_standardizer(doc, p + "standardizer.");
    if (t.space == FeatureSpace::lda) {
        t.lda = load_lda(doc, p + "lda.");
    } else if (t.space == FeatureSpace::sfs) {
        t.subset = load_subset(doc, p + "subset.");
    }
    return t;
}

inline KvDocument save_pipeline(const Pipeline& pipeline) {
    KvDocument doc;
    io_detail::header(doc, "", "pipeline");
    save(doc, "transform.", pipeline.transform);
    save(doc, "model.", pipeline.model);
    return doc;
}

inline Pipeline load_pipeline(const KvDocument& doc) {
    io_detail::expect_header(doc, "", "pipeline");
    return {load_transform(doc, "transform."), load_model(doc, "model.")};
}

}  // namespace har
