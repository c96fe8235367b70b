#include "modrec/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "modrec/error.hpp"
#include "modrec/rng.hpp"

namespace modrec {

namespace {

const char* const kFeatureNames[3] = {"f1", "f2", "f3"};

double softplus(double t) noexcept { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double sigmoid(double t) noexcept {
    if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

double sign_of(int label) noexcept { return label ? 1.0 : -1.0; }

double dot(const Features& a, const Features& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void check_training_set(std::span<const Features> x, std::span<const int> y) {
    if (x.size() != y.size()) throw InvalidArgument("feature/label count mismatch");
    if (x.size() < 2) throw InvalidArgument("need at least 2 training rows");
    bool seen[2] = {false, false};
    for (int label : y) {
        if (label != 0 && label != 1) throw InvalidArgument("labels must be 0 or 1");
        seen[label] = true;
    }
    if (!seen[0] || !seen[1]) throw DataError("training set contains a single label");
}

}  // namespace

Features Standardizer::apply(const Features& x) const noexcept {
    Features out;
    for (int j = 0; j < 3; ++j) out[j] = (x[j] - mean[j]) / stddev[j];
    return out;
}

std::vector<Features> Standardizer::apply(std::span<const Features> xs) const {
    std::vector<Features> out(xs.size());
    std::transform(xs.begin(), xs.end(), out.begin(), [this](const Features& x) { return apply(x); });
    return out;
}

Standardizer fit_standardizer(std::span<const Features> rows) {
    if (rows.size() < 2) throw InvalidArgument("fit_standardizer: need at least 2 rows");
    Standardizer s;
    const double n = static_cast<double>(rows.size());
    for (int j = 0; j < 3; ++j) {
        double sum = 0.0;
        for (const auto& r : rows) sum += r[j];
        const double mean = sum / n;
        double ss = 0.0;
        for (const auto& r : rows) ss += (r[j] - mean) * (r[j] - mean);
        const double sd = std::sqrt(ss / (n - 1.0));
        if (!(sd > 0.0) || !std::isfinite(sd))
            throw DataError(fmt::format("feature column {} is constant or non-finite", kFeatureNames[j]));
        s.mean[j] = mean;
        s.stddev[j] = sd;
    }
    return s;
}

Standardizer fit_standardizer(std::span<const FeatureVector> rows) {
    std::vector<Features> x;
    x.reserve(rows.size());
    for (const auto& r : rows) x.push_back(r.values());
    return fit_standardizer(x);
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

double logreg_logit(double theta0, const Features& theta, const Features& x) noexcept {
    return theta0 + dot(theta, x);
}

// Sum form. Written in terms of s*z so that flipping every label and
// negating theta gives bit-identical values.
double log_likelihood_sum(double theta0, const Features& theta, std::span<const Features> x,
                          std::span<const int> y) {
    double l = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) l -= softplus(-sign_of(y[i]) * logreg_logit(theta0, theta, x[i]));
    return l;
}

std::array<double, 4> gradient_sum(double theta0, const Features& theta, std::span<const Features> x,
                                   std::span<const int> y) {
    std::array<double, 4> g{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double s = sign_of(y[i]);
        const double r = s * sigmoid(-s * logreg_logit(theta0, theta, x[i]));
        g[0] += r;
        for (int j = 0; j < 3; ++j) g[j + 1] += r * x[i][j];
    }
    return g;
}

}  // namespace

double logreg_log_likelihood(const LogRegModel& model, std::span<const Features> x, std::span<const int> y) {
    if (x.size() != y.size()) throw InvalidArgument("feature/label count mismatch");
    return log_likelihood_sum(model.theta0, model.theta, x, y);
}

std::array<double, 4> logreg_gradient(const LogRegModel& model, std::span<const Features> x,
                                      std::span<const int> y) {
    if (x.size() != y.size()) throw InvalidArgument("feature/label count mismatch");
    return gradient_sum(model.theta0, model.theta, x, y);
}

LogRegModel train_logreg(std::span<const Features> x, std::span<const int> y, const LogRegConfig& config) {
    check_training_set(x, y);
    const double inv_m = 1.0 / static_cast<double>(x.size());
    LogRegModel model;
    double objective = log_likelihood_sum(model.theta0, model.theta, x, y) * inv_m;
    double step = config.initial_step;

    // Full-batch gradient ascent on the mean log-likelihood with Armijo backtracking.
    for (int it = 0; it < config.max_iterations; ++it) {
        auto g = gradient_sum(model.theta0, model.theta, x, y);
        double gmax = 0.0;
        double gnorm2 = 0.0;
        for (double& v : g) {
            v *= inv_m;
            gmax = std::max(gmax, std::abs(v));
            gnorm2 += v * v;
        }
        model.iterations = it;
        if (gmax <= config.gradient_tolerance) {
            model.converged = true;
            return model;
        }
        bool accepted = false;
        while (step > 1e-20) {
            const double t0 = model.theta0 + step * g[0];
            const Features t{model.theta[0] + step * g[1], model.theta[1] + step * g[2],
                             model.theta[2] + step * g[3]};
            const double candidate = log_likelihood_sum(t0, t, x, y) * inv_m;
            if (candidate >= objective + 1e-4 * step * gnorm2) {
                model.theta0 = t0;
                model.theta = t;
                objective = candidate;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return model;
        step = std::min(step * 2.0, 1e6);
    }
    model.iterations = config.max_iterations;
    return model;
}

// ---------------------------------------------------------------------------
// Linear SVM: SMO on the dual with second-order working-set selection.

double svm_primal_objective(const LinearSvmModel& model, std::span<const Features> x, std::span<const int> y) {
    if (x.size() != y.size()) throw InvalidArgument("feature/label count mismatch");
    double hinge = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        hinge += std::max(0.0, 1.0 - sign_of(y[i]) * (dot(model.weights, x[i]) + model.bias));
    return 0.5 * dot(model.weights, model.weights) + model.c * hinge;
}

LinearSvmModel train_svm(std::span<const Features> x, std::span<const int> y, const SvmConfig& config) {
    check_training_set(x, y);
    if (!(config.c > 0.0)) throw InvalidArgument("SVM C must be > 0");
    constexpr double kTau = 1e-12;
    const std::size_t n = x.size();
    const double c = config.c;

    std::vector<double> s(n);
    std::vector<double> kd(n);  // K_ii
    for (std::size_t i = 0; i < n; ++i) {
        s[i] = sign_of(y[i]);
        kd[i] = dot(x[i], x[i]);
    }
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad(n, -1.0);  // G_i = s_i w.x_i - 1
    Features w{};
    double alpha_sum = 0.0;

    LinearSvmModel model;
    model.c = c;
    const auto dual = [&] { return alpha_sum - 0.5 * dot(w, w); };
    const auto in_up = [&](std::size_t t) { return s[t] > 0 ? alpha[t] < c : alpha[t] > 0; };
    const auto in_low = [&](std::size_t t) { return s[t] > 0 ? alpha[t] > 0 : alpha[t] < c; };

    const long long max_iter = static_cast<long long>(config.max_epochs) * static_cast<long long>(n);
    long long iter = 0;
    for (; iter < max_iter; ++iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t)
            if (in_up(t) && -s[t] * grad[t] >= gmax) {
                gmax = -s[t] * grad[t];
                i = t;
            }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best_obj = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        if (i != n) {
            for (std::size_t t = 0; t < n; ++t) {
                if (!in_low(t)) continue;
                const double v = s[t] * grad[t];
                gmax2 = std::max(gmax2, v);
                const double grad_diff = gmax + v;
                if (grad_diff > 0) {
                    const double quad = std::max(kd[i] + kd[t] - 2.0 * dot(x[i], x[t]), kTau);
                    const double obj = -(grad_diff * grad_diff) / quad;
                    if (obj <= best_obj) {
                        best_obj = obj;
                        j = t;
                    }
                }
            }
        }
        if (i == n || j == n || gmax + gmax2 < config.tolerance) {
            model.converged = true;
            break;
        }

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double quad = std::max(kd[i] + kd[j] - 2.0 * dot(x[i], x[j]), kTau);
        if (s[i] != s[j]) {
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0) {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = diff; }
            } else if (alpha[i] < 0) {
                alpha[i] = 0; alpha[j] = -diff;
            }
            if (diff > 0) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = c - diff; }
            } else if (alpha[j] > c) {
                alpha[j] = c; alpha[i] = c + diff;
            }
        } else {
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) { alpha[i] = c; alpha[j] = sum - c; }
                if (alpha[j] > c) { alpha[j] = c; alpha[i] = sum - c; }
            } else {
                if (alpha[j] < 0) { alpha[j] = 0; alpha[i] = sum; }
                if (alpha[i] < 0) { alpha[i] = 0; alpha[j] = sum; }
            }
        }

        const double di = (alpha[i] - old_i) * s[i];
        const double dj = (alpha[j] - old_j) * s[j];
        for (int d = 0; d < 3; ++d) w[d] += di * x[i][d] + dj * x[j][d];
        alpha_sum += (alpha[i] - old_i) + (alpha[j] - old_j);
        for (std::size_t t = 0; t < n; ++t) grad[t] = s[t] * dot(w, x[t]) - 1.0;

        if ((iter + 1) % static_cast<long long>(n) == 0) model.dual_history.push_back(dual());
    }
    model.dual_history.push_back(dual());
    model.epochs = static_cast<int>((iter + static_cast<long long>(n) - 1) / static_cast<long long>(n));

    // Bias from the KKT conditions.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = s[t] * grad[t];
        if (alpha[t] >= c) {
            if (s[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0) {
            if (s[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
        } else {
            ++n_free;
            free_sum += yg;
        }
    }
    const double rho = n_free > 0 ? free_sum / static_cast<double>(n_free) : 0.5 * (ub + lb);
    model.weights = w;
    model.bias = -rho;
    return model;
}

// ---------------------------------------------------------------------------
// 3-10-1 network

std::array<double, kMlpParameterCount> MlpModel::parameters() const noexcept {
    std::array<double, kMlpParameterCount> p{};
    std::size_t o = 0;
    for (const auto& row : hidden_weights)
        for (double v : row) p[o++] = v;
    for (double v : hidden_bias) p[o++] = v;
    for (double v : output_weights) p[o++] = v;
    p[o] = output_bias;
    return p;
}

void MlpModel::set_parameters(const std::array<double, kMlpParameterCount>& p) noexcept {
    std::size_t o = 0;
    for (auto& row : hidden_weights)
        for (double& v : row) v = p[o++];
    for (double& v : hidden_bias) v = p[o++];
    for (double& v : output_weights) v = p[o++];
    output_bias = p[o];
}

MlpModel mlp_initialize(std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> in_layer(-1.0 / std::sqrt(3.0), 1.0 / std::sqrt(3.0));
    std::uniform_real_distribution<double> out_layer(-1.0 / std::sqrt(double(kHiddenUnits)),
                                                     1.0 / std::sqrt(double(kHiddenUnits)));
    MlpModel m;
    for (auto& row : m.hidden_weights)
        for (double& v : row) v = in_layer(rng);
    for (double& v : m.output_weights) v = out_layer(rng);
    return m;
}

namespace {

struct Forward {
    std::array<double, kHiddenUnits> hidden;
    double logit;
};

Forward forward(const MlpModel& m, const Features& x) noexcept {
    Forward f;
    f.logit = m.output_bias;
    for (int k = 0; k < kHiddenUnits; ++k) {
        f.hidden[k] = std::tanh(m.hidden_bias[k] + dot(m.hidden_weights[k], x));
        f.logit += m.output_weights[k] * f.hidden[k];
    }
    return f;
}

// Accumulates d(loss_i)/d(params) into g.
void backprop(const MlpModel& m, const Features& x, int label, std::array<double, kMlpParameterCount>& g) {
    const Forward f = forward(m, x);
    const double delta = sigmoid(f.logit) - label;
    constexpr std::size_t kBiasOffset = kHiddenUnits * 3;
    constexpr std::size_t kOutOffset = kBiasOffset + kHiddenUnits;
    for (int k = 0; k < kHiddenUnits; ++k) {
        g[kOutOffset + k] += delta * f.hidden[k];
        const double dh = delta * m.output_weights[k] * (1.0 - f.hidden[k] * f.hidden[k]);
        for (int j = 0; j < 3; ++j) g[k * 3 + j] += dh * x[j];
        g[kBiasOffset + k] += dh;
    }
    g[kMlpParameterCount - 1] += delta;
}

double mlp_sample_loss(const MlpModel& m, const Features& x, int label) noexcept {
    return softplus(-sign_of(label) * forward(m, x).logit);
}

}  // namespace

double mlp_logit(const MlpModel& model, const Features& x) noexcept { return forward(model, x).logit; }

double mlp_loss(const MlpModel& model, std::span<const Features> x, std::span<const int> y) {
    if (x.size() != y.size() || x.empty()) throw InvalidArgument("mlp_loss: bad data shape");
    double l = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) l += mlp_sample_loss(model, x[i], y[i]);
    return l / static_cast<double>(x.size());
}

std::array<double, kMlpParameterCount> mlp_gradient(const MlpModel& model, std::span<const Features> x,
                                                    std::span<const int> y) {
    if (x.size() != y.size() || x.empty()) throw InvalidArgument("mlp_gradient: bad data shape");
    std::array<double, kMlpParameterCount> g{};
    for (std::size_t i = 0; i < x.size(); ++i) backprop(model, x[i], y[i], g);
    for (double& v : g) v /= static_cast<double>(x.size());
    return g;
}

MlpModel train_mlp(std::span<const Features> x, std::span<const int> y, const MlpConfig& config) {
    check_training_set(x, y);
    if (config.epochs < 1 || config.batch_size < 1 || !(config.learning_rate > 0.0) ||
        !(config.validation_fraction >= 0.0 && config.validation_fraction < 1.0))
        throw InvalidArgument("invalid MLP configuration");

    Rng rng(derive_seed(config.seed, {0x4D4C50}));
    MlpModel model = mlp_initialize(derive_seed(config.seed, {0x494E4954}));

    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_val = static_cast<std::size_t>(std::round(config.validation_fraction * static_cast<double>(x.size())));
    std::vector<std::size_t> train(order.begin(), order.end() - static_cast<std::ptrdiff_t>(n_val));
    const std::vector<std::size_t> val(order.end() - static_cast<std::ptrdiff_t>(n_val), order.end());
    const std::vector<std::size_t>& selection = val.empty() ? train : val;

    const auto selection_loss = [&](const MlpModel& m) {
        double l = 0.0;
        for (std::size_t i : selection) l += mlp_sample_loss(m, x[i], y[i]);
        return l / static_cast<double>(selection.size());
    };

    MlpModel best = model;
    best.best_epoch = 0;
    best.best_validation_loss = selection_loss(model);

    const auto batch = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        std::shuffle(train.begin(), train.end(), rng);
        for (std::size_t start = 0; start < train.size(); start += batch) {
            const std::size_t end = std::min(start + batch, train.size());
            std::array<double, kMlpParameterCount> g{};
            for (std::size_t b = start; b < end; ++b) backprop(model, x[train[b]], y[train[b]], g);
            auto p = model.parameters();
            const double scale = config.learning_rate / static_cast<double>(end - start);
            for (int q = 0; q < kMlpParameterCount; ++q) p[q] -= scale * g[q];
            model.set_parameters(p);
        }
        const double loss = selection_loss(model);
        if (loss < best.best_validation_loss) {
            best = model;
            best.best_epoch = epoch;
            best.best_validation_loss = loss;
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Shared interface

std::string_view to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::SVM: return "SVM";
        case ClassifierKind::LR: return "LR";
        case ClassifierKind::NN: return "NN";
    }
    return "?";
}

ClassifierKind parse_classifier(std::string_view name) {
    for (auto k : {ClassifierKind::SVM, ClassifierKind::LR, ClassifierKind::NN})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown classifier '" + std::string(name) + "'");
}

Prediction predict(const ModelParams& model, const Features& x) {
    for (double v : x)
        if (!std::isfinite(v)) throw InvalidArgument("predict: non-finite input");
    return std::visit(
        [&x](const auto& m) -> Prediction {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearSvmModel>) {
                const double score = dot(m.weights, x) + m.bias;
                return {score > 0.0 ? 1 : 0, score};
            } else if constexpr (std::is_same_v<T, LogRegModel>) {
                const double z = logreg_logit(m.theta0, m.theta, x);
                return {z > 0.0 ? 1 : 0, sigmoid(z)};
            } else {
                const double z = mlp_logit(m, x);
                return {z > 0.0 ? 1 : 0, sigmoid(z)};
            }
        },
        model);
}

Prediction TrainedModel::classify(const Features& raw) const {
    return predict(params, standardizer.apply(raw));
}

TrainedModel train_model(ClassifierKind kind, std::span<const FeatureVector> rows, const TrainConfig& config) {
    TrainedModel tm;
    tm.kind = kind;
    tm.config = config;
    tm.n_train = rows.size();
    tm.standardizer = fit_standardizer(rows);
    std::vector<Features> x;
    std::vector<int> y;
    x.reserve(rows.size());
    y.reserve(rows.size());
    for (const auto& r : rows) {
        x.push_back(tm.standardizer.apply(r.values()));
        y.push_back(r.label);
    }
    switch (kind) {
        case ClassifierKind::SVM: tm.params = train_svm(x, y, config.svm); break;
        case ClassifierKind::LR: tm.params = train_logreg(x, y, config.logreg); break;
        case ClassifierKind::NN: tm.params = train_mlp(x, y, config.mlp); break;
    }
    return tm;
}

double accuracy(std::span<const int> predictions, std::span<const int> labels) {
    if (predictions.size() != labels.size()) throw InvalidArgument("accuracy: length mismatch");
    if (labels.empty()) throw InvalidArgument("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) correct += predictions[i] == labels[i];
    return static_cast<double>(correct) / static_cast<double>(labels.size());
}

double evaluate_accuracy(const TrainedModel& model, std::span<const FeatureVector> rows) {
    std::vector<int> pred;
    std::vector<int> labels;
    pred.reserve(rows.size());
    labels.reserve(rows.size());
    for (const auto& r : rows) {
        pred.push_back(model.classify(r.values()).label);
        labels.push_back(r.label);
    }
    return accuracy(pred, labels);
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

using nlohmann::json;

json config_json(const TrainConfig& c) {
    return {
        {"svm", {{"c", c.svm.c}, {"tolerance", c.svm.tolerance}, {"max_epochs", c.svm.max_epochs}}},
        {"logreg",
         {{"max_iterations", c.logreg.max_iterations},
          {"gradient_tolerance", c.logreg.gradient_tolerance},
          {"initial_step", c.logreg.initial_step}}},
        {"mlp",
         {{"epochs", c.mlp.epochs},
          {"batch_size", c.mlp.batch_size},
          {"learning_rate", c.mlp.learning_rate},
          {"validation_fraction", c.mlp.validation_fraction},
          {"seed", c.mlp.seed}}},
    };
}

TrainConfig config_from_json(const json& j) {
    TrainConfig c;
    c.svm.c = j.at("svm").at("c").get<double>();
    c.svm.tolerance = j.at("svm").at("tolerance").get<double>();
    c.svm.max_epochs = j.at("svm").at("max_epochs").get<int>();
    c.logreg.max_iterations = j.at("logreg").at("max_iterations").get<int>();
    c.logreg.gradient_tolerance = j.at("logreg").at("gradient_tolerance").get<double>();
    c.logreg.initial_step = j.at("logreg").at("initial_step").get<double>();
    c.mlp.epochs = j.at("mlp").at("epochs").get<int>();
    c.mlp.batch_size = j.at("mlp").at("batch_size").get<int>();
    c.mlp.learning_rate = j.at("mlp").at("learning_rate").get<double>();
    c.mlp.validation_fraction = j.at("mlp").at("validation_fraction").get<double>();
    c.mlp.seed = j.at("mlp").at("seed").get<std::uint64_t>();
    return c;
}

json params_json(const ModelParams& p) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LinearSvmModel>) {
                return {{"weights", m.weights}, {"bias", m.bias}, {"c", m.c},
                        {"epochs", m.epochs}, {"converged", m.converged}};
            } else if constexpr (std::is_same_v<T, LogRegModel>) {
                return {{"theta0", m.theta0}, {"theta", m.theta}, {"iterations", m.iterations},
                        {"converged", m.converged}};
            } else {
                return {{"hidden_weights", m.hidden_weights}, {"hidden_bias", m.hidden_bias},
                        {"output_weights", m.output_weights}, {"output_bias", m.output_bias},
                        {"best_epoch", m.best_epoch}, {"best_validation_loss", m.best_validation_loss}};
            }
        },
        p);
}

}  // namespace

nlohmann::json to_json(const TrainedModel& model) {
    return {
        {"format", "modrec-model"},
        {"version", 1},
        {"classifier", std::string(to_string(model.kind))},
        {"standardizer", {{"mean", model.standardizer.mean}, {"stddev", model.standardizer.stddev}}},
        {"params", params_json(model.params)},
        {"config", config_json(model.config)},
        {"n_train", model.n_train},
    };
}

TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format").get<std::string>() != "modrec-model" || j.at("version").get<int>() != 1)
            throw DataError("not a version-1 modrec model document");
        TrainedModel tm;
        tm.kind = parse_classifier(j.at("classifier").get<std::string>());
        tm.standardizer.mean = j.at("standardizer").at("mean").get<Features>();
        tm.standardizer.stddev = j.at("standardizer").at("stddev").get<Features>();
        tm.config = config_from_json(j.at("config"));
        tm.n_train = j.at("n_train").get<std::size_t>();
        const json& p = j.at("params");
        switch (tm.kind) {
            case ClassifierKind::SVM: {
                LinearSvmModel m;
                m.weights = p.at("weights").get<Features>();
                m.bias = p.at("bias").get<double>();
                m.c = p.at("c").get<double>();
                m.epochs = p.at("epochs").get<int>();
                m.converged = p.at("converged").get<bool>();
                tm.params = m;
                break;
            }
            case ClassifierKind::LR: {
                LogRegModel m;
                m.theta0 = p.at("theta0").get<double>();
                m.theta = p.at("theta").get<Features>();
                m.iterations = p.at("iterations").get<int>();
                m.converged = p.at("converged").get<bool>();
                tm.params = m;
                break;
            }
            case ClassifierKind::NN: {
                MlpModel m;
                m.hidden_weights = p.at("hidden_weights").get<decltype(m.hidden_weights)>();
                m.hidden_bias = p.at("hidden_bias").get<decltype(m.hidden_bias)>();
                m.output_weights = p.at("output_weights").get<decltype(m.output_weights)>();
                m.output_bias = p.at("output_bias").get<double>();
                m.best_epoch = p.at("best_epoch").get<int>();
                m.best_validation_loss = p.at("best_validation_loss").get<double>();
                tm.params = m;
                break;
            }
        }
        return tm;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("model document: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw DataError(std::string("model document: ") + e.what());
    }
}

void save_model(const std::string& path, const TrainedModel& model) {
    std::ofstream os(path);
    if (!os) throw IoError(path, "cannot open for writing");
    os << to_json(model).dump(2) << '\n';
    if (!os) throw IoError(path, "write failed");
}

TrainedModel load_model(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError(path, "cannot open for reading");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace modrec
