#pragma once

// Binary classifiers over the three lag-product features: soft-margin
// linear SVM, logistic regression and a 3-10-1 tanh/sigmoid network.
// Labels are 0 (linear modulation) / 1 (CPFSK) throughout the public API.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "modrec/features.hpp"

namespace modrec {

struct Standardizer {
    Features mean{};
    Features stddev{};

    Features apply(const Features& x) const noexcept;
    std::vector<Features> apply(std::span<const Features> xs) const;
};

// Per-column mean and 1/(n-1) standard deviation over the training rows.
Standardizer fit_standardizer(std::span<const Features> rows);
Standardizer fit_standardizer(std::span<const FeatureVector> rows);

// ---------------------------------------------------------------------------
// Logistic regression

struct LogRegConfig {
    int max_iterations = 10000;
    double gradient_tolerance = 1e-6;  // max-norm of the mean log-likelihood gradient
    double initial_step = 1.0;
};

struct LogRegModel {
    double theta0 = 0.0;
    Features theta{};
    int iterations = 0;
    bool converged = false;
};

// L(theta) = sum_i y_i log h(x_i) + (1 - y_i) log(1 - h(x_i))
double logreg_log_likelihood(const LogRegModel& model, std::span<const Features> x, std::span<const int> y);
// dL/d(theta0, theta1, theta2, theta3)
std::array<double, 4> logreg_gradient(const LogRegModel& model, std::span<const Features> x,
                                      std::span<const int> y);

LogRegModel train_logreg(std::span<const Features> x, std::span<const int> y, const LogRegConfig& config = {});

// ---------------------------------------------------------------------------
// Linear SVM

struct SvmConfig {
    double c = 1.0;
    double tolerance = 1e-6;  // maximal KKT violation at termination
    int max_epochs = 10000;   // one epoch = n pair updates
};

struct LinearSvmModel {
    Features weights{};
    double bias = 0.0;
    double c = 1.0;
    int epochs = 0;
    bool converged = false;
    // Dual objective after each epoch and at termination; non-decreasing.
    std::vector<double> dual_history;
};

// (1/2)|w|^2 + C sum_i max(0, 1 - s_i (w.x_i + b)), s_i = 2 y_i - 1
double svm_primal_objective(const LinearSvmModel& model, std::span<const Features> x, std::span<const int> y);

LinearSvmModel train_svm(std::span<const Features> x, std::span<const int> y, const SvmConfig& config = {});

// ---------------------------------------------------------------------------
// 3-10-1 network

inline constexpr int kHiddenUnits = 10;
inline constexpr int kMlpParameterCount = kHiddenUnits * 3 + kHiddenUnits + kHiddenUnits + 1;

struct MlpConfig {
    int epochs = 200;
    int batch_size = 32;
    double learning_rate = 0.1;
    double validation_fraction = 0.1;
    std::uint64_t seed = 1;
};

struct MlpModel {
    std::array<std::array<double, 3>, kHiddenUnits> hidden_weights{};
    std::array<double, kHiddenUnits> hidden_bias{};
    std::array<double, kHiddenUnits> output_weights{};
    double output_bias = 0.0;
    int best_epoch = 0;
    double best_validation_loss = 0.0;

    std::array<double, kMlpParameterCount> parameters() const noexcept;
    void set_parameters(const std::array<double, kMlpParameterCount>& p) noexcept;
};

MlpModel mlp_initialize(std::uint64_t seed);
// Pre-sigmoid output.
double mlp_logit(const MlpModel& model, const Features& x) noexcept;
// Mean binary cross-entropy.
double mlp_loss(const MlpModel& model, std::span<const Features> x, std::span<const int> y);
std::array<double, kMlpParameterCount> mlp_gradient(const MlpModel& model, std::span<const Features> x,
                                                    std::span<const int> y);

MlpModel train_mlp(std::span<const Features> x, std::span<const int> y, const MlpConfig& config = {});

// ---------------------------------------------------------------------------
// Shared interface

enum class ClassifierKind { SVM, LR, NN };

std::string_view to_string(ClassifierKind kind);
ClassifierKind parse_classifier(std::string_view name);

struct Prediction {
    int label = 0;
    double score = 0.0;  // w.x + b for the SVM, sigmoid output otherwise
};

using ModelParams = std::variant<LinearSvmModel, LogRegModel, MlpModel>;

// x must already be standardized. Exact threshold ties go to label 0.
Prediction predict(const ModelParams& model, const Features& x);

struct TrainConfig {
    SvmConfig svm;
    LogRegConfig logreg;
    MlpConfig mlp;
};

struct TrainedModel {
    ClassifierKind kind = ClassifierKind::LR;
    Standardizer standardizer;
    ModelParams params;
    TrainConfig config;
    std::size_t n_train = 0;

    // Standardizes raw features, then predicts.
    Prediction classify(const Features& raw) const;
};

// Fits the standardizer on the training rows and trains the chosen model.
TrainedModel train_model(ClassifierKind kind, std::span<const FeatureVector> rows, const TrainConfig& config = {});

double accuracy(std::span<const int> predictions, std::span<const int> labels);
double evaluate_accuracy(const TrainedModel& model, std::span<const FeatureVector> rows);

nlohmann::json to_json(const TrainedModel& model);
TrainedModel model_from_json(const nlohmann::json& j);
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

}  // namespace modrec
