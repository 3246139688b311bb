#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace tdgs {

struct TrainConfig {
    double penalty_c = 20.0;
    double kkt_tol = 1e-3;
    std::uint32_t max_passes = 50;
    std::uint64_t seed = 0;
};

/// Per-feature z-score parameters. Constant features get stddev 1.
struct Standardization {
    std::vector<double> mean;
    std::vector<double> stddev;

    static Standardization fit(std::span<const std::vector<double>> x);
    std::vector<double> apply(std::span<const double> x) const;
};

struct SupportMultiplier {
    std::size_t index = 0;
    double alpha = 0.0;
};

/// Linear soft-margin SVM: f(x) = w . standardize(x) + b.
struct SvmModel {
    std::vector<double> weights;
    double bias = 0.0;
    std::vector<SupportMultiplier> alphas;  // nonzero multipliers only
    Standardization standardization;
    TrainConfig config;

    std::size_t dimension() const { return weights.size(); }
};

struct TrainStats {
    std::size_t iterations = 0;     // accepted pair updates
    std::size_t full_passes = 0;
    bool objective_monotone = true;  // dual objective never decreased on an update
};

/// Trains on labels in {+1 dissimilar, -1 similar} by sequential minimal
/// optimization. Throws ValidationError on single-class input, mismatched
/// dimensions or labels outside {+1, -1}.
SvmModel train(std::span<const std::vector<double>> x, std::span<const int> y,
               const TrainConfig& config = {}, TrainStats* stats = nullptr);

double decision_value(const SvmModel& model, std::span<const double> x);

/// Sign of the decision value; zero maps to +1.
int predict(const SvmModel& model, std::span<const double> x);

/// Dual objective sum(alpha) - 1/2 |w|^2 of the model's multipliers.
double dual_objective(const SvmModel& model);

std::string to_json(const SvmModel& model);
SvmModel svm_model_from_json(const std::string& text);

}  // namespace tdgs
