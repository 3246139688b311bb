#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tdgs/data_model.hpp"
#include "tdgs/labels.hpp"
#include "tdgs/ratio.hpp"

namespace tdgs {

/// Positive class is dissimilar.
struct ConfusionMatrix {
    std::uint64_t tp = 0;
    std::uint64_t fn = 0;
    std::uint64_t fp = 0;
    std::uint64_t tn = 0;

    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

/// predictions are +1/-1. Throws ValidationError on length mismatch or an
/// unknown truth tag.
ConfusionMatrix confusion(std::span<const int> predictions, std::span<const PairTag> truths);

/// sqrt(TP/(TP+FN) * TN/(TN+FP)). Throws ValidationError if either class is empty.
double g_mean(const ConfusionMatrix& cm);

struct EvalReport {
    ConfusionMatrix confusion;
    double recall_pos = 0.0;
    double recall_neg = 0.0;
    double g_mean = 0.0;
    Ratio class_structure;  // R_TDGS of the training set behind the classifier
};

EvalReport make_report(const ConfusionMatrix& cm, const Ratio& class_structure);

struct GroupedResult {
    Ratio class_structure;
    double mean_g_mean = 0.0;
    std::size_t count = 0;
};

/// Groups by exact class structure, ascending.
std::vector<GroupedResult> grouped_assessment(std::span<const EvalReport> reports);

/// `class_structure,mean_gmean,n_sets`
std::string grouped_to_csv(std::span<const GroupedResult> groups);

using PairKey = std::pair<std::uint32_t, std::uint32_t>;

/// Channel c is flagged when its dissimilar verdicts make up more than
/// `threshold` of its N-1 pairs, threshold in (0, 1). Predictions must cover
/// every pair (a < b).
std::set<std::uint32_t> flag_incorrect_channels(const Shot& shot, const std::map<PairKey, int>& pair_predictions,
                                                double threshold = 0.5);

}  // namespace tdgs
