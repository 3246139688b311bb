#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tdgs/evaluation.hpp"
#include "tdgs/pairing.hpp"
#include "tdgs/svm_smo.hpp"

namespace tdgs {

/// Unordered subsets of {0..n-1} with k elements, lexicographic.
std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t k);

/// `count` distinct k-subsets drawn with a seeded generator, each sorted,
/// returned in lexicographic order.
std::vector<std::vector<std::size_t>> sample_subsets(std::size_t n, std::size_t k, std::size_t count,
                                                     std::uint64_t seed);

/// Exact C(n, k), saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Pair samples with similar/dissimilar tags converted to +1/-1 rows.
struct LabeledSet {
    std::vector<std::vector<double>> x;
    std::vector<int> y;
};

/// Drops unknown-tagged samples.
LabeledSet labeled_rows(std::span<const PairSample> samples);

/// Trains on `train_samples` (all tags known) and evaluates on the known-tag
/// part of `validation`. class_structure is R_TDGS of the training samples.
EvalReport train_and_evaluate(std::span<const PairSample> train_samples, std::span<const PairSample> validation,
                              const TrainConfig& config);

struct SweepConfig {
    std::size_t subset_size = 7;
    std::size_t cap = 2000;
    TrainConfig train;
    FeatureConfig features;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

struct SweepResult {
    std::size_t subsets_visited = 0;
    std::size_t classifiers_trained = 0;
    std::size_t skipped_single_class = 0;
    bool sampled = false;  // true when C(pool, subset) exceeded the cap
    std::vector<std::vector<std::size_t>> subsets;
    std::vector<EvalReport> reports;  // one per trained classifier, subset order
    std::vector<GroupedResult> groups;
};

/// Trains one classifier per pool subset and scores each on the same
/// validation shots. Results do not depend on the thread count.
SweepResult run_sweep(std::span<const Shot> pool, std::span<const Shot> validation, const SweepConfig& config);

}  // namespace tdgs
