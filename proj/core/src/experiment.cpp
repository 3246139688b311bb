#include "tdgs/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "rng.hpp"
#include "tdgs/error.hpp"

namespace tdgs {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    __extension__ typedef unsigned __int128 u128;
    u128 r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
        if (r > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(r);
}

std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    if (k > n) return out;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        // rightmost position that can still advance
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
    return out;
}

std::vector<std::vector<std::size_t>> sample_subsets(std::size_t n, std::size_t k, std::size_t count,
                                                     std::uint64_t seed) {
    if (k > n) throw ValidationError("subset size exceeds pool size");
    if (count > binomial(n, k)) throw ValidationError("more subsets requested than exist");
    detail::Rng rng(detail::derive_seed(seed, 0x5ab5e7));
    std::set<std::vector<std::size_t>> picked;
    std::vector<std::size_t> order(n);
    while (picked.size() < count) {
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        for (std::size_t i = 0; i < k; ++i) std::swap(order[i], order[i + rng.below(n - i)]);
        std::vector<std::size_t> subset(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(subset.begin(), subset.end());
        picked.insert(std::move(subset));
    }
    return {picked.begin(), picked.end()};
}

LabeledSet labeled_rows(std::span<const PairSample> samples) {
    LabeledSet set;
    for (const auto& s : samples) {
        if (s.tag == PairTag::unknown) continue;
        set.x.push_back(s.features);
        set.y.push_back(tag_to_sign(s.tag));
    }
    return set;
}

namespace {

Ratio tdgs_ratio_of(std::span<const int> y) {
    std::uint64_t pos = 0, neg = 0;
    for (int v : y) (v == kDissimilar ? pos : neg) += 1;
    return neg == 0 ? Ratio::infinity() : Ratio(pos, neg);
}

EvalReport evaluate(const SvmModel& model, const LabeledSet& validation, const Ratio& structure) {
    std::vector<int> predictions;
    std::vector<PairTag> truths;
    predictions.reserve(validation.x.size());
    for (std::size_t i = 0; i < validation.x.size(); ++i) {
        predictions.push_back(predict(model, validation.x[i]));
        truths.push_back(validation.y[i] == kDissimilar ? PairTag::dissimilar : PairTag::similar);
    }
    return make_report(confusion(predictions, truths), structure);
}

}  // namespace

EvalReport train_and_evaluate(std::span<const PairSample> train_samples, std::span<const PairSample> validation,
                              const TrainConfig& config) {
    for (const auto& s : train_samples) {
        if (s.tag == PairTag::unknown) throw ValidationError("training pair from shot '" + s.shot_id + "' is unlabeled");
    }
    const LabeledSet train_set = labeled_rows(train_samples);
    const SvmModel model = train(train_set.x, train_set.y, config);
    return evaluate(model, labeled_rows(validation), tdgs_ratio_of(train_set.y));
}

SweepResult run_sweep(std::span<const Shot> pool, std::span<const Shot> validation, const SweepConfig& config) {
    if (config.subset_size == 0 || config.subset_size > pool.size()) {
        throw ValidationError("subset size " + std::to_string(config.subset_size) + " must be in [1, pool size " +
                              std::to_string(pool.size()) + "]");
    }
    if (validation.empty()) throw ValidationError("validation set is empty");

    SweepResult result;
    const std::uint64_t total = binomial(pool.size(), config.subset_size);
    if (total > config.cap) {
        result.sampled = true;
        result.subsets = sample_subsets(pool.size(), config.subset_size, config.cap, config.seed);
    } else {
        result.subsets = all_subsets(pool.size(), config.subset_size);
    }
    result.subsets_visited = result.subsets.size();

    std::vector<LabeledSet> per_shot;
    per_shot.reserve(pool.size());
    for (const auto& shot : pool) {
        auto pairs = shot_pairs(shot, config.features);
        for (const auto& p : pairs) {
            if (p.tag == PairTag::unknown) throw ValidationError("pool shot '" + shot.shot_id + "' is unlabeled");
        }
        per_shot.push_back(labeled_rows(pairs));
    }
    const LabeledSet validation_set = labeled_rows(build_pairs(validation, config.features));
    if (validation_set.x.empty()) throw ValidationError("validation set has no labeled pairs");

    std::vector<std::optional<EvalReport>> slots(result.subsets.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t s = next.fetch_add(1);
            if (s >= result.subsets.size()) return;
            try {
                LabeledSet train_set;
                for (std::size_t shot : result.subsets[s]) {
                    train_set.x.insert(train_set.x.end(), per_shot[shot].x.begin(), per_shot[shot].x.end());
                    train_set.y.insert(train_set.y.end(), per_shot[shot].y.begin(), per_shot[shot].y.end());
                }
                const bool has_pos = std::find(train_set.y.begin(), train_set.y.end(), kDissimilar) != train_set.y.end();
                const bool has_neg = std::find(train_set.y.begin(), train_set.y.end(), kSimilar) != train_set.y.end();
                if (!has_pos || !has_neg) continue;
                const SvmModel model = train(train_set.x, train_set.y, config.train);
                slots[s] = evaluate(model, validation_set, tdgs_ratio_of(train_set.y));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };

    const unsigned n_threads = std::max(1u, config.threads);
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool_threads;
        for (unsigned t = 0; t < n_threads; ++t) pool_threads.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (auto& slot : slots) {
        if (slot) {
            result.reports.push_back(*slot);
        } else {
            ++result.skipped_single_class;
        }
    }
    result.classifiers_trained = result.reports.size();
    if (!result.reports.empty()) result.groups = grouped_assessment(result.reports);
    return result;
}

}  // namespace tdgs
