#include <doctest.h>

#include <cmath>
#include <random>

#include "tdgs/error.hpp"
#include "tdgs/evaluation.hpp"

using namespace tdgs;

namespace {

Shot blank_shot(std::uint32_t n) {
    Shot s{"s", 1e-3, {}};
    for (std::uint32_t c = 0; c < n; ++c) s.channels.push_back({c, {0.0, 1.0}, ChannelLabel::unknown});
    return s;
}

/// Oracle pair verdicts: dissimilar iff the pair touches a bad channel.
std::map<PairKey, int> oracle_predictions(std::uint32_t n, const std::set<std::uint32_t>& bad) {
    std::map<PairKey, int> out;
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a + 1; b < n; ++b) out[{a, b}] = (bad.count(a) || bad.count(b)) ? kDissimilar : kSimilar;
    }
    return out;
}

}  // namespace

TEST_CASE("confusion counting") {
    using T = PairTag;
    const std::vector<T> truth{T::dissimilar, T::dissimilar, T::dissimilar, T::similar, T::similar, T::similar};
    CHECK(confusion(std::vector<int>{1, 1, 1, -1, -1, -1}, truth) == ConfusionMatrix{3, 0, 0, 3});
    CHECK(confusion(std::vector<int>{-1, -1, -1, -1, -1, -1}, truth) == ConfusionMatrix{0, 3, 0, 3});
    CHECK_THROWS_AS(confusion(std::vector<int>{1}, truth), ValidationError);
    CHECK_THROWS_AS(confusion(std::vector<int>{1}, std::vector<T>{T::unknown}), ValidationError);
    CHECK_THROWS_AS(confusion(std::vector<int>{0}, std::vector<T>{T::similar}), ValidationError);
}

TEST_CASE("confusion matches a brute-force recount") {
    std::mt19937_64 gen(20);
    std::vector<int> pred(20);
    std::vector<PairTag> truth(20);
    for (std::size_t i = 0; i < 20; ++i) {
        pred[i] = (gen() & 1) ? kDissimilar : kSimilar;
        truth[i] = (gen() & 1) ? PairTag::dissimilar : PairTag::similar;
    }
    ConfusionMatrix expect;
    for (std::size_t i = 0; i < 20; ++i) {
        const bool actual_pos = truth[i] == PairTag::dissimilar;
        const bool pred_pos = pred[i] == kDissimilar;
        if (actual_pos && pred_pos) ++expect.tp;
        if (actual_pos && !pred_pos) ++expect.fn;
        if (!actual_pos && pred_pos) ++expect.fp;
        if (!actual_pos && !pred_pos) ++expect.tn;
    }
    const auto cm = confusion(pred, truth);
    CHECK(cm == expect);
    CHECK(cm.tp + cm.fn + cm.fp + cm.tn == 20);
}

TEST_CASE("g-mean values") {
    CHECK(g_mean({3, 0, 0, 3}) == 1.0);
    CHECK(g_mean({1, 1, 1, 1}) == 0.5);
    CHECK(g_mean({0, 3, 0, 3}) == 0.0);
    CHECK(g_mean({3, 0, 3, 0}) == 0.0);
    CHECK_THROWS_AS(g_mean({0, 0, 1, 1}), ValidationError);
    CHECK_THROWS_AS(g_mean({1, 1, 0, 0}), ValidationError);
}

TEST_CASE("g-mean properties") {
    for (std::uint64_t tp = 0; tp <= 5; ++tp) {
        for (std::uint64_t fn = 0; fn <= 5; ++fn) {
            for (std::uint64_t fp = 0; fp <= 5; ++fp) {
                for (std::uint64_t tn = 0; tn <= 5; ++tn) {
                    if (tp + fn == 0 || tn + fp == 0) continue;
                    const double g = g_mean({tp, fn, fp, tn});
                    CHECK(g == g_mean({tn, fp, fn, tp}));
                    CHECK(g >= 0.0);
                    CHECK(g <= 1.0);
                    CHECK((g == 1.0) == (fn == 0 && fp == 0));
                }
            }
        }
    }
}

TEST_CASE("report fields") {
    const auto r = make_report({9, 7, 5, 4}, Ratio(1, 2));
    CHECK(r.recall_pos == 9.0 / 16.0);
    CHECK(r.recall_neg == 4.0 / 9.0);
    CHECK(r.g_mean == doctest::Approx(std::sqrt(r.recall_pos * r.recall_neg)));
    CHECK(r.class_structure == Ratio(1, 2));
}

TEST_CASE("grouped assessment") {
    EvalReport a, b, c;
    a.class_structure = Ratio(1, 2);
    a.g_mean = 0.8;
    b.class_structure = Ratio(2, 4);
    b.g_mean = 0.6;
    c.class_structure = Ratio(1, 3);
    c.g_mean = 0.9;
    const std::vector<EvalReport> reports{a, b, c};
    const auto groups = grouped_assessment(reports);
    REQUIRE(groups.size() == 2);
    CHECK(groups[0].class_structure == Ratio(1, 3));
    CHECK(groups[0].count == 1);
    CHECK(groups[1].class_structure == Ratio(1, 2));
    CHECK(groups[1].mean_g_mean == doctest::Approx(0.7));
    CHECK(groups[1].count == 2);
    CHECK(grouped_to_csv(groups) == "class_structure,mean_gmean,n_sets\n0.3333333333333333,0.9,1\n0.5,0.7,2\n");

    c.class_structure = Ratio(3, 1);
    const std::vector<EvalReport> distinct{a, c, [] {
                                               EvalReport r;
                                               r.class_structure = Ratio::integer(1);
                                               return r;
                                           }()};
    CHECK(grouped_assessment(distinct).size() == 3);
    CHECK_THROWS_AS(grouped_assessment(std::vector<EvalReport>{}), ValidationError);
}

TEST_CASE("grouped means match a flat recount") {
    std::mt19937_64 gen(4);
    std::vector<EvalReport> reports;
    for (int i = 0; i < 200; ++i) {
        EvalReport r;
        r.class_structure = Ratio(gen() % 5, 1 + gen() % 4);
        r.g_mean = static_cast<double>(gen() % 1000) / 1000.0;
        reports.push_back(r);
    }
    const auto groups = grouped_assessment(reports);
    std::size_t total = 0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (g > 0) CHECK(groups[g - 1].class_structure < groups[g].class_structure);
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& r : reports) {
            if (r.class_structure == groups[g].class_structure) {
                sum += r.g_mean;
                ++count;
            }
        }
        CHECK(count == groups[g].count);
        CHECK(groups[g].mean_g_mean == doctest::Approx(sum / count));
        total += groups[g].count;
    }
    CHECK(total == reports.size());
}

TEST_CASE("channel flagging") {
    const Shot s = blank_shot(4);
    CHECK(flag_incorrect_channels(s, oracle_predictions(4, {2})) == std::set<std::uint32_t>{2});
    CHECK(flag_incorrect_channels(s, oracle_predictions(4, {})).empty());
    CHECK(flag_incorrect_channels(s, oracle_predictions(4, {0, 1, 2, 3})) == std::set<std::uint32_t>{0, 1, 2, 3});

    auto partial = oracle_predictions(4, {});
    partial.erase({1, 3});
    CHECK_THROWS_AS(flag_incorrect_channels(s, partial), ValidationError);
    CHECK_THROWS_AS(flag_incorrect_channels(s, oracle_predictions(4, {}), 0.0), ValidationError);
    CHECK_THROWS_AS(flag_incorrect_channels(s, oracle_predictions(4, {}), 1.0), ValidationError);

    // N = 3: a good channel has exactly half of its pairs dissimilar
    const Shot three = blank_shot(3);
    CHECK(flag_incorrect_channels(three, oracle_predictions(3, {1})) == std::set<std::uint32_t>{1});
    CHECK(flag_incorrect_channels(three, oracle_predictions(3, {1}), 0.4) == std::set<std::uint32_t>{0, 1, 2});
}

TEST_CASE("oracle verdicts recover a single bad channel") {
    for (std::uint32_t n = 3; n <= 8; ++n) {
        const Shot s = blank_shot(n);
        for (std::uint32_t bad = 0; bad < n; ++bad) {
            CHECK(flag_incorrect_channels(s, oracle_predictions(n, {bad})) == std::set<std::uint32_t>{bad});
        }
    }
}

TEST_CASE("default threshold separates good and bad channels while 2k <= N-1") {
    for (std::uint32_t n = 4; n <= 12; ++n) {
        for (std::uint32_t k = 1; 2 * k <= n - 1; ++k) {
            std::set<std::uint32_t> bad;
            for (std::uint32_t c = 0; c < k; ++c) bad.insert(c * 2 % n);
            if (bad.size() != k) continue;
            CHECK(flag_incorrect_channels(blank_shot(n), oracle_predictions(n, bad)) == bad);
        }
    }
}
