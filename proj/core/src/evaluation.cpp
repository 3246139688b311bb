#include "tdgs/evaluation.hpp"

#include <cmath>
#include <sstream>

#include "tdgs/error.hpp"

namespace tdgs {

ConfusionMatrix confusion(std::span<const int> predictions, std::span<const PairTag> truths) {
    if (predictions.size() != truths.size()) {
        throw ValidationError("predictions (" + std::to_string(predictions.size()) + ") and truths (" +
                              std::to_string(truths.size()) + ") differ in length");
    }
    ConfusionMatrix cm;
    for (std::size_t i = 0; i < truths.size(); ++i) {
        const int p = predictions[i];
        if (p != kDissimilar && p != kSimilar) {
            throw ValidationError("prediction " + std::to_string(i) + " is not +1 or -1");
        }
        switch (truths[i]) {
            case PairTag::dissimilar: (p == kDissimilar ? cm.tp : cm.fn) += 1; break;
            case PairTag::similar: (p == kDissimilar ? cm.fp : cm.tn) += 1; break;
            case PairTag::unknown: throw ValidationError("truth " + std::to_string(i) + " is unknown");
        }
    }
    return cm;
}

double g_mean(const ConfusionMatrix& cm) {
    if (cm.tp + cm.fn == 0) throw ValidationError("G-mean undefined: no dissimilar samples");
    if (cm.tn + cm.fp == 0) throw ValidationError("G-mean undefined: no similar samples");
    const double num = static_cast<double>(cm.tp) * static_cast<double>(cm.tn);
    const double den = static_cast<double>(cm.tp + cm.fn) * static_cast<double>(cm.tn + cm.fp);
    return std::sqrt(num / den);
}

EvalReport make_report(const ConfusionMatrix& cm, const Ratio& class_structure) {
    EvalReport r;
    r.confusion = cm;
    r.g_mean = g_mean(cm);
    r.recall_pos = static_cast<double>(cm.tp) / static_cast<double>(cm.tp + cm.fn);
    r.recall_neg = static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp);
    r.class_structure = class_structure;
    return r;
}

std::vector<GroupedResult> grouped_assessment(std::span<const EvalReport> reports) {
    if (reports.empty()) throw ValidationError("no reports to group");
    std::map<Ratio, std::pair<double, std::size_t>> acc;
    for (const auto& r : reports) {
        auto& [sum, count] = acc[r.class_structure];
        sum += r.g_mean;
        ++count;
    }
    std::vector<GroupedResult> out;
    out.reserve(acc.size());
    for (const auto& [key, v] : acc) out.push_back({key, v.first / static_cast<double>(v.second), v.second});
    return out;
}

std::string grouped_to_csv(std::span<const GroupedResult> groups) {
    std::ostringstream out;
    out << "class_structure,mean_gmean,n_sets\n";
    for (const auto& g : groups) {
        out << g.class_structure.to_decimal() << ',' << format_double(g.mean_g_mean) << ',' << g.count << '\n';
    }
    return out.str();
}

std::set<std::uint32_t> flag_incorrect_channels(const Shot& shot, const std::map<PairKey, int>& pair_predictions,
                                                double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ValidationError("flag threshold " + format_double(threshold) + " outside (0, 1)");
    }
    const auto n = static_cast<std::uint32_t>(shot.n_channels());
    if (n < 2) throw ValidationError("shot '" + shot.shot_id + "' has fewer than 2 channels");

    std::vector<std::uint32_t> dissimilar(n, 0);
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a + 1; b < n; ++b) {
            auto it = pair_predictions.find({a, b});
            if (it == pair_predictions.end()) {
                throw ValidationError("shot '" + shot.shot_id + "': no prediction for pair (" + std::to_string(a) +
                                      ", " + std::to_string(b) + ")");
            }
            if (it->second == kDissimilar) {
                ++dissimilar[a];
                ++dissimilar[b];
            } else if (it->second != kSimilar) {
                throw ValidationError("pair prediction is not +1 or -1");
            }
        }
    }
    std::set<std::uint32_t> flagged;
    for (std::uint32_t c = 0; c < n; ++c) {
        if (static_cast<double>(dissimilar[c]) / static_cast<double>(n - 1) > threshold) flagged.insert(c);
    }
    return flagged;
}

}  // namespace tdgs
