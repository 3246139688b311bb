#include "tdgs/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tdgs/error.hpp"

namespace tdgs {

namespace {

struct TraceStats {
    std::vector<double> centered;
    std::vector<double> z;  // all zero when the trace is constant
    double sum_sq = 0.0;
    double range = 0.0;
    bool constant = false;
};

TraceStats stats_of(std::span<const double> x) {
    TraceStats st;
    const double n = static_cast<double>(x.size());
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    st.centered.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        st.centered[i] = x[i] - mean;
        st.sum_sq += st.centered[i] * st.centered[i];
    }
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    st.range = *hi - *lo;
    st.constant = !(st.sum_sq > 0.0);
    st.z.assign(x.size(), 0.0);
    if (!st.constant) {
        const double sd = std::sqrt(st.sum_sq / n);
        for (std::size_t i = 0; i < x.size(); ++i) st.z[i] = st.centered[i] / sd;
    }
    return st;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Pearson correlation; 0 when either side is constant.
double correlation(const TraceStats& a, const TraceStats& b) {
    if (a.constant || b.constant) return 0.0;
    return clamp_unit(dot(a.centered, b.centered) / std::sqrt(a.sum_sq * b.sum_sq));
}

std::vector<double> first_differences(std::span<const double> x) {
    std::vector<double> d(x.size() - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) d[i] = x[i + 1] - x[i];
    return d;
}

std::vector<double> resample(std::span<const double> x, std::size_t len) {
    std::vector<double> out(len);
    const double step = static_cast<double>(x.size() - 1) / static_cast<double>(len - 1);
    for (std::size_t i = 0; i < len; ++i) {
        const double pos = static_cast<double>(i) * step;
        const auto lo = std::min(static_cast<std::size_t>(pos), x.size() - 2);
        const double frac = pos - static_cast<double>(lo);
        out[i] = x[lo] + frac * (x[lo + 1] - x[lo]);
    }
    return out;
}

}  // namespace

std::size_t feature_dimension(const FeatureConfig& config) {
    return kSummaryFeatures + (config.append_diff ? config.resample_len : 0);
}

PairFeatures features(std::span<const double> a, std::span<const double> b, const FeatureConfig& config) {
    if (a.size() != b.size()) {
        throw ValidationError("feature traces differ in length (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
    }
    if (a.size() < 2) throw ValidationError("feature traces need at least 2 samples");
    if (config.append_diff && config.resample_len < 2) throw ValidationError("resample_len must be at least 2");

    const TraceStats sa = stats_of(a);
    const TraceStats sb = stats_of(b);
    const double n = static_cast<double>(a.size());

    PairFeatures out;
    out.degenerate = sa.constant || sb.constant;
    out.values.reserve(feature_dimension(config));

    out.values.push_back(correlation(sa, sb));

    double cosine = 0.0;
    if (!out.degenerate) {
        cosine = clamp_unit(dot(sa.centered, sb.centered) / (std::sqrt(sa.sum_sq) * std::sqrt(sb.sum_sq)));
    }
    out.values.push_back(cosine);

    double diff_sq = 0.0;
    std::size_t exceed = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(sa.z[i] - sb.z[i]);
        diff_sq += d * d;
        if (d > 2.0) ++exceed;
    }
    out.values.push_back(std::min(1.0, 0.5 * std::sqrt(diff_sq / n)));

    const double wide = std::max(sa.range, sb.range);
    out.values.push_back(wide > 0.0 ? std::min(sa.range, sb.range) / wide : 1.0);

    const auto da = first_differences(a);
    const auto db = first_differences(b);
    const TraceStats sda = stats_of(da);
    const TraceStats sdb = stats_of(db);
    out.degenerate = out.degenerate || sda.constant || sdb.constant;
    out.values.push_back(correlation(sda, sdb));

    out.values.push_back(static_cast<double>(exceed) / n);

    if (config.append_diff) {
        const TraceStats ra = stats_of(resample(a, config.resample_len));
        const TraceStats rb = stats_of(resample(b, config.resample_len));
        for (std::size_t i = 0; i < config.resample_len; ++i) out.values.push_back(std::abs(ra.z[i] - rb.z[i]));
    }
    return out;
}

PairFeatures features(const ChannelTrace& a, const ChannelTrace& b, const FeatureConfig& config) {
    return features(std::span<const double>(a.samples), std::span<const double>(b.samples), config);
}

PairTag pair_tag(ChannelLabel a, ChannelLabel b) {
    if (a == ChannelLabel::unknown || b == ChannelLabel::unknown) return PairTag::unknown;
    if (a == ChannelLabel::correct && b == ChannelLabel::correct) return PairTag::similar;
    return PairTag::dissimilar;
}

std::vector<PairSample> shot_pairs(const Shot& shot, const FeatureConfig& config) {
    validate(shot);
    std::vector<PairSample> out;
    out.reserve(pairs_of(shot.n_channels()));
    for (std::size_t i = 0; i < shot.channels.size(); ++i) {
        for (std::size_t j = i + 1; j < shot.channels.size(); ++j) {
            const auto& a = shot.channels[i];
            const auto& b = shot.channels[j];
            PairFeatures f = features(a, b, config);
            out.push_back({shot.shot_id, a.channel_index, b.channel_index, std::move(f.values), f.degenerate,
                           pair_tag(a.label, b.label)});
        }
    }
    return out;
}

std::vector<PairSample> build_pairs(std::span<const Shot> shots, const FeatureConfig& config) {
    std::vector<PairSample> out;
    for (const auto& shot : shots) {
        auto pairs = shot_pairs(shot, config);
        out.insert(out.end(), std::make_move_iterator(pairs.begin()), std::make_move_iterator(pairs.end()));
    }
    return out;
}

std::string pairs_to_csv(std::span<const PairSample> samples) {
    std::ostringstream out;
    out << "shot_id,ch_a,ch_b,tag";
    const std::size_t dim = samples.empty() ? kSummaryFeatures : samples.front().features.size();
    for (std::size_t i = 0; i < std::min(dim, kSummaryFeatures); ++i) out << ",f" << i + 1;
    for (std::size_t i = kSummaryFeatures; i < dim; ++i) out << ",d" << i - kSummaryFeatures + 1;
    out << '\n';
    for (const auto& s : samples) {
        out << s.shot_id << ',' << s.channel_a << ',' << s.channel_b << ',' << to_string(s.tag);
        for (double v : s.features) out << ',' << format_double(v);
        out << '\n';
    }
    return out.str();
}

}  // namespace tdgs
