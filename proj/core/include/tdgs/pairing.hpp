#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdgs/data_model.hpp"
#include "tdgs/labels.hpp"

namespace tdgs {

struct FeatureConfig {
    /// Append |z(a) - z(b)| of both traces resampled to resample_len.
    bool append_diff = false;
    std::size_t resample_len = 256;
};

inline constexpr std::size_t kSummaryFeatures = 6;

/// Symmetric similarity summary of two equal-length traces:
///   0 Pearson correlation
///   1 cosine similarity of the mean-removed traces
///   2 RMS of z(a) - z(b), halved so it lies in [0, 1]
///   3 min/max ratio of the dynamic ranges
///   4 correlation of first differences
///   5 fraction of samples with |z(a) - z(b)| > 2
/// A zero-variance trace sets the correlation terms to 0 and raises `degenerate`.
struct PairFeatures {
    std::vector<double> values;
    bool degenerate = false;
};

std::size_t feature_dimension(const FeatureConfig& config);

PairFeatures features(std::span<const double> a, std::span<const double> b, const FeatureConfig& config = {});
PairFeatures features(const ChannelTrace& a, const ChannelTrace& b, const FeatureConfig& config = {});

struct PairSample {
    std::string shot_id;
    std::uint32_t channel_a = 0;  // channel_a < channel_b
    std::uint32_t channel_b = 0;
    std::vector<double> features;
    bool degenerate = false;
    PairTag tag = PairTag::unknown;
};

/// similar iff both correct, unknown iff either unknown, dissimilar otherwise.
PairTag pair_tag(ChannelLabel a, ChannelLabel b);

/// All C(N,2) channel pairs of one shot.
std::vector<PairSample> shot_pairs(const Shot& shot, const FeatureConfig& config = {});

/// Concatenation of shot_pairs over the shots; pairs never cross shots.
std::vector<PairSample> build_pairs(std::span<const Shot> shots, const FeatureConfig& config = {});

/// `shot_id,ch_a,ch_b,tag,f1..f6[,d1..dL]`
std::string pairs_to_csv(std::span<const PairSample> samples);

}  // namespace tdgs
