#pragma once

#include <string_view>

namespace tdgs {

enum class ChannelLabel { correct, incorrect, unknown };

enum class PairTag { similar, dissimilar, unknown };

/// Classifier sign convention: dissimilar is the positive class.
inline constexpr int kDissimilar = +1;
inline constexpr int kSimilar = -1;

std::string_view to_string(ChannelLabel label);
std::string_view to_string(PairTag tag);

/// Throws ValidationError on unrecognized text.
ChannelLabel parse_channel_label(std::string_view text);
PairTag parse_pair_tag(std::string_view text);

/// +1 for dissimilar, -1 for similar; throws on unknown.
int tag_to_sign(PairTag tag);

}  // namespace tdgs
