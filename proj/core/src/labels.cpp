#include "tdgs/labels.hpp"

#include <string>

#include "tdgs/error.hpp"

namespace tdgs {

std::string_view to_string(ChannelLabel label) {
    switch (label) {
        case ChannelLabel::correct: return "correct";
        case ChannelLabel::incorrect: return "incorrect";
        case ChannelLabel::unknown: return "unknown";
    }
    return "unknown";
}

std::string_view to_string(PairTag tag) {
    switch (tag) {
        case PairTag::similar: return "similar";
        case PairTag::dissimilar: return "dissimilar";
        case PairTag::unknown: return "unknown";
    }
    return "unknown";
}

ChannelLabel parse_channel_label(std::string_view text) {
    if (text == "correct") return ChannelLabel::correct;
    if (text == "incorrect") return ChannelLabel::incorrect;
    if (text == "unknown") return ChannelLabel::unknown;
    throw ValidationError("unrecognized channel label '" + std::string(text) + "'");
}

PairTag parse_pair_tag(std::string_view text) {
    if (text == "similar") return PairTag::similar;
    if (text == "dissimilar") return PairTag::dissimilar;
    if (text == "unknown") return PairTag::unknown;
    throw ValidationError("unrecognized pair tag '" + std::string(text) + "'");
}

int tag_to_sign(PairTag tag) {
    switch (tag) {
        case PairTag::similar: return kSimilar;
        case PairTag::dissimilar: return kDissimilar;
        case PairTag::unknown: break;
    }
    throw ValidationError("unknown pair tag has no class sign");
}

}  // namespace tdgs
