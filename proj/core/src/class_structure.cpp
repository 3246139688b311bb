#include "tdgs/class_structure.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "tdgs/error.hpp"

namespace tdgs {

StructureSpec::StructureSpec(std::uint32_t n_channels, std::vector<std::uint32_t> incorrect_per_shot)
    : n_channels_(n_channels), incorrect_(std::move(incorrect_per_shot)) {
    if (n_channels_ < 2) throw ValidationError("structure needs at least 2 channels");
    if (incorrect_.empty()) throw ValidationError("structure needs at least one shot");
    for (std::size_t i = 0; i < incorrect_.size(); ++i) {
        if (incorrect_[i] > n_channels_) {
            throw ValidationError("shot " + std::to_string(i) + ": " + std::to_string(incorrect_[i]) +
                                  " incorrect channels exceeds channel count " + std::to_string(n_channels_));
        }
    }
}

std::uint64_t StructureSpec::total_incorrect() const {
    return std::accumulate(incorrect_.begin(), incorrect_.end(), std::uint64_t{0});
}

std::uint64_t StructureSpec::total_correct() const {
    return static_cast<std::uint64_t>(n_channels_) * incorrect_.size() - total_incorrect();
}

Ratio StructureSpec::error_rate(std::size_t shot) const { return Ratio(incorrect_.at(shot), n_channels_); }

std::uint64_t total_pairs(const StructureSpec& spec) { return spec.n_shots() * pairs_of(spec.n_channels()); }

std::uint64_t similar_count(const StructureSpec& spec) {
    std::uint64_t sum = 0;
    for (std::uint32_t k : spec.incorrect_per_shot()) sum += pairs_of(spec.n_channels() - k);
    return sum;
}

std::uint64_t dissimilar_count(const StructureSpec& spec) { return total_pairs(spec) - similar_count(spec); }

bool balanced_improved(const Ratio& tdgs_ratio, const Ratio& raw_ratio) {
    if (tdgs_ratio.is_infinite() || raw_ratio.is_infinite()) {
        return tdgs_ratio.is_infinite() && raw_ratio.is_infinite();
    }
    const Ratio one = Ratio::integer(1);
    return tdgs_ratio.distance(one) <= one.distance(raw_ratio);
}

namespace {

Ratio class_ratio(std::uint64_t num, std::uint64_t den) { return den == 0 ? Ratio::infinity() : Ratio(num, den); }

}  // namespace

ClassStructureReport class_ratios(const StructureSpec& spec) {
    ClassStructureReport r;
    r.total_pairs = total_pairs(spec);
    r.similar = similar_count(spec);
    r.dissimilar = r.total_pairs - r.similar;
    r.tdgs_ratio = class_ratio(r.dissimilar, r.similar);
    r.raw_ratio = class_ratio(spec.total_incorrect(), spec.total_correct());
    r.balanced_improved = balanced_improved(r.tdgs_ratio, r.raw_ratio);
    return r;
}

std::vector<CurvePoint> transformation_curve(std::uint32_t n_channels, std::span<const Ratio> q_grid) {
    std::vector<Ratio> grid(q_grid.begin(), q_grid.end());
    std::sort(grid.begin(), grid.end());

    std::vector<CurvePoint> points;
    points.reserve(grid.size());
    for (const Ratio& q : grid) {
        if (q > Ratio::integer(1)) {
            throw ValidationError("error rate q=" + q.to_fraction() + " lies outside [0, 1]");
        }
        const Ratio k = q * Ratio::integer(n_channels);
        if (!k.is_integer()) {
            throw ValidationError("error rate q=" + q.to_decimal() + " gives a non-integer incorrect count for N=" +
                                  std::to_string(n_channels));
        }
        const auto report = class_ratios(StructureSpec(n_channels, {static_cast<std::uint32_t>(k.num())}));
        points.push_back({q, report.raw_ratio, report.tdgs_ratio});
    }
    return points;
}

std::string curve_to_csv(std::span<const CurvePoint> points) {
    std::ostringstream out;
    out << "q,raw_ratio,tdgs_ratio\n";
    for (const auto& p : points) {
        out << p.q.to_decimal() << ',' << p.raw_ratio.to_decimal() << ',' << p.tdgs_ratio.to_decimal() << '\n';
    }
    return out.str();
}

}  // namespace tdgs
