#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tdgs/ratio.hpp"

namespace tdgs {

/// Channel count plus the number of incorrect channels in each discharge.
/// The per-shot error rate is incorrect_per_shot[i] / n_channels.
class StructureSpec {
public:
    /// Throws ValidationError unless n_channels >= 2, at least one shot,
    /// and every count lies in [0, n_channels].
    StructureSpec(std::uint32_t n_channels, std::vector<std::uint32_t> incorrect_per_shot);

    std::uint32_t n_channels() const { return n_channels_; }
    std::size_t n_shots() const { return incorrect_.size(); }
    std::span<const std::uint32_t> incorrect_per_shot() const { return incorrect_; }

    std::uint64_t total_incorrect() const;
    std::uint64_t total_correct() const;

    /// Error rate of shot i as an exact ratio k_i / N.
    Ratio error_rate(std::size_t shot) const;

private:
    std::uint32_t n_channels_;
    std::vector<std::uint32_t> incorrect_;
};

struct ClassStructureReport {
    std::uint64_t total_pairs = 0;
    std::uint64_t similar = 0;
    std::uint64_t dissimilar = 0;
    Ratio tdgs_ratio;  // dissimilar / similar
    Ratio raw_ratio;   // incorrect / correct channel sequences
    bool balanced_improved = false;
};

/// C(m, 2), zero for m < 2.
constexpr std::uint64_t pairs_of(std::uint64_t m) { return m < 2 ? 0 : m * (m - 1) / 2; }

std::uint64_t total_pairs(const StructureSpec& spec);
std::uint64_t similar_count(const StructureSpec& spec);
std::uint64_t dissimilar_count(const StructureSpec& spec);

/// True iff |tdgs - 1| <= |1 - raw|. When either ratio is infinite the test
/// holds only if both are.
bool balanced_improved(const Ratio& tdgs_ratio, const Ratio& raw_ratio);

ClassStructureReport class_ratios(const StructureSpec& spec);

struct CurvePoint {
    Ratio q;
    Ratio raw_ratio;
    Ratio tdgs_ratio;
};

/// Single-shot class structures for each error rate q in the grid, sorted by
/// q. Every q must lie in [0, 1] with q * n_channels integral.
std::vector<CurvePoint> transformation_curve(std::uint32_t n_channels, std::span<const Ratio> q_grid);

/// CSV with header `q,raw_ratio,tdgs_ratio`; infinite ratios print as `inf`.
std::string curve_to_csv(std::span<const CurvePoint> points);

}  // namespace tdgs
