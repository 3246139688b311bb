#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "tdgs/class_structure.hpp"
#include "tdgs/labels.hpp"

namespace tdgs {

struct ChannelTrace {
    std::uint32_t channel_index = 0;
    std::vector<double> samples;
    ChannelLabel label = ChannelLabel::unknown;

    friend bool operator==(const ChannelTrace&, const ChannelTrace&) = default;
};

/// One discharge of an N-channel measurement system.
struct Shot {
    std::string shot_id;
    double dt = 1e-3;
    std::vector<ChannelTrace> channels;

    std::size_t n_channels() const { return channels.size(); }
    std::size_t n_samples() const { return channels.empty() ? 0 : channels.front().samples.size(); }

    friend bool operator==(const Shot&, const Shot&) = default;
};

/// Throws ValidationError naming the shot, channel and broken invariant.
void validate(const Shot& shot);
void validate(std::span<const Shot> shots);

/// JSON dataset: {"shots":[{"shot_id","dt","channels":[{"index","label","samples"}]}]}
std::vector<Shot> load_shots(const std::filesystem::path& path);
void save_shots(std::span<const Shot> shots, const std::filesystem::path& path);

std::string shots_to_json(std::span<const Shot> shots);
std::vector<Shot> shots_from_json(const std::string& text);

/// Structure of a fully labeled dataset. All shots must share one channel
/// count and carry no unknown labels.
StructureSpec structure_of(std::span<const Shot> shots);

// ---------------------------------------------------------------------------
// Synthetic measurement system.
//
// Each shot has a trapezoidal envelope (10% ramp-up, 80% flat-top, 10%
// ramp-down, unit peak) and two low-pass filtered fluctuation modes shared by
// all channels, each with RMS kFluctuationAmplitude. Channel j observes
//     chord_j * envelope * (1 + tilt_j (t - 1/2) + cos(m_j) core + sin(m_j) edge)
// plus white noise, with chord_j log-uniform in [0.5, 1], tilt_j uniform in
// [-kMaxTilt, kMaxTilt], m_j uniform in [0, pi/2] and the noise RMS log-uniform
// in [kChannelNoise, kMaxChannelNoise]. Correct channels are therefore related
// but never identical.
//
// Fault kinds (all magnitudes in units of the unit peak):
//   spike_burst         params {count in [1,12], height in [0.2,1.0]}; spikes
//                       1-3 samples wide, random sign, inside the flat-top
//   baseline_jump       params {step in [0.8,1.5], onset fraction in [0.2,0.8]};
//                       random sign, persists to the end of the trace
//   dead_channel        params {onset fraction in [0,0.5]}; signal replaced by
//                       white noise around zero
//   random_walk_drift   params {end offset in [0.2,0.8], step rms in [0.002,0.01]};
//                       Brownian bridge pinned to the end offset
//   amplitude_collapse  params {residual gain in [0.1,0.6], onset fraction in [0.2,0.8]}
//
// Every fault moves its trace more than 5 * kFluctuationAmplitude away from
// the clean trace somewhere.
// ---------------------------------------------------------------------------

inline constexpr double kFluctuationAmplitude = 0.03;
inline constexpr double kChannelNoise = 0.002;
inline constexpr double kMaxChannelNoise = 0.02;
inline constexpr double kMaxTilt = 0.3;

enum class FaultKind { spike_burst, baseline_jump, dead_channel, random_walk_drift, amplitude_collapse };

inline constexpr FaultKind kAllFaultKinds[] = {
    FaultKind::spike_burst, FaultKind::baseline_jump, FaultKind::dead_channel,
    FaultKind::random_walk_drift, FaultKind::amplitude_collapse};

std::string_view to_string(FaultKind kind);

struct FaultSpec {
    FaultKind kind = FaultKind::spike_burst;
    std::vector<double> params;
    std::uint32_t target_channel = 0;
    std::uint64_t seed = 0;  // stream for the fault's own randomness
};

/// Throws ValidationError when params are outside the documented ranges.
void validate(const FaultSpec& fault);

/// Draws a fault of the given kind with parameters inside the documented ranges.
FaultSpec random_fault(FaultKind kind, std::uint32_t target_channel, std::uint64_t seed);

/// Corrupts samples in place.
void apply_fault(std::span<double> samples, const FaultSpec& fault);

struct SynthesisParams {
    std::uint32_t n_channels = 11;
    std::uint32_t n_shots = 7;
    std::uint32_t samples_per_shot = 1000;
    std::vector<std::uint32_t> faults_per_shot;
    std::uint64_t seed = 0;
    double dt = 1e-3;
    std::string id_prefix = "synth";
};

struct SynthesisResult {
    std::vector<Shot> shots;
    std::vector<Shot> clean;  // uncorrupted counterfactual of every shot
    std::vector<std::vector<FaultSpec>> faults;
};

/// Deterministic in all parameters including the seed. Shot i draws from a
/// stream derived from (seed, i) only.
SynthesisResult synthesize_with_truth(const SynthesisParams& params);
std::vector<Shot> synthesize(const SynthesisParams& params);

}  // namespace tdgs
