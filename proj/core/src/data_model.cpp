#include "tdgs/data_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "rng.hpp"
#include "tdgs/error.hpp"

namespace tdgs {

using nlohmann::json;

namespace {

std::string where(const std::string& shot_id, std::size_t channel) {
    return "shot '" + shot_id + "' channel " + std::to_string(channel) + ": ";
}

}  // namespace

void validate(const Shot& shot) {
    if (shot.shot_id.empty()) throw ValidationError("shot with empty shot_id");
    if (!(shot.dt > 0.0) || !std::isfinite(shot.dt)) {
        throw ValidationError("shot '" + shot.shot_id + "': dt must be positive and finite");
    }
    if (shot.channels.size() < 2) {
        throw ValidationError("shot '" + shot.shot_id + "': needs at least 2 channels, has " +
                              std::to_string(shot.channels.size()));
    }
    const std::size_t length = shot.channels.front().samples.size();
    for (std::size_t c = 0; c < shot.channels.size(); ++c) {
        const auto& trace = shot.channels[c];
        if (trace.channel_index != c) {
            throw ValidationError(where(shot.shot_id, c) + "channel indices must be contiguous from 0, found index " +
                                  std::to_string(trace.channel_index));
        }
        if (trace.samples.size() < 2) throw ValidationError(where(shot.shot_id, c) + "trace shorter than 2 samples");
        if (trace.samples.size() != length) {
            throw ValidationError(where(shot.shot_id, c) + "length mismatch (" + std::to_string(trace.samples.size()) +
                                  " samples, channel 0 has " + std::to_string(length) + ")");
        }
        for (std::size_t i = 0; i < trace.samples.size(); ++i) {
            if (!std::isfinite(trace.samples[i])) {
                throw ValidationError(where(shot.shot_id, c) + "non-finite sample at position " + std::to_string(i));
            }
        }
    }
}

void validate(std::span<const Shot> shots) {
    for (const auto& s : shots) validate(s);
}

std::string shots_to_json(std::span<const Shot> shots) {
    json doc;
    doc["shots"] = json::array();
    for (const auto& shot : shots) {
        json js;
        js["shot_id"] = shot.shot_id;
        js["dt"] = shot.dt;
        js["channels"] = json::array();
        for (const auto& ch : shot.channels) {
            js["channels"].push_back(
                {{"index", ch.channel_index}, {"label", std::string(to_string(ch.label))}, {"samples", ch.samples}});
        }
        doc["shots"].push_back(std::move(js));
    }
    return doc.dump() + "\n";
}

std::vector<Shot> shots_from_json(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("dataset is not valid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("shots") || !doc["shots"].is_array()) {
        throw ValidationError("dataset must be an object with a \"shots\" array");
    }

    std::vector<Shot> shots;
    for (std::size_t s = 0; s < doc["shots"].size(); ++s) {
        const json& js = doc["shots"][s];
        Shot shot;
        if (!js.is_object() || !js.contains("shot_id") || !js["shot_id"].is_string()) {
            throw ValidationError("shot #" + std::to_string(s) + ": missing string shot_id");
        }
        shot.shot_id = js["shot_id"].get<std::string>();
        if (!js.contains("dt") || !js["dt"].is_number()) {
            throw ValidationError("shot '" + shot.shot_id + "': missing numeric dt");
        }
        shot.dt = js["dt"].get<double>();
        if (!js.contains("channels") || !js["channels"].is_array()) {
            throw ValidationError("shot '" + shot.shot_id + "': missing channels array");
        }
        for (std::size_t c = 0; c < js["channels"].size(); ++c) {
            const json& jc = js["channels"][c];
            ChannelTrace trace;
            if (!jc.is_object() || !jc.contains("index") || !jc["index"].is_number_unsigned()) {
                throw ValidationError(where(shot.shot_id, c) + "missing non-negative integer index");
            }
            trace.channel_index = jc["index"].get<std::uint32_t>();
            if (!jc.contains("label") || !jc["label"].is_string()) {
                throw ValidationError(where(shot.shot_id, c) + "missing label");
            }
            try {
                trace.label = parse_channel_label(jc["label"].get<std::string>());
            } catch (const ValidationError& e) {
                throw ValidationError(where(shot.shot_id, c) + e.what());
            }
            if (!jc.contains("samples") || !jc["samples"].is_array()) {
                throw ValidationError(where(shot.shot_id, c) + "missing samples array");
            }
            trace.samples.reserve(jc["samples"].size());
            for (const json& v : jc["samples"]) {
                if (!v.is_number()) throw ValidationError(where(shot.shot_id, c) + "non-numeric sample");
                trace.samples.push_back(v.get<double>());
            }
            shot.channels.push_back(std::move(trace));
        }
        validate(shot);
        shots.push_back(std::move(shot));
    }
    return shots;
}

std::vector<Shot> load_shots(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path.string());
    return shots_from_json(buf.str());
}

void save_shots(std::span<const Shot> shots, const std::filesystem::path& path) {
    validate(shots);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write dataset " + path.string());
    out << shots_to_json(shots);
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

StructureSpec structure_of(std::span<const Shot> shots) {
    if (shots.empty()) throw ValidationError("empty dataset has no class structure");
    const std::size_t n = shots.front().n_channels();
    std::vector<std::uint32_t> incorrect;
    for (const auto& shot : shots) {
        if (shot.n_channels() != n) {
            throw ValidationError("shot '" + shot.shot_id + "' has " + std::to_string(shot.n_channels()) +
                                  " channels, expected " + std::to_string(n));
        }
        std::uint32_t k = 0;
        for (const auto& ch : shot.channels) {
            if (ch.label == ChannelLabel::unknown) {
                throw ValidationError(where(shot.shot_id, ch.channel_index) + "label unknown; structure needs labels");
            }
            if (ch.label == ChannelLabel::incorrect) ++k;
        }
        incorrect.push_back(k);
    }
    return StructureSpec(static_cast<std::uint32_t>(n), std::move(incorrect));
}

// --- synthesis -------------------------------------------------------------

std::string_view to_string(FaultKind kind) {
    switch (kind) {
        case FaultKind::spike_burst: return "spike_burst";
        case FaultKind::baseline_jump: return "baseline_jump";
        case FaultKind::dead_channel: return "dead_channel";
        case FaultKind::random_walk_drift: return "random_walk_drift";
        case FaultKind::amplitude_collapse: return "amplitude_collapse";
    }
    return "unknown";
}

namespace {

struct Range {
    double lo, hi;
};

std::vector<Range> param_ranges(FaultKind kind) {
    switch (kind) {
        case FaultKind::spike_burst: return {{2, 12}, {0.3, 1.0}};
        case FaultKind::baseline_jump: return {{0.8, 1.5}, {0.2, 0.8}};
        case FaultKind::dead_channel: return {{0.0, 0.5}};
        case FaultKind::random_walk_drift: return {{0.3, 0.8}, {0.002, 0.01}};
        case FaultKind::amplitude_collapse: return {{0.1, 0.5}, {0.2, 0.7}};
    }
    return {};
}

/// First-order low-pass of white noise, zero mean, RMS kFluctuationAmplitude.
std::vector<double> shared_fluctuation(detail::Rng& rng, std::size_t len) {
    constexpr double kSmoothing = 0.05;
    std::vector<double> v(len);
    double state = 0.0;
    for (auto& x : v) {
        state += kSmoothing * (rng.normal() - state);
        x = state;
    }
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(len);
    double ss = 0.0;
    for (double& x : v) {
        x -= mean;
        ss += x * x;
    }
    const double rms = std::sqrt(ss / static_cast<double>(len));
    const double scale = rms > 0.0 ? kFluctuationAmplitude / rms : 0.0;
    for (double& x : v) x *= scale;
    return v;
}

std::size_t onset_index(double fraction, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(fraction * static_cast<double>(n)));
}

}  // namespace

void validate(const FaultSpec& fault) {
    const auto ranges = param_ranges(fault.kind);
    const std::string name(to_string(fault.kind));
    if (fault.params.size() != ranges.size()) {
        throw ValidationError(name + " fault expects " + std::to_string(ranges.size()) + " parameters");
    }
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const double v = fault.params[i];
        if (!(v >= ranges[i].lo && v <= ranges[i].hi)) {
            throw ValidationError(name + " parameter " + std::to_string(i) + " = " + format_double(v) +
                                  " outside [" + format_double(ranges[i].lo) + ", " + format_double(ranges[i].hi) +
                                  "]");
        }
    }
    if (fault.kind == FaultKind::spike_burst && fault.params[0] != std::floor(fault.params[0])) {
        throw ValidationError("spike_burst count must be an integer");
    }
}

FaultSpec random_fault(FaultKind kind, std::uint32_t target_channel, std::uint64_t seed) {
    detail::Rng rng(detail::derive_seed(seed, 0));
    FaultSpec fault{kind, {}, target_channel, seed};
    for (const Range& r : param_ranges(kind)) fault.params.push_back(rng.uniform(r.lo, r.hi));
    if (kind == FaultKind::spike_burst) {
        fault.params[0] = static_cast<double>(2 + rng.below(11));
    }
    return fault;
}

void apply_fault(std::span<double> samples, const FaultSpec& fault) {
    validate(fault);
    const std::size_t n = samples.size();
    if (n < 2) throw ValidationError("cannot corrupt a trace shorter than 2 samples");
    detail::Rng rng(detail::derive_seed(fault.seed, 1));
    const auto& p = fault.params;

    switch (fault.kind) {
        case FaultKind::spike_burst: {
            const std::size_t lo = n / 10;
            const std::size_t hi = std::max(lo + 1, n - n / 10);
            const auto count = static_cast<std::size_t>(p[0]);
            for (std::size_t s = 0; s < count; ++s) {
                const std::size_t at = lo + rng.below(hi - lo);
                const std::size_t width = 1 + rng.below(3);
                const double height = rng.sign() * p[1];
                for (std::size_t i = at; i < std::min(n, at + width); ++i) samples[i] += height;
            }
            break;
        }
        case FaultKind::baseline_jump: {
            const double step = rng.sign() * p[0];
            for (std::size_t i = onset_index(p[1], n); i < n; ++i) samples[i] += step;
            break;
        }
        case FaultKind::dead_channel: {
            for (std::size_t i = onset_index(p[0], n); i < n; ++i) samples[i] = kChannelNoise * rng.normal();
            break;
        }
        case FaultKind::random_walk_drift: {
            const double end = rng.sign() * p[0];
            std::vector<double> walk(n, 0.0);
            for (std::size_t i = 1; i < n; ++i) walk[i] = walk[i - 1] + p[1] * rng.normal();
            const double last = static_cast<double>(n - 1);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = static_cast<double>(i) / last;
                samples[i] += walk[i] - walk[n - 1] * t + end * t;
            }
            break;
        }
        case FaultKind::amplitude_collapse: {
            for (std::size_t i = onset_index(p[1], n); i < n; ++i) samples[i] *= p[0];
            break;
        }
    }
}

SynthesisResult synthesize_with_truth(const SynthesisParams& params) {
    if (params.n_channels < 2) throw ValidationError("synthesis needs at least 2 channels");
    if (params.n_shots < 1) throw ValidationError("synthesis needs at least 1 shot");
    if (params.samples_per_shot < 20) throw ValidationError("synthesis needs at least 20 samples per shot");
    if (!(params.dt > 0.0) || !std::isfinite(params.dt)) throw ValidationError("dt must be positive and finite");
    if (params.faults_per_shot.size() != params.n_shots) {
        throw ValidationError("faults_per_shot has " + std::to_string(params.faults_per_shot.size()) +
                              " entries for " + std::to_string(params.n_shots) + " shots");
    }
    for (std::size_t i = 0; i < params.faults_per_shot.size(); ++i) {
        if (params.faults_per_shot[i] > params.n_channels) {
            throw ValidationError("shot " + std::to_string(i) + ": " + std::to_string(params.faults_per_shot[i]) +
                                  " faults exceed " + std::to_string(params.n_channels) + " channels");
        }
    }

    const std::size_t len = params.samples_per_shot;
    const double last = static_cast<double>(len - 1);
    SynthesisResult out;

    for (std::uint32_t s = 0; s < params.n_shots; ++s) {
        detail::Rng rng(detail::derive_seed(params.seed, s));

        const std::vector<double> core_mode = shared_fluctuation(rng, len);
        const std::vector<double> edge_mode = shared_fluctuation(rng, len);

        Shot shot;
        char id[32];
        std::snprintf(id, sizeof(id), "%04u", s);
        shot.shot_id = params.id_prefix + "-" + id;
        shot.dt = params.dt;
        for (std::uint32_t c = 0; c < params.n_channels; ++c) {
            const double chord = std::exp(rng.uniform(std::log(0.5), 0.0));
            const double tilt = rng.uniform(-kMaxTilt, kMaxTilt);
            const double mix = rng.uniform(0.0, std::numbers::pi / 2.0);
            const double noise = std::exp(rng.uniform(std::log(kChannelNoise), std::log(kMaxChannelNoise)));
            ChannelTrace trace{c, std::vector<double>(len), ChannelLabel::correct};
            for (std::size_t i = 0; i < len; ++i) {
                const double t = static_cast<double>(i) / last;
                const double envelope = t < 0.1 ? t / 0.1 : (t > 0.9 ? (1.0 - t) / 0.1 : 1.0);
                const double fluct = std::cos(mix) * core_mode[i] + std::sin(mix) * edge_mode[i];
                trace.samples[i] = chord * envelope * (1.0 + tilt * (t - 0.5) + fluct) + noise * rng.normal();
            }
            shot.channels.push_back(std::move(trace));
        }
        out.clean.push_back(shot);

        // choose k distinct channels by partial Fisher-Yates
        std::vector<std::uint32_t> order(params.n_channels);
        for (std::uint32_t c = 0; c < params.n_channels; ++c) order[c] = c;
        const std::uint32_t k = params.faults_per_shot[s];
        std::vector<FaultSpec> faults;
        for (std::uint32_t f = 0; f < k; ++f) {
            const std::size_t pick = f + rng.below(params.n_channels - f);
            std::swap(order[f], order[pick]);
            const FaultKind kind = kAllFaultKinds[rng.below(std::size(kAllFaultKinds))];
            faults.push_back(random_fault(kind, order[f], rng.next()));
        }
        std::sort(faults.begin(), faults.end(),
                  [](const FaultSpec& a, const FaultSpec& b) { return a.target_channel < b.target_channel; });
        for (const auto& fault : faults) {
            auto& trace = shot.channels[fault.target_channel];
            apply_fault(trace.samples, fault);
            trace.label = ChannelLabel::incorrect;
        }
        out.shots.push_back(std::move(shot));
        out.faults.push_back(std::move(faults));
    }
    return out;
}

std::vector<Shot> synthesize(const SynthesisParams& params) { return synthesize_with_truth(params).shots; }

}  // namespace tdgs
