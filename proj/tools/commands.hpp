#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "tdgs/pairing.hpp"
#include "tdgs/svm_smo.hpp"

namespace tdgs::cli {

/// Every flag of every subcommand. JSON config files use the long flag names
/// (without the leading dashes) as keys.
struct RunConfig {
    // paths
    std::string data;
    std::string out;
    std::string model;
    std::string report;
    std::string csv;
    std::string validation;

    // synthesis
    std::uint32_t channels = 11;
    std::uint32_t shots = 7;
    std::uint32_t samples = 1000;
    std::vector<std::uint32_t> faults;  // empty: cycle the default pattern
    double dt = 1e-3;
    std::string id_prefix = "synth";

    std::uint64_t seed = 0;

    TrainConfig train;
    FeatureConfig features;

    double threshold = 0.5;

    // sweep
    std::size_t subset = 7;
    std::size_t cap = 2000;
    unsigned threads = 1;

    // curves
    std::vector<std::string> q_grid;
};

/// Default per-shot fault pattern, cycled to the shot count.
inline const std::vector<std::uint32_t> kDefaultFaults{1, 1, 0, 2, 0, 1, 1};

enum ExitCode : int { kOk = 0, kUsage = 1, kIo = 2 };

int cmd_synth(const RunConfig& cfg, std::ostream& out);
int cmd_analyze(const RunConfig& cfg, std::ostream& out);
int cmd_pairs(const RunConfig& cfg, std::ostream& out);
int cmd_train(const RunConfig& cfg, std::ostream& out);
int cmd_eval(const RunConfig& cfg, std::ostream& out);
int cmd_clean(const RunConfig& cfg, std::ostream& out);
int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_curves(const RunConfig& cfg, std::ostream& out);

/// Parses arguments (excluding the program name), dispatches, and maps
/// errors to exit codes: 1 validation/usage, 2 I/O.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tdgs::cli
