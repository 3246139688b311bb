// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails or runs over its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "oracles/pair_enumeration.hpp"
#include "oracles/qp_oracle.hpp"
#include "svm_fixtures.hpp"
#include "tdgs/class_structure.hpp"
#include "tdgs/error.hpp"
#include "tdgs/evaluation.hpp"
#include "tdgs/experiment.hpp"
#include "tdgs/pairing.hpp"
#include "tdgs/svm_smo.hpp"

namespace fs = std::filesystem;
using namespace tdgs;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Verdict()> body;
};

std::string fmt(double v) { return format_double(v); }

int run_cli(const std::vector<std::string>& args, std::string* out = nullptr, std::string* err = nullptr) {
    std::ostringstream o;
    std::ostringstream e;
    const int code = cli::run(args, o, e);
    if (out) *out = o.str();
    if (err) *err = e.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream b;
    b << f.rdbuf();
    return b.str();
}

fs::path workdir() {
    const fs::path dir = fs::temp_directory_path() / "tdgs-acceptance";
    fs::create_directories(dir);
    return dir;
}

// 1 ----------------------------------------------------------------------

Verdict combinatorics() {
    Verdict v;
    const auto eleven = class_ratios(StructureSpec(11, {1, 1, 0, 2, 0, 1, 1}));
    const auto four = class_ratios(StructureSpec(4, {1}));
    v.ok = eleven.total_pairs == 385 && four.total_pairs == 6 && four.similar == 3 && four.dissimilar == 3 &&
           four.tdgs_ratio == Ratio::integer(1);

    // 792 subsets through the sweep command on a small pool where every shot has one bad channel
    const fs::path dir = workdir();
    const auto pool = (dir / "c1-pool.json").string();
    const auto val = (dir / "c1-val.json").string();
    int code = run_cli({"synth", "--out", pool, "--channels", "3", "--shots", "12", "--samples", "20", "--faults",
                        "1,1,1,1,1,1,1,1,1,1,1,1", "--seed", "1"});
    code |= run_cli({"synth", "--out", val, "--channels", "3", "--shots", "2", "--samples", "20", "--faults", "1,0",
                     "--seed", "2"});
    std::string err;
    code |= run_cli({"sweep", "--data", pool, "--validation", val, "--subset", "7"}, nullptr, &err);
    const auto subsets = all_subsets(12, 7);
    const std::set<std::vector<std::size_t>> distinct(subsets.begin(), subsets.end());
    const bool swept = code == 0 && err.find("visited 792 subsets, trained 792 classifiers") != std::string::npos;
    v.ok = v.ok && swept && binomial(12, 7) == 792 && distinct.size() == 792;
    v.detail = "total=" + std::to_string(eleven.total_pairs) + " four=" + std::to_string(four.total_pairs) + "/" +
               std::to_string(four.similar) + "/" + std::to_string(four.dissimilar) +
               " R=" + four.tdgs_ratio.to_fraction() + " sweep=" + (swept ? "792" : "mismatch");
    return v;
}

// 2 ----------------------------------------------------------------------

std::uint64_t brute_similar(std::uint32_t n, std::uint32_t bad_mask) {
    std::uint64_t s = 0;
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = a + 1; b < n; ++b) {
            if (!(bad_mask >> a & 1U) && !(bad_mask >> b & 1U)) ++s;
        }
    }
    return s;
}

Verdict brute_force() {
    Verdict v;
    std::size_t checked = 0;
    for (std::uint32_t n = 2; n <= 8; ++n) {
        // every placement of the incorrect set gives the per-shot count the formulas claim
        for (std::uint32_t mask = 0; mask < (1U << n); ++mask) {
            const auto k = static_cast<std::uint32_t>(__builtin_popcount(mask));
            const StructureSpec one(n, {k});
            if (brute_similar(n, mask) != similar_count(one) || pairs_of(n) - brute_similar(n, mask) != dissimilar_count(one)) {
                v.ok = false;
            }
        }
        // every k tuple for P = 1..3
        std::vector<std::vector<std::uint32_t>> tuples{{}};
        for (int p = 1; p <= 3; ++p) {
            std::vector<std::vector<std::uint32_t>> next;
            for (const auto& t : tuples) {
                for (std::uint32_t k = 0; k <= n; ++k) {
                    auto u = t;
                    u.push_back(k);
                    next.push_back(u);
                }
            }
            tuples = next;
            for (const auto& t : tuples) {
                const StructureSpec spec(n, t);
                const auto ref = oracle::enumerate_pairs(n, t);
                if (ref.similar != similar_count(spec) || ref.dissimilar != dissimilar_count(spec) ||
                    ref.total != total_pairs(spec)) {
                    v.ok = false;
                }
                ++checked;
            }
        }
    }
    v.detail = std::to_string(checked) + " structures";
    return v;
}

// 3 ----------------------------------------------------------------------

Verdict balanced_area() {
    Verdict v;
    std::size_t cases = 0;
    for (std::uint64_t n = 4; n <= 16; ++n) {
        for (std::uint64_t k = 0; k <= n; ++k) {
            const std::uint64_t good = n - k;
            if (good < 2 || 5 * k > 2 * good) continue;  // k/(N-k) <= 0.4
            const std::uint64_t s = pairs_of(good);
            const std::uint64_t d = pairs_of(n) - s;
            // |d/s - 1| <= |1 - k/good|  <=>  |d - s| * good <= |good - k| * s
            const std::uint64_t lhs = (d > s ? d - s : s - d) * good;
            const std::uint64_t rhs = (good > k ? good - k : k - good) * s;
            const auto r = class_ratios(StructureSpec(static_cast<std::uint32_t>(n), {static_cast<std::uint32_t>(k)}));
            if (!(lhs <= rhs) || !r.balanced_improved) {
                v.ok = false;
                v.detail += " N=" + std::to_string(n) + ",k=" + std::to_string(k);
            }
            ++cases;
        }
    }
    v.detail = std::to_string(cases) + " (N,k) cases" + v.detail;
    return v;
}

// 4 ----------------------------------------------------------------------

Verdict smo_vs_oracle() {
    Verdict v;
    std::mt19937_64 gen(987654321);
    double worst_rel = 0.0;
    double worst_kkt = 0.0;
    const int trials = 24;
    for (int t = 0; t < trials; ++t) {
        const std::size_t n = 4 + gen() % 27;
        const std::size_t d = 1 + gen() % 6;
        const auto inst = testing::random_instance(gen, n, d, 0.5 + static_cast<double>(gen() % 5));
        TrainConfig cfg;
        cfg.penalty_c = (t % 3 == 0) ? 1.0 : 20.0;
        cfg.seed = static_cast<std::uint64_t>(t);
        const auto model = train(inst.x, inst.y, cfg);
        const auto ref = oracle::solve_svm_dual(oracle::zscore_columns(inst.x), inst.y, cfg.penalty_c);
        const double rel = std::abs(dual_objective(model) - ref.objective) / std::abs(ref.objective);
        const auto kkt = testing::check_kkt(model, inst);
        worst_rel = std::max(worst_rel, rel);
        worst_kkt = std::max(worst_kkt, kkt.worst);
        if (rel > 1e-4 || !kkt.ok) v.ok = false;
    }
    v.detail = std::to_string(trials) + " instances, max rel gap " + fmt(worst_rel) + ", max KKT excess " + fmt(worst_kkt);
    return v;
}

// 5 ----------------------------------------------------------------------

Verdict gmean_table() {
    struct Row {
        ConfusionMatrix cm;
        double expected;
    };
    // tp, fn, fp, tn
    const std::vector<Row> table{
        {{1, 1, 1, 1}, 0.5},     {{1, 3, 0, 4}, 0.5},     {{3, 1, 1, 3}, 0.75},  {{9, 7, 0, 5}, 0.75},
        {{9, 3, 1, 3}, 0.75},    {{49, 15, 0, 3}, 0.875}, {{1, 7, 1, 1}, 0.25},  {{1, 1, 7, 1}, 0.25},
        {{1, 0, 15, 1}, 0.25},   {{4, 0, 0, 4}, 1.0},     {{1, 0, 0, 1}, 1.0},   {{0, 5, 0, 5}, 0.0},
        {{5, 0, 5, 0}, 0.0},     {{0, 3, 2, 0}, 0.0},
    };
    Verdict v;
    std::size_t exact = 0;
    for (const auto& row : table) {
        if (g_mean(row.cm) == row.expected) ++exact;
    }
    bool throws = false;
    try {
        (void)g_mean({0, 0, 1, 1});
    } catch (const ValidationError&) {
        throws = true;
    }
    v.ok = exact == table.size() && throws;
    v.detail = std::to_string(exact) + "/" + std::to_string(table.size()) + " exact, empty class " +
               (throws ? "rejected" : "accepted");
    return v;
}

// 6 ----------------------------------------------------------------------

Verdict channel_inference() {
    Verdict v;
    std::size_t cases = 0;
    for (std::uint32_t n = 3; n <= 8; ++n) {
        for (std::uint32_t bad = 0; bad < n; ++bad) {
            Shot s{"s", 1e-3, {}};
            for (std::uint32_t c = 0; c < n; ++c) {
                s.channels.push_back({c, {0.0, 1.0}, c == bad ? ChannelLabel::incorrect : ChannelLabel::correct});
            }
            std::map<PairKey, int> verdicts;
            for (std::uint32_t a = 0; a < n; ++a) {
                for (std::uint32_t b = a + 1; b < n; ++b) {
                    verdicts[{a, b}] = tag_to_sign(pair_tag(s.channels[a].label, s.channels[b].label));
                }
            }
            if (flag_incorrect_channels(s, verdicts) != std::set<std::uint32_t>{bad}) v.ok = false;
            ++cases;
        }
    }
    v.detail = std::to_string(cases) + " placements";
    return v;
}

// 7 ----------------------------------------------------------------------

Verdict balance_trend() {
    SynthesisParams pool_params;
    pool_params.n_shots = 12;
    pool_params.faults_per_shot = {0, 0, 1, 1, 1, 2, 2, 3, 3, 4, 5, 6};
    pool_params.seed = 1000;
    pool_params.id_prefix = "pool";
    SynthesisParams val_params;
    val_params.n_shots = 12;
    val_params.faults_per_shot = std::vector<std::uint32_t>(12, 1);
    val_params.seed = 5000;
    val_params.id_prefix = "val";

    SweepConfig sc;
    sc.subset_size = 7;
    const auto r = run_sweep(synthesize(pool_params), synthesize(val_params), sc);

    // nearest: smallest |r - 1|; most imbalanced: largest max(r, 1/r)
    const GroupedResult* near = nullptr;
    const GroupedResult* far = nullptr;
    auto imbalance = [](const Ratio& q) { return std::max(q, Ratio(q.den(), q.num())); };
    for (const auto& g : r.groups) {
        if (!near || g.class_structure.distance(Ratio::integer(1)) < near->class_structure.distance(Ratio::integer(1))) {
            near = &g;
        }
        if (!far || imbalance(g.class_structure) > imbalance(far->class_structure)) far = &g;
    }
    Verdict v;
    v.ok = r.subsets_visited == 792 && near && far && near != far && near->mean_g_mean > far->mean_g_mean;
    if (near && far) {
        v.detail = std::to_string(r.classifiers_trained) + " classifiers; bin " + near->class_structure.to_decimal() +
                   " G=" + fmt(near->mean_g_mean) + " vs bin " + far->class_structure.to_decimal() +
                   " G=" + fmt(far->mean_g_mean);
    }
    return v;
}

// 8 ----------------------------------------------------------------------

std::vector<std::string> pipeline(const fs::path& dir) {
    const auto p = (dir / "pool.json").string();
    const auto v = (dir / "val.json").string();
    const auto m = (dir / "model.json").string();
    const auto rep = (dir / "report.json").string();
    const auto cl = (dir / "clean.json").string();
    const auto pc = (dir / "pairs.csv").string();
    const auto ac = (dir / "analyze.csv").string();
    const auto sc = (dir / "sweep.csv").string();
    const auto cc = (dir / "curves.csv").string();
    const std::vector<std::vector<std::string>> cmds{
        {"synth", "--out", p, "--channels", "8", "--shots", "9", "--samples", "300", "--faults", "0,1,2,1,0,3,1,1,2",
         "--seed", "21"},
        {"synth", "--out", v, "--channels", "8", "--shots", "4", "--samples", "300", "--faults", "1,0,1,0", "--seed",
         "22"},
        {"analyze", "--data", p, "--csv", ac},
        {"pairs", "--data", p, "--out", pc, "--append-diff", "--resample-len", "32"},
        {"train", "--data", p, "--model", m, "--seed", "5"},
        {"eval", "--data", v, "--model", m, "--report", rep},
        {"clean", "--data", v, "--model", m, "--out", cl},
        {"sweep", "--data", p, "--validation", v, "--subset", "6", "--cap", "40", "--seed", "8", "--threads", "3",
         "--out", sc},
        {"curves", "--channels", "8", "--out", cc},
    };
    std::vector<std::string> got;
    for (std::size_t i = 0; i < cmds.size(); ++i) {
        std::string out;
        std::string err;
        if (run_cli(cmds[i], &out, &err) != 0) throw std::runtime_error("command failed: " + cmds[i][0] + ": " + err);
        // synth announces the output path; strip that line
        if (cmds[i][0] == "synth") out = out.substr(out.find('\n') + 1);
        got.push_back(out);
        got.push_back(err);
    }
    for (const auto& f : {p, v, ac, pc, m, rep, cl, sc, cc}) got.push_back(slurp(f));
    return got;
}

Verdict determinism() {
    const fs::path a = workdir() / "det-a";
    const fs::path b = workdir() / "det-b";
    fs::create_directories(a);
    fs::create_directories(b);
    const auto first = pipeline(a);
    const auto second = pipeline(b);
    Verdict v;
    std::size_t same = 0;
    for (std::size_t i = 0; i < first.size(); ++i) same += first[i] == second[i];
    v.ok = first.size() == second.size() && same == first.size();
    v.detail = std::to_string(same) + "/" + std::to_string(first.size()) + " outputs identical across 9 commands";
    return v;
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "combinatorics exactness", 1.0, combinatorics},
        {2, "brute-force pair count equivalence", 10.0, brute_force},
        {3, "balanced area for k/(N-k) <= 0.4", 1.0, balanced_area},
        {4, "SMO matches QP oracle, KKT holds", 30.0, smo_vs_oracle},
        {5, "G-mean exact on hand table", 1.0, gmean_table},
        {6, "single bad channel recovered", 1.0, channel_inference},
        {7, "balanced training sets score higher", 300.0, balance_trend},
        {8, "CLI determinism", 60.0, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.body();
        } catch (const std::exception& e) {
            v.ok = false;
            v.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = v.ok && in_time;
        failed += !pass;
        char timing[64];
        std::snprintf(timing, sizeof timing, "%.3fs/%gs", secs, c.budget_s);
        std::cout << (pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << "  (" << timing
                  << (in_time ? "" : " over budget") << ")  " << v.detail << '\n';
    }
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << '\n';
    return failed == 0 ? 0 : 1;
}
