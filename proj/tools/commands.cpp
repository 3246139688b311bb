#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tdgs/class_structure.hpp"
#include "tdgs/data_model.hpp"
#include "tdgs/error.hpp"
#include "tdgs/evaluation.hpp"
#include "tdgs/experiment.hpp"

namespace tdgs::cli {

using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write " + path);
    f << text;
    f.flush();
    if (!f) throw IoError("failed writing " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void require(const std::string& value, const char* flag) {
    if (value.empty()) throw ValidationError(std::string("missing required option ") + flag);
}

/// Writes to the file when a path is given, otherwise to the stream.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty()) {
        out << text;
    } else {
        write_text(path, text);
    }
}

std::vector<std::uint32_t> fault_pattern(const RunConfig& cfg) {
    if (!cfg.faults.empty()) return cfg.faults;
    std::vector<std::uint32_t> f(cfg.shots);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = kDefaultFaults[i % kDefaultFaults.size()];
    return f;
}

void print_structure(const StructureSpec& spec, std::ostream& out) {
    const auto r = class_ratios(spec);
    out << "channels: " << spec.n_channels() << '\n' << "shots: " << spec.n_shots() << '\n' << "incorrect_per_shot:";
    for (auto k : spec.incorrect_per_shot()) out << ' ' << k;
    out << '\n'
        << "total_pairs: " << r.total_pairs << '\n'
        << "similar: " << r.similar << '\n'
        << "dissimilar: " << r.dissimilar << '\n'
        << "raw_ratio: " << r.raw_ratio.to_fraction() << " (" << r.raw_ratio.to_decimal() << ")\n"
        << "tdgs_ratio: " << r.tdgs_ratio.to_fraction() << " (" << r.tdgs_ratio.to_decimal() << ")\n"
        << "balanced_improved: " << (r.balanced_improved ? "true" : "false") << '\n';
}

json features_json(const FeatureConfig& f) {
    return {{"append_diff", f.append_diff}, {"resample_len", f.resample_len}};
}

struct LoadedModel {
    SvmModel svm;
    FeatureConfig features;
    std::string training_class_structure;
};

LoadedModel load_model(const std::string& path) {
    const std::string text = read_text(path);
    LoadedModel m;
    try {
        const json doc = json::parse(text);
        m.svm = svm_model_from_json(doc.at("svm").dump());
        m.features.append_diff = doc.at("features").at("append_diff").get<bool>();
        m.features.resample_len = doc.at("features").at("resample_len").get<std::size_t>();
        m.training_class_structure = doc.value("training_class_structure", "");
    } catch (const json::exception& e) {
        throw ValidationError("malformed model file " + path + ": " + e.what());
    }
    if (feature_dimension(m.features) != m.svm.dimension()) {
        throw ValidationError("model feature settings disagree with its weight dimension");
    }
    return m;
}

std::vector<int> predict_all(const SvmModel& model, std::span<const PairSample> pairs) {
    std::vector<int> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(predict(model, p.features));
    return out;
}

}  // namespace

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    require(cfg.out, "--out");
    SynthesisParams p;
    p.n_channels = cfg.channels;
    p.n_shots = cfg.shots;
    p.samples_per_shot = cfg.samples;
    p.faults_per_shot = fault_pattern(cfg);
    p.seed = cfg.seed;
    p.dt = cfg.dt;
    p.id_prefix = cfg.id_prefix;
    const auto shots = synthesize(p);
    save_shots(shots, cfg.out);
    out << "wrote " << shots.size() << " shots to " << cfg.out << '\n';
    print_structure(structure_of(shots), out);
    return kOk;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
    require(cfg.data, "--data");
    const auto shots = load_shots(cfg.data);
    const auto spec = structure_of(shots);
    print_structure(spec, out);
    if (!cfg.csv.empty()) {
        const auto r = class_ratios(spec);
        std::ostringstream csv;
        csv << "total_pairs,similar,dissimilar,raw_ratio,tdgs_ratio,balanced_improved\n"
            << r.total_pairs << ',' << r.similar << ',' << r.dissimilar << ',' << r.raw_ratio.to_decimal() << ','
            << r.tdgs_ratio.to_decimal() << ',' << (r.balanced_improved ? "true" : "false") << '\n';
        write_text(cfg.csv, csv.str());
    }
    return kOk;
}

int cmd_pairs(const RunConfig& cfg, std::ostream& out) {
    require(cfg.data, "--data");
    const auto shots = load_shots(cfg.data);
    emit(cfg.out, pairs_to_csv(build_pairs(shots, cfg.features)), out);
    return kOk;
}

int cmd_train(const RunConfig& cfg, std::ostream& out) {
    require(cfg.data, "--data");
    require(cfg.model, "--model");
    const auto shots = load_shots(cfg.data);
    const auto pairs = build_pairs(shots, cfg.features);
    for (const auto& p : pairs) {
        if (p.tag == PairTag::unknown) {
            throw ValidationError("training data has unlabeled channels (shot '" + p.shot_id + "')");
        }
    }
    const LabeledSet set = labeled_rows(pairs);
    TrainConfig tc = cfg.train;
    tc.seed = cfg.seed;
    TrainStats stats;
    const SvmModel model = train(set.x, set.y, tc, &stats);
    const auto structure = class_ratios(structure_of(shots)).tdgs_ratio;

    json doc = {
        {"svm", json::parse(to_json(model))},
        {"features", features_json(cfg.features)},
        {"training_class_structure", structure.to_fraction()},
        {"training_samples", set.x.size()},
    };
    write_text(cfg.model, doc.dump(2) + "\n");
    out << "trained on " << set.x.size() << " pairs (class structure " << structure.to_fraction() << "), "
        << model.alphas.size() << " support vectors, " << stats.iterations << " updates\n";
    return kOk;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    require(cfg.data, "--data");
    require(cfg.model, "--model");
    const LoadedModel m = load_model(cfg.model);
    const auto shots = load_shots(cfg.data);
    std::vector<PairSample> known;
    for (auto& p : build_pairs(shots, m.features)) {
        if (p.tag != PairTag::unknown) known.push_back(std::move(p));
    }
    if (known.empty()) throw ValidationError("evaluation data has no labeled pairs");
    std::vector<PairTag> truths;
    for (const auto& p : known) truths.push_back(p.tag);
    const auto cm = confusion(predict_all(m.svm, known), truths);
    const Ratio structure = m.training_class_structure.empty() ? Ratio::integer(0)
                                                               : Ratio::parse(m.training_class_structure);
    const EvalReport r = make_report(cm, structure);

    out << "tp: " << cm.tp << "\nfn: " << cm.fn << "\nfp: " << cm.fp << "\ntn: " << cm.tn << '\n'
        << "recall_pos: " << format_double(r.recall_pos) << '\n'
        << "recall_neg: " << format_double(r.recall_neg) << '\n'
        << "g_mean: " << format_double(r.g_mean) << '\n'
        << "class_structure: " << r.class_structure.to_fraction() << '\n';
    if (!cfg.report.empty()) {
        json doc = {{"tp", cm.tp},
                    {"fn", cm.fn},
                    {"fp", cm.fp},
                    {"tn", cm.tn},
                    {"recall_pos", r.recall_pos},
                    {"recall_neg", r.recall_neg},
                    {"g_mean", r.g_mean},
                    {"class_structure", r.class_structure.to_fraction()}};
        write_text(cfg.report, doc.dump(2) + "\n");
    }
    return kOk;
}

int cmd_clean(const RunConfig& cfg, std::ostream& out) {
    require(cfg.data, "--data");
    require(cfg.model, "--model");
    require(cfg.out, "--out");
    const LoadedModel m = load_model(cfg.model);
    auto shots = load_shots(cfg.data);
    std::size_t total_flagged = 0;
    for (auto& shot : shots) {
        const auto pairs = shot_pairs(shot, m.features);
        std::map<PairKey, int> verdicts;
        for (const auto& p : pairs) verdicts[{p.channel_a, p.channel_b}] = predict(m.svm, p.features);
        const auto flagged = flag_incorrect_channels(shot, verdicts, cfg.threshold);
        out << shot.shot_id << ": flagged";
        if (flagged.empty()) out << " none";
        for (auto c : flagged) out << ' ' << c;
        out << '\n';
        for (auto& ch : shot.channels) {
            ch.label = flagged.count(ch.channel_index) ? ChannelLabel::incorrect : ChannelLabel::correct;
        }
        total_flagged += flagged.size();
    }
    save_shots(shots, cfg.out);
    out << "flagged " << total_flagged << " channels in " << shots.size() << " shots\n";
    return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    require(cfg.data, "--data");
    require(cfg.validation, "--validation");
    const auto pool = load_shots(cfg.data);
    const auto validation = load_shots(cfg.validation);
    SweepConfig sc;
    sc.subset_size = cfg.subset;
    sc.cap = cfg.cap;
    sc.train = cfg.train;
    sc.train.seed = cfg.seed;
    sc.features = cfg.features;
    sc.seed = cfg.seed;
    sc.threads = cfg.threads;
    if (binomial(pool.size(), sc.subset_size) > sc.cap) {
        err << "warning: C(" << pool.size() << ", " << sc.subset_size << ") exceeds cap " << sc.cap
            << "; sampling " << sc.cap << " subsets\n";
    }
    const SweepResult r = run_sweep(pool, validation, sc);
    err << "visited " << r.subsets_visited << " subsets, trained " << r.classifiers_trained << " classifiers, skipped "
        << r.skipped_single_class << " single-class subsets\n";
    if (r.groups.empty()) throw ValidationError("no subset produced a trainable set");
    emit(cfg.out, grouped_to_csv(r.groups), out);
    return kOk;
}

int cmd_curves(const RunConfig& cfg, std::ostream& out) {
    std::vector<Ratio> grid;
    if (cfg.q_grid.empty()) {
        for (std::uint32_t k = 0; k <= cfg.channels; ++k) grid.emplace_back(k, cfg.channels);
    } else {
        for (const auto& q : cfg.q_grid) grid.push_back(Ratio::parse(q));
    }
    emit(cfg.out, curve_to_csv(transformation_curve(cfg.channels, grid)), out);
    return kOk;
}

// --- argument handling -------------------------------------------------------

namespace {

using Setter = std::function<void(RunConfig&, const json&)>;

template <class T>
Setter set_field(T RunConfig::*field) {
    return [field](RunConfig& c, const json& v) { c.*field = v.get<T>(); };
}

const std::map<std::string, Setter>& config_keys() {
    static const std::map<std::string, Setter> keys = {
        {"data", set_field(&RunConfig::data)},
        {"out", set_field(&RunConfig::out)},
        {"model", set_field(&RunConfig::model)},
        {"report", set_field(&RunConfig::report)},
        {"csv", set_field(&RunConfig::csv)},
        {"validation", set_field(&RunConfig::validation)},
        {"channels", set_field(&RunConfig::channels)},
        {"shots", set_field(&RunConfig::shots)},
        {"samples", set_field(&RunConfig::samples)},
        {"faults", set_field(&RunConfig::faults)},
        {"dt", set_field(&RunConfig::dt)},
        {"id-prefix", set_field(&RunConfig::id_prefix)},
        {"seed", set_field(&RunConfig::seed)},
        {"threshold", set_field(&RunConfig::threshold)},
        {"subset", set_field(&RunConfig::subset)},
        {"cap", set_field(&RunConfig::cap)},
        {"threads", set_field(&RunConfig::threads)},
        {"q-grid", [](RunConfig& c, const json& v) {
             c.q_grid.clear();
             for (const auto& q : v) c.q_grid.push_back(q.is_string() ? q.get<std::string>() : q.dump());
         }},
        {"penalty-c", [](RunConfig& c, const json& v) { c.train.penalty_c = v.get<double>(); }},
        {"kkt-tol", [](RunConfig& c, const json& v) { c.train.kkt_tol = v.get<double>(); }},
        {"max-passes", [](RunConfig& c, const json& v) { c.train.max_passes = v.get<std::uint32_t>(); }},
        {"append-diff", [](RunConfig& c, const json& v) { c.features.append_diff = v.get<bool>(); }},
        {"resample-len", [](RunConfig& c, const json& v) { c.features.resample_len = v.get<std::size_t>(); }},
    };
    return keys;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
    const std::string text = read_text(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError("config " + path + " is not valid JSON: " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("config " + path + " must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        auto it = config_keys().find(key);
        if (it == config_keys().end()) throw ValidationError("unknown config key '" + key + "' in " + path);
        try {
            it->second(cfg, value);
        } catch (const json::exception& e) {
            throw ValidationError("config key '" + key + "': " + e.what());
        }
    }
}

std::string find_config_path(const std::vector<std::string>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
        if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
    }
    return {};
}

void add_config(CLI::App* sub) { sub->add_option("--config", "JSON file whose keys mirror the long flag names"); }

void add_train_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--penalty-c", c.train.penalty_c, "SVM penalty on slack")->capture_default_str();
    sub->add_option("--kkt-tol", c.train.kkt_tol, "KKT tolerance")->capture_default_str();
    sub->add_option("--max-passes", c.train.max_passes, "quiet full passes before SMO stops")->capture_default_str();
}

void add_feature_options(CLI::App* sub, RunConfig& c) {
    sub->add_flag("--append-diff", c.features.append_diff, "append resampled |z(a)-z(b)| to the features");
    sub->add_option("--resample-len", c.features.resample_len, "length of the appended difference vector")
        ->capture_default_str();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        if (const auto path = find_config_path(args); !path.empty()) apply_config_file(path, cfg);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    }

    CLI::App app{"Pairwise similarity data cleaning for multi-channel measurement systems", "tdgs"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "generate a synthetic labeled dataset");
    add_config(synth);
    synth->add_option("--out", cfg.out, "dataset JSON to write");
    synth->add_option("--channels", cfg.channels)->capture_default_str();
    synth->add_option("--shots", cfg.shots)->capture_default_str();
    synth->add_option("--samples", cfg.samples, "samples per channel trace")->capture_default_str();
    synth->add_option("--faults", cfg.faults, "incorrect channels per shot, comma separated")->delimiter(',');
    synth->add_option("--dt", cfg.dt, "seconds per sample")->capture_default_str();
    synth->add_option("--id-prefix", cfg.id_prefix)->capture_default_str();
    synth->add_option("--seed", cfg.seed)->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "report the class structure of a labeled dataset");
    add_config(analyze);
    analyze->add_option("--data", cfg.data);
    analyze->add_option("--csv", cfg.csv, "also write the report as CSV");

    auto* pairs = app.add_subcommand("pairs", "dump channel-pair samples as CSV");
    add_config(pairs);
    pairs->add_option("--data", cfg.data);
    pairs->add_option("--out", cfg.out, "CSV path (stdout when omitted)");
    add_feature_options(pairs, cfg);

    auto* train_cmd = app.add_subcommand("train", "train a linear SVM on pair samples");
    add_config(train_cmd);
    train_cmd->add_option("--data", cfg.data);
    train_cmd->add_option("--model", cfg.model, "model JSON to write");
    train_cmd->add_option("--seed", cfg.seed)->capture_default_str();
    add_train_options(train_cmd, cfg);
    add_feature_options(train_cmd, cfg);

    auto* eval = app.add_subcommand("eval", "score a model on labeled data");
    add_config(eval);
    eval->add_option("--data", cfg.data);
    eval->add_option("--model", cfg.model);
    eval->add_option("--report", cfg.report, "write the report as JSON");

    auto* clean = app.add_subcommand("clean", "flag incorrect channels with a trained model");
    add_config(clean);
    clean->add_option("--data", cfg.data);
    clean->add_option("--model", cfg.model);
    clean->add_option("--out", cfg.out, "relabeled dataset JSON to write");
    clean->add_option("--threshold", cfg.threshold, "dissimilar-pair fraction above which a channel is flagged")
        ->capture_default_str();

    auto* sweep = app.add_subcommand("sweep", "train on every pool subset and group G-mean by class structure");
    add_config(sweep);
    sweep->add_option("--data", cfg.data, "pool dataset");
    sweep->add_option("--validation", cfg.validation, "validation dataset");
    sweep->add_option("--subset", cfg.subset, "shots per training set")->capture_default_str();
    sweep->add_option("--cap", cfg.cap, "maximum subsets before sampling")->capture_default_str();
    sweep->add_option("--threads", cfg.threads)->capture_default_str();
    sweep->add_option("--seed", cfg.seed)->capture_default_str();
    sweep->add_option("--out", cfg.out, "CSV path (stdout when omitted)");
    add_train_options(sweep, cfg);
    add_feature_options(sweep, cfg);

    auto* curves = app.add_subcommand("curves", "class structure transformation curve as CSV");
    add_config(curves);
    curves->add_option("--channels", cfg.channels)->capture_default_str();
    curves->add_option("--q-grid", cfg.q_grid, "error rates, comma separated (default k/N for all k)")
        ->delimiter(',');
    curves->add_option("--out", cfg.out, "CSV path (stdout when omitted)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(cfg, out);
        if (analyze->parsed()) return cmd_analyze(cfg, out);
        if (pairs->parsed()) return cmd_pairs(cfg, out);
        if (train_cmd->parsed()) return cmd_train(cfg, out);
        if (eval->parsed()) return cmd_eval(cfg, out);
        if (clean->parsed()) return cmd_clean(cfg, out);
        if (sweep->parsed()) return cmd_sweep(cfg, out, err);
        if (curves->parsed()) return cmd_curves(cfg, out);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace tdgs::cli
