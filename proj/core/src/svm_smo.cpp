#include "tdgs/svm_smo.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "rng.hpp"
#include "tdgs/error.hpp"
#include "tdgs/labels.hpp"

namespace tdgs {

using nlohmann::json;

Standardization Standardization::fit(std::span<const std::vector<double>> x) {
    Standardization st;
    if (x.empty()) return st;
    const std::size_t d = x.front().size();
    const double n = static_cast<double>(x.size());
    st.mean.assign(d, 0.0);
    st.stddev.assign(d, 0.0);
    for (const auto& row : x) {
        for (std::size_t k = 0; k < d; ++k) st.mean[k] += row[k];
    }
    for (double& m : st.mean) m /= n;
    for (const auto& row : x) {
        for (std::size_t k = 0; k < d; ++k) {
            const double c = row[k] - st.mean[k];
            st.stddev[k] += c * c;
        }
    }
    for (double& s : st.stddev) {
        s = std::sqrt(s / n);
        if (!(s > 0.0)) s = 1.0;
    }
    return st;
}

std::vector<double> Standardization::apply(std::span<const double> x) const {
    std::vector<double> z(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) z[k] = (x[k] - mean[k]) / stddev[k];
    return z;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

constexpr double kMinStep = 1e-8;

/// Working state of one SMO run over standardized rows. The kernel is linear,
/// so the weight vector is kept explicitly and f(x) = w . x + b.
class SmoSolver {
public:
    SmoSolver(const std::vector<std::vector<double>>& z, std::span<const int> y, const TrainConfig& config)
        : z_(z), y_(y), c_(config.penalty_c), tol_(config.kkt_tol), rng_(detail::derive_seed(config.seed, 0x5e0)),
          alpha_(z.size(), 0.0), w_(z.front().size(), 0.0), diag_(z.size()) {
        for (std::size_t i = 0; i < z_.size(); ++i) diag_[i] = dot(z_[i], z_[i]);
    }

    void run(std::uint32_t max_passes, TrainStats& stats) {
        const std::size_t n = z_.size();
        const std::size_t max_updates = 200000 + 2000 * n;
        bool examine_all = true;
        std::uint32_t quiet_passes = 0;
        while (stats.iterations < max_updates) {
            std::size_t changed = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (examine_all || is_free(i)) changed += examine(i, stats);
            }
            if (examine_all) {
                ++stats.full_passes;
                if (changed == 0) {
                    if (++quiet_passes >= max_passes) break;
                } else {
                    quiet_passes = 0;
                    examine_all = false;
                }
            } else if (changed == 0) {
                examine_all = true;
            }
        }
    }

    const std::vector<double>& alpha() const { return alpha_; }
    double bias() const { return b_; }

private:
    bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < c_; }

    double error(std::size_t i) const { return dot(w_, z_[i]) + b_ - y_[i]; }

    bool examine(std::size_t i, TrainStats& stats) {
        const double r = y_[i] * error(i);
        if (!((r < -tol_ && alpha_[i] < c_) || (r > tol_ && alpha_[i] > 0.0))) return false;
        const std::size_t n = z_.size();
        std::size_t j = rng_.below(n - 1);
        if (j >= i) ++j;
        if (take_step(i, j, stats)) return true;
        const std::size_t start = rng_.below(n);
        for (std::size_t t = 0; t < n; ++t) {
            j = (start + t) % n;
            if (j != i && take_step(i, j, stats)) return true;
        }
        return false;
    }

    bool take_step(std::size_t i, std::size_t j, TrainStats& stats) {
        const double yi = y_[i], yj = y_[j];
        const double ai = alpha_[i], aj = alpha_[j];
        double lo, hi;
        if (y_[i] != y_[j]) {
            lo = std::max(0.0, aj - ai);
            hi = std::min(c_, c_ + aj - ai);
        } else {
            lo = std::max(0.0, ai + aj - c_);
            hi = std::min(c_, ai + aj);
        }
        if (hi - lo < 1e-12) return false;

        const double ei = error(i), ej = error(j);
        const double kij = dot(z_[i], z_[j]);
        const double eta = diag_[i] + diag_[j] - 2.0 * kij;
        const double slope = yj * (ei - ej);
        // objective gain along the feasible line, as a function of the new alpha_j
        auto gain = [&](double a) {
            const double d = a - aj;
            return d * slope - 0.5 * eta * d * d;
        };

        double aj_new;
        if (eta > 1e-12) {
            aj_new = std::clamp(aj + slope / eta, lo, hi);
        } else {
            const double g_lo = gain(lo), g_hi = gain(hi);
            if (g_lo > g_hi + 1e-12) {
                aj_new = lo;
            } else if (g_hi > g_lo + 1e-12) {
                aj_new = hi;
            } else {
                return false;
            }
        }
        if (aj_new < 1e-12) aj_new = 0.0;
        if (aj_new > c_ - 1e-12) aj_new = c_;
        if (std::abs(aj_new - aj) < kMinStep) return false;

        double ai_new = ai + yi * yj * (aj - aj_new);
        if (ai_new < 1e-12) ai_new = 0.0;
        if (ai_new > c_ - 1e-12) ai_new = c_;

        const double di = ai_new - ai, dj = aj_new - aj;
        const double old_norm = dot(w_, w_);
        const double b1 = b_ - ei - yi * di * diag_[i] - yj * dj * kij;
        const double b2 = b_ - ej - yi * di * kij - yj * dj * diag_[j];
        if (ai_new > 0.0 && ai_new < c_) {
            b_ = b1;
        } else if (aj_new > 0.0 && aj_new < c_) {
            b_ = b2;
        } else {
            b_ = 0.5 * (b1 + b2);
        }

        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] += yi * di * z_[i][k] + yj * dj * z_[j][k];
        alpha_[i] = ai_new;
        alpha_[j] = aj_new;

        const double delta_objective = di + dj - 0.5 * (dot(w_, w_) - old_norm);
        if (delta_objective < -1e-9 * (1.0 + old_norm)) stats.objective_monotone = false;
        ++stats.iterations;
        return true;
    }

    const std::vector<std::vector<double>>& z_;
    std::span<const int> y_;
    double c_;
    double tol_;
    detail::Rng rng_;
    std::vector<double> alpha_;
    std::vector<double> w_;
    std::vector<double> diag_;
    double b_ = 0.0;
};

void check_dimension(const SvmModel& model, std::span<const double> x) {
    if (x.size() != model.dimension()) {
        throw ValidationError("feature dimension " + std::to_string(x.size()) + " does not match model dimension " +
                              std::to_string(model.dimension()));
    }
}

}  // namespace

SvmModel train(std::span<const std::vector<double>> x, std::span<const int> y, const TrainConfig& config,
               TrainStats* stats) {
    if (!(config.penalty_c > 0.0)) throw ValidationError("penalty_c must be positive");
    if (!(config.kkt_tol > 0.0)) throw ValidationError("kkt_tol must be positive");
    if (config.max_passes == 0) throw ValidationError("max_passes must be positive");
    if (x.size() != y.size()) throw ValidationError("feature rows and labels differ in count");
    if (x.empty()) throw ValidationError("no training samples");
    const std::size_t d = x.front().size();
    if (d == 0) throw ValidationError("zero-dimensional features");
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].size() != d) {
            throw ValidationError("sample " + std::to_string(i) + " has dimension " + std::to_string(x[i].size()) +
                                  ", expected " + std::to_string(d));
        }
        for (double v : x[i]) {
            if (!std::isfinite(v)) throw ValidationError("sample " + std::to_string(i) + " has a non-finite feature");
        }
        if (y[i] == kDissimilar) {
            ++pos;
        } else if (y[i] == kSimilar) {
            ++neg;
        } else {
            throw ValidationError("label " + std::to_string(y[i]) + " is not +1 or -1");
        }
    }
    if (pos == 0 || neg == 0) {
        throw ValidationError("training set has a single class (" + std::to_string(pos) + " dissimilar, " +
                              std::to_string(neg) + " similar)");
    }

    SvmModel model;
    model.config = config;
    model.standardization = Standardization::fit(x);
    std::vector<std::vector<double>> z;
    z.reserve(x.size());
    for (const auto& row : x) z.push_back(model.standardization.apply(row));

    TrainStats local;
    SmoSolver solver(z, y, config);
    solver.run(config.max_passes, stats ? *stats : local);

    model.weights.assign(d, 0.0);
    const auto& alpha = solver.alpha();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        if (alpha[i] == 0.0) continue;
        model.alphas.push_back({i, alpha[i]});
        for (std::size_t k = 0; k < d; ++k) model.weights[k] += alpha[i] * y[i] * z[i][k];
    }
    model.bias = solver.bias();
    return model;
}

double decision_value(const SvmModel& model, std::span<const double> x) {
    check_dimension(model, x);
    double s = model.bias;
    for (std::size_t k = 0; k < x.size(); ++k) {
        s += model.weights[k] * (x[k] - model.standardization.mean[k]) / model.standardization.stddev[k];
    }
    return s;
}

int predict(const SvmModel& model, std::span<const double> x) {
    return decision_value(model, x) >= 0.0 ? kDissimilar : kSimilar;
}

double dual_objective(const SvmModel& model) {
    double sum = 0.0;
    for (const auto& a : model.alphas) sum += a.alpha;
    return sum - 0.5 * dot(model.weights, model.weights);
}

std::string to_json(const SvmModel& model) {
    json alphas = json::array();
    for (const auto& a : model.alphas) alphas.push_back(json::array({a.index, a.alpha}));
    json doc = {
        {"kernel", "linear"},
        {"weights", model.weights},
        {"bias", model.bias},
        {"alphas", alphas},
        {"standardization", {{"mean", model.standardization.mean}, {"stddev", model.standardization.stddev}}},
        {"config",
         {{"penalty_c", model.config.penalty_c},
          {"kkt_tol", model.config.kkt_tol},
          {"max_passes", model.config.max_passes},
          {"seed", model.config.seed}}},
    };
    return doc.dump(2);
}

SvmModel svm_model_from_json(const std::string& text) {
    SvmModel m;
    try {
        const json doc = json::parse(text);
        if (doc.at("kernel").get<std::string>() != "linear") throw ValidationError("only linear models are supported");
        m.weights = doc.at("weights").get<std::vector<double>>();
        m.bias = doc.at("bias").get<double>();
        for (const auto& a : doc.at("alphas")) m.alphas.push_back({a.at(0).get<std::size_t>(), a.at(1).get<double>()});
        m.standardization.mean = doc.at("standardization").at("mean").get<std::vector<double>>();
        m.standardization.stddev = doc.at("standardization").at("stddev").get<std::vector<double>>();
        const json& c = doc.at("config");
        m.config.penalty_c = c.at("penalty_c").get<double>();
        m.config.kkt_tol = c.at("kkt_tol").get<double>();
        m.config.max_passes = c.at("max_passes").get<std::uint32_t>();
        m.config.seed = c.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed model document: ") + e.what());
    }
    if (m.weights.empty() || m.standardization.mean.size() != m.weights.size() ||
        m.standardization.stddev.size() != m.weights.size()) {
        throw ValidationError("model weights and standardization disagree in dimension");
    }
    for (double s : m.standardization.stddev) {
        if (!(s > 0.0)) throw ValidationError("model standardization has a non-positive stddev");
    }
    return m;
}

}  // namespace tdgs
