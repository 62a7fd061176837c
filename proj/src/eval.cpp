#include "gwgb/eval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "gwgb/errors.hpp"
#include "gwgb/io.hpp"
#include "gwgb/model_io.hpp"
#include "gwgb/rng.hpp"

namespace gwgb {

double auc_binary(std::span<const double> scores, const std::vector<bool>& positive) {
    if (scores.size() != positive.size()) throw DataError("auc: scores and labels differ in length");
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (bool p : positive) n_pos += p ? 1 : 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) throw DataError("auc: both classes must be present");
    for (double s : scores)
        if (std::isnan(s)) throw DataError("auc: NaN score");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    // Sum of (1-based, tie-averaged) ranks of the positives.
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[idx[j]] == scores[idx[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t)
            if (positive[idx[t]]) rank_sum += avg_rank;
        i = j;
    }
    const double np = static_cast<double>(n_pos), nn = static_cast<double>(n_neg);
    const double u = rank_sum - np * (np + 1.0) / 2.0;
    return u / (np * nn);
}

double rmse(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size()) throw DataError("rmse: length mismatch");
    if (pred.empty()) throw DataError("rmse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double e = pred[i] - truth[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(pred.size()));
}

double rmse(const Matrix& pred, const Matrix& truth) {
    if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) throw DataError("rmse: shape mismatch");
    if (pred.rows() == 0) throw DataError("rmse: empty input");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.data().size(); ++i) {
        const double e = pred.data()[i] - truth.data()[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(pred.rows()));
}

double misclassification_rate(const std::vector<std::string>& pred, const std::vector<std::string>& truth) {
    if (pred.size() != truth.size()) throw DataError("misclassification_rate: length mismatch");
    if (pred.empty()) throw DataError("misclassification_rate: empty input");
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) wrong += pred[i] != truth[i] ? 1 : 0;
    return static_cast<double>(wrong) / static_cast<double>(pred.size());
}

std::vector<std::string> inject_label_noise(const std::vector<std::string>& labels, double level,
                                            std::uint64_t seed) {
    if (!(level >= 0.0 && level < 1.0)) throw ConfigError("noise level must lie in [0, 1), got " + format_double(level));
    std::set<std::string> distinct_set(labels.begin(), labels.end());
    if (distinct_set.size() < 2) throw DataError("label noise needs at least 2 distinct labels");
    const std::vector<std::string> distinct(distinct_set.begin(), distinct_set.end());

    const std::size_t m = labels.size();
    const auto flips = static_cast<std::size_t>(std::llround(level * static_cast<double>(m)));
    std::vector<std::size_t> order(m);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    std::vector<std::string> out = labels;
    for (std::size_t i = 0; i < flips; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(m - i));
        std::swap(order[i], order[j]);
        const auto row = order[i];
        const auto current =
            static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), labels[row]) - distinct.begin());
        auto pick = static_cast<std::size_t>(rng.below(distinct.size() - 1));
        if (pick >= current) ++pick;
        out[row] = distinct[pick];
    }
    return out;
}

TruncationResult best_k_truncation(const Ensemble& ensemble, const Matrix& x, const Matrix& y) {
    if (x.rows() == 0) throw DataError("best_k_truncation: empty validation set");
    if (y.rows() != x.rows() || y.cols() != ensemble.response_dim())
        throw DataError("best_k_truncation: validation response shape mismatch");
    Matrix pred(x.rows(), ensemble.response_dim());
    for (std::size_t r = 0; r < x.rows(); ++r) std::copy(ensemble.f0.begin(), ensemble.f0.end(), pred.row(r).begin());

    TruncationResult out;
    out.rmse_by_k.push_back(rmse(pred, y));
    for (const auto& stage : ensemble.stages) {
        for (std::size_t r = 0; r < x.rows(); ++r) accumulate_stage(ensemble, stage, x.row(r), pred.row(r));
        out.rmse_by_k.push_back(rmse(pred, y));
    }
    out.best_k = 0;
    for (std::size_t k = 1; k < out.rmse_by_k.size(); ++k)
        if (out.rmse_by_k[k] < out.rmse_by_k[out.best_k]) out.best_k = k;
    out.best_rmse = out.rmse_by_k[out.best_k];
    return out;
}

const char* to_string(Protocol protocol) {
    switch (protocol) {
        case Protocol::imbalance_auc: return "imbalance";
        case Protocol::regression_rmse: return "regression";
        case Protocol::noise_accuracy: return "noise";
    }
    return "?";
}

Protocol parse_protocol(const std::string& name) {
    if (name == "imbalance" || name == "imbalance_auc") return Protocol::imbalance_auc;
    if (name == "regression" || name == "regression_rmse") return Protocol::regression_rmse;
    if (name == "noise" || name == "noise_accuracy") return Protocol::noise_accuracy;
    throw ConfigError("unknown protocol '" + name + "' (expected imbalance, regression or noise)");
}

ProtocolSpec ProtocolSpec::imbalance() {
    ProtocolSpec s;
    s.kind = Protocol::imbalance_auc;
    s.folds = 5;
    return s;
}

ProtocolSpec ProtocolSpec::regression() {
    ProtocolSpec s;
    s.kind = Protocol::regression_rmse;
    s.folds = 2;
    s.trials = 20;
    s.stratified = false;
    return s;
}

ProtocolSpec ProtocolSpec::noise(double level) {
    ProtocolSpec s;
    s.kind = Protocol::noise_accuracy;
    s.folds = 10;
    s.noise_level = level;
    return s;
}

BoostConfig protocol_config(Protocol protocol) {
    BoostConfig c;
    switch (protocol) {
        case Protocol::imbalance_auc:
            c.max_depth = 8;
            c.iterations = 10;
            c.task = Task::classification;
            break;
        case Protocol::regression_rmse:
            c.max_depth = 8;
            c.iterations = 500;
            c.task = Task::regression;
            break;
        case Protocol::noise_accuracy:
            c.max_depth = 2;
            c.iterations = 150;
            c.task = Task::classification;
            break;
    }
    return c;
}

std::string EvalReport::metric_name() const {
    switch (protocol) {
        case Protocol::imbalance_auc: return "auc";
        case Protocol::regression_rmse: return "rmse";
        case Protocol::noise_accuracy: return "accuracy";
    }
    return "metric";
}

void summarize(EvalReport& report) {
    const auto& v = report.per_fold;
    if (v.empty()) {
        report.mean = report.stddev = 0.0;
        return;
    }
    const double n = static_cast<double>(v.size());
    report.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - report.mean) * (x - report.mean);
    report.stddev = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["protocol"] = to_string(protocol);
    j["metric"] = metric_name();
    j["per_fold"] = per_fold;
    j["mean"] = mean;
    j["std"] = stddev;
    j["seed"] = seed;
    j["folds"] = spec.folds;
    j["trials"] = spec.trials;
    j["external_folds"] = spec.external_folds.has_value();
    if (protocol == Protocol::noise_accuracy) j["noise_level"] = spec.noise_level;
    if (protocol != Protocol::regression_rmse) j["stratified"] = spec.stratified;
    if (!positive_label.empty()) j["positive_label"] = positive_label;
    j["config"] = config_to_json(config);
    j["warnings"] = warnings;
    auto& detail = j["fold_results"] = nlohmann::json::array();
    for (const auto& f : folds) {
        nlohmann::json e{{"trial", f.trial}, {"fold", f.fold}, {"train_size", f.train_size},
                         {"test_size", f.test_size}, {"metric", f.metric}};
        if (protocol == Protocol::regression_rmse) e["best_k"] = f.best_k;
        detail.push_back(std::move(e));
    }
    return j.dump(2) + "\n";
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << "protocol " << to_string(protocol) << "  metric " << metric_name() << "  seed " << seed << "\n";
    out << "trial  fold  train  test  " << std::setw(10) << metric_name();
    if (protocol == Protocol::regression_rmse) out << "  best_k";
    out << "\n";
    for (const auto& f : folds) {
        out << std::setw(5) << f.trial << std::setw(6) << f.fold << std::setw(7) << f.train_size << std::setw(6)
            << f.test_size << "  " << std::setw(10) << std::fixed << std::setprecision(4) << f.metric;
        if (protocol == Protocol::regression_rmse) out << std::setw(8) << f.best_k;
        out << "\n";
    }
    out << std::fixed << std::setprecision(4) << "mean " << mean << "  std " << stddev << "  (n=" << per_fold.size()
        << ")\n";
    return out.str();
}

std::string EvalReport::per_fold_csv() const {
    std::string out = "trial,fold,train_size,test_size," + metric_name() + ",best_k\n";
    for (const auto& f : folds)
        out += std::to_string(f.trial) + "," + std::to_string(f.fold) + "," + std::to_string(f.train_size) + "," +
               std::to_string(f.test_size) + "," + format_double(f.metric) + "," + std::to_string(f.best_k) + "\n";
    return out;
}

namespace {

std::string minority_label(const std::vector<std::string>& labels) {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    std::string best;
    std::size_t best_count = 0;
    // Strictly fewer wins; on equal counts the later label in sorted order.
    for (const auto& [label, count] : counts)
        if (best.empty() || count <= best_count) {
            best = label;
            best_count = count;
        }
    return best;
}

}  // namespace

EvalReport run_protocol(const Dataset& data, const ProtocolSpec& spec, const BoostConfig& config,
                        std::uint64_t seed) {
    config.validate();
    const bool classification = spec.kind != Protocol::regression_rmse;
    if (classification && data.task != Task::classification)
        throw ConfigError(std::string("protocol '") + to_string(spec.kind) + "' needs a classification dataset");
    if (!classification && data.task != Task::regression)
        throw ConfigError("protocol 'regression' needs a regression dataset");
    if (spec.trials < 1) throw ConfigError("trials must be >= 1");
    if (spec.external_folds && spec.trials != 1)
        throw ConfigError("external folds fix the partition; trials must be 1");
    if (spec.kind == Protocol::noise_accuracy && !(spec.noise_level >= 0.0 && spec.noise_level < 1.0))
        throw ConfigError("noise level must lie in [0, 1)");

    EvalReport report;
    report.protocol = spec.kind;
    report.spec = spec;
    report.config = config;
    report.config.task = data.task;
    report.seed = seed;

    std::optional<SimplexEncoding> encoding;
    std::size_t positive_index = 0;
    if (classification) {
        encoding = build_encoding(data.raw_labels);
        if (spec.kind == Protocol::imbalance_auc) {
            if (encoding->class_count() != 2) throw ConfigError("imbalance protocol needs exactly 2 classes");
            report.positive_label = minority_label(data.raw_labels);
            positive_index = encoding->index_of(report.positive_label);
        }
    }

    for (std::size_t trial = 0; trial < spec.trials; ++trial) {
        const std::uint64_t trial_seed = derive_seed(seed, trial);
        FoldPlan plan = spec.external_folds
                            ? *spec.external_folds
                            : kfold_indices(data, spec.folds, derive_seed(trial_seed, 0),
                                            classification && spec.stratified);
        if (!plan.warning.empty()) report.warnings.push_back("trial " + std::to_string(trial) + ": " + plan.warning);
        for (std::size_t f = 0; f < plan.folds.size(); ++f) {
            const Fold& fold = plan.folds[f];
            Dataset train_set = data.subset(fold.train);
            const Dataset test_set = data.subset(fold.test);
            BoostConfig cfg = config;
            cfg.seed = derive_seed(trial_seed, 2 * f + 1);

            FoldResult result;
            result.trial = trial;
            result.fold = f;
            result.train_size = fold.train.size();
            result.test_size = fold.test.size();
            switch (spec.kind) {
                case Protocol::imbalance_auc: {
                    const Ensemble ens = train_classifier(train_set, *encoding, cfg);
                    const auto preds = predict_labels(ens, test_set.features);
                    std::vector<double> scores;
                    std::vector<bool> positive;
                    for (std::size_t i = 0; i < preds.size(); ++i) {
                        scores.push_back(preds[i].scores[positive_index]);
                        positive.push_back(test_set.raw_labels[i] == report.positive_label);
                    }
                    result.metric = auc_binary(scores, positive);
                    break;
                }
                case Protocol::regression_rmse: {
                    const Ensemble ens = train(train_set, cfg);
                    const auto trunc = best_k_truncation(ens, test_set.features, test_set.response);
                    result.metric = trunc.best_rmse;
                    result.best_k = trunc.best_k;
                    break;
                }
                case Protocol::noise_accuracy: {
                    train_set.raw_labels =
                        inject_label_noise(train_set.raw_labels, spec.noise_level, derive_seed(trial_seed, 2 * f + 2));
                    const Ensemble ens = train_classifier(train_set, *encoding, cfg);
                    const auto preds = predict_labels(ens, test_set.features);
                    std::vector<std::string> labels;
                    for (const auto& p : preds) labels.push_back(p.label);
                    result.metric = 1.0 - misclassification_rate(labels, test_set.raw_labels);
                    break;
                }
            }
            report.per_fold.push_back(result.metric);
            report.folds.push_back(result);
        }
    }
    summarize(report);
    return report;
}

}  // namespace gwgb
