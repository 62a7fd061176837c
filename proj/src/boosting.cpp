#include "gwgb/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gwgb/errors.hpp"
#include "gwgb/io.hpp"
#include "gwgb/rng.hpp"

namespace gwgb {

void BoostConfig::validate() const {
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (!(nu > 0.0 && nu <= 1.0)) throw ConfigError("nu must lie in (0, 1], got " + format_double(nu));
    if (max_depth < 0) throw ConfigError("max_depth must be >= 0");
    if (!(subsample > 0.0 && subsample <= 1.0))
        throw ConfigError("subsample must lie in (0, 1], got " + format_double(subsample));
    if (min_leaf < 1) throw ConfigError("min_leaf must be >= 1");
}

std::vector<double> init_constant(const Matrix& y) {
    if (y.rows() == 0) throw DataError("init_constant: empty response");
    std::vector<double> mean(y.cols(), 0.0);
    for (std::size_t r = 0; r < y.rows(); ++r)
        for (std::size_t j = 0; j < y.cols(); ++j) mean[j] += y(r, j);
    for (auto& v : mean) v /= static_cast<double>(y.rows());
    return mean;
}

std::size_t argmin_m(std::span<const double> curve) {
    if (curve.empty()) throw DataError("argmin_m: empty loss curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < curve.size(); ++i)
        if (curve[i] < curve[best]) best = i;
    return best + 1;
}

std::size_t select_m(const WaveletOrder& order, const WaveletTree& tree, const Matrix& x, const Matrix& residual,
                     std::span<const std::size_t> oob) {
    if (oob.empty()) throw DataError("select_m: empty out-of-bag set");
    return argmin_m(mterm_loss_curve(tree, order, x, residual, oob));
}

void accumulate_stage(const Ensemble& ensemble, const Stage& stage, std::span<const double> x,
                      std::span<double> acc) {
    double buf[16];
    std::vector<double> heap;
    std::span<double> term;
    if (acc.size() <= std::size(buf)) {
        term = std::span<double>(buf, acc.size());
    } else {
        heap.resize(acc.size());
        term = heap;
    }
    predict_mterm_into(stage.tree, stage.order, stage.m_terms, x, term);
    for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += ensemble.nu * term[j];
}

namespace {

double residual_loss(const Stage& stage, const Matrix& x, const Matrix& residual, std::span<const std::size_t> rows) {
    std::vector<double> term(residual.cols());
    double loss = 0.0;
    for (auto r : rows) {
        predict_mterm_into(stage.tree, stage.order, stage.m_terms, x.row(r), term);
        for (std::size_t j = 0; j < term.size(); ++j) {
            const double e = residual(r, j) - term[j];
            loss += e * e;
        }
    }
    return loss;
}

}  // namespace

Ensemble train(const Dataset& data, const BoostConfig& config, const StageObserver& observer) {
    config.validate();
    const std::size_t m = data.rows();
    if (m == 0) throw DataError("train: empty dataset");
    if (data.response.rows() != m)
        throw DataError(data.task == Task::classification ? "train: classification labels are not encoded"
                                                          : "train: response rows do not match feature rows");
    const Matrix& x = data.features;
    const Matrix& y = data.response;
    const std::size_t d = y.cols();

    Ensemble ens;
    ens.task = data.task;
    ens.f0 = init_constant(y);
    ens.nu = config.nu;
    ens.feature_names = data.feature_names;
    ens.label_name = data.label_name;
    ens.config = config;
    ens.config.task = data.task;
    ens.stages.reserve(config.iterations);

    Matrix fitted(m, d);
    for (std::size_t r = 0; r < m; ++r) std::copy(ens.f0.begin(), ens.f0.end(), fitted.row(r).begin());
    Matrix residual(m, d);
    const TreeParams params{config.max_depth, config.min_leaf};

    for (std::size_t k = 1; k <= config.iterations; ++k) {
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t j = 0; j < d; ++j) residual(r, j) = y(r, j) - fitted(r, j);

        const SplitPair split = subsample(m, config.subsample, derive_seed(config.seed, k));
        if (split.in_bag.empty())
            throw DataError("train: subsample of " + std::to_string(m) + " rows at fraction " +
                            format_double(config.subsample) + " is empty");

        Stage stage;
        stage.tree = fit_tree(x, residual, split.in_bag, params);
        stage.order = sort_wavelets(stage.tree);
        StageReport report;
        report.iteration = k;
        report.node_count = stage.tree.size();
        report.in_bag_size = split.in_bag.size();
        report.oob_size = split.oob.size();
        report.oob_loss = std::numeric_limits<double>::quiet_NaN();
        if (config.wavelet_pruning && !split.oob.empty()) {
            const auto curve = mterm_loss_curve(stage.tree, stage.order, x, residual, split.oob);
            stage.m_terms = argmin_m(curve);
            report.oob_loss = curve[stage.m_terms - 1];
        } else {
            stage.m_terms = stage.tree.size();
            if (!split.oob.empty()) report.oob_loss = residual_loss(stage, x, residual, split.oob);
        }
        report.m_terms = stage.m_terms;
        report.in_bag_loss = residual_loss(stage, x, residual, split.in_bag);

        ens.stages.push_back(std::move(stage));
        for (std::size_t r = 0; r < m; ++r) accumulate_stage(ens, ens.stages.back(), x.row(r), fitted.row(r));
        if (observer) observer(report);
    }
    return ens;
}

Ensemble train_classifier(const Dataset& data, const SimplexEncoding& encoding, const BoostConfig& config,
                          const StageObserver& observer) {
    if (data.task != Task::classification) throw ConfigError("train_classifier: dataset is not classification");
    Dataset encoded = data;
    encoded.response = encode_all(data.raw_labels, encoding);
    Ensemble ens = train(encoded, config, observer);
    ens.encoding = encoding;
    return ens;
}

Ensemble train_classifier(const Dataset& data, const BoostConfig& config, const StageObserver& observer) {
    return train_classifier(data, build_encoding(data.raw_labels), config, observer);
}

std::vector<double> predict(const Ensemble& ensemble, std::span<const double> x) {
    if (x.size() != ensemble.feature_names.size())
        throw DataError("predict: expected " + std::to_string(ensemble.feature_names.size()) + " features, got " +
                        std::to_string(x.size()));
    std::vector<double> acc = ensemble.f0;
    for (const auto& stage : ensemble.stages) accumulate_stage(ensemble, stage, x, acc);
    return acc;
}

Matrix predict(const Ensemble& ensemble, const Matrix& x) {
    Matrix out(x.rows(), ensemble.response_dim());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto p = predict(ensemble, x.row(r));
        std::copy(p.begin(), p.end(), out.row(r).begin());
    }
    return out;
}

std::vector<LabelPrediction> predict_labels(const Ensemble& ensemble, const Matrix& x) {
    if (ensemble.task != Task::classification || !ensemble.encoding)
        throw ConfigError("predict_labels: ensemble is not a classifier");
    const auto& enc = *ensemble.encoding;
    std::vector<LabelPrediction> out;
    out.reserve(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto point = predict(ensemble, x.row(r));
        Decoded dec = decode(point, enc);
        LabelPrediction p;
        p.label = std::move(dec.label);
        p.confidence = dec.confidence;
        p.score = enc.class_count() == 2 ? point[0] : 0.0;
        p.scores = std::move(dec.scores);
        out.push_back(std::move(p));
    }
    return out;
}

Ensemble truncated(const Ensemble& ensemble, std::size_t k) {
    Ensemble out = ensemble;
    if (k < out.stages.size()) out.stages.resize(k);
    return out;
}

}  // namespace gwgb
