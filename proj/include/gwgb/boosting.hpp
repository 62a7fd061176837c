#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwgb/cart_tree.hpp"
#include "gwgb/dataset.hpp"
#include "gwgb/matrix.hpp"
#include "gwgb/simplex.hpp"
#include "gwgb/wavelet.hpp"

namespace gwgb {

struct BoostConfig {
    std::size_t iterations = 10;  // K
    double nu = 0.1;              // shrinkage
    int max_depth = 8;            // J, root at depth 0
    double subsample = 0.8;       // in-bag fraction; the rest selects M
    std::size_t min_leaf = 1;
    std::uint64_t seed = 0;
    Task task = Task::regression;
    // When false every stage keeps its whole tree (M_k = node count): plain
    // stochastic gradient boosting with the same trees.
    bool wavelet_pruning = true;

    // Throws ConfigError on any out-of-range field.
    void validate() const;
};

struct Stage {
    WaveletTree tree;
    WaveletOrder order;
    std::size_t m_terms = 0;  // 1 <= m_terms <= tree.size()
};

/// f(x) = f0 + nu * sum_k T_k,M_k(x), where T_k,M is the M-term
/// approximation of stage k's tree.
struct Ensemble {
    Task task = Task::regression;
    std::vector<double> f0;
    double nu = 0.1;
    std::vector<Stage> stages;
    std::optional<SimplexEncoding> encoding;
    std::vector<std::string> feature_names;
    std::string label_name;
    BoostConfig config;

    std::size_t response_dim() const noexcept { return f0.size(); }
};

struct StageReport {
    std::size_t iteration = 0;  // 1-based
    std::size_t node_count = 0;
    std::size_t m_terms = 0;
    std::size_t in_bag_size = 0;
    std::size_t oob_size = 0;
    double in_bag_loss = 0.0;  // residual SSE of the M_k-term tree over in-bag rows
    double oob_loss = 0.0;     // same over OOB rows; NaN when OOB is empty
};

using StageObserver = std::function<void(const StageReport&)>;

// Column means: the squared-loss minimizing constant. DataError when empty.
std::vector<double> init_constant(const Matrix& y);

// Smallest M (1-based) attaining the minimum of a loss curve.
std::size_t argmin_m(std::span<const double> curve);

/// M_k for one stage: argmin of the M-term loss on the OOB rows `oob` of
/// (x, residual), smallest M on ties. DataError when `oob` is empty.
std::size_t select_m(const WaveletOrder& order, const WaveletTree& tree, const Matrix& x, const Matrix& residual,
                     std::span<const std::size_t> oob);

/// Runs the boosting loop on `data`, whose response must already be set
/// (simplex-encoded for classification). Each iteration computes residuals
/// y - f_{k-1}, draws an in-bag/OOB split with seed derive_seed(seed, k), fits
/// a depth-J tree to the in-bag residuals, picks M_k on the OOB rows and adds
/// nu times the M_k-term tree. With an empty OOB set M_k is the node count.
Ensemble train(const Dataset& data, const BoostConfig& config, const StageObserver& observer = {});

/// Classification convenience: builds the simplex encoding from the labels,
/// encodes them, trains and attaches the encoding to the ensemble.
Ensemble train_classifier(const Dataset& data, const BoostConfig& config, const StageObserver& observer = {});

// The same encoding is used for every fold when the label set is known up front.
Ensemble train_classifier(const Dataset& data, const SimplexEncoding& encoding, const BoostConfig& config,
                          const StageObserver& observer = {});

std::vector<double> predict(const Ensemble& ensemble, std::span<const double> x);
Matrix predict(const Ensemble& ensemble, const Matrix& x);

// Adds nu * stage's M-term prediction at x into `acc`.
void accumulate_stage(const Ensemble& ensemble, const Stage& stage, std::span<const double> x,
                      std::span<double> acc);

struct LabelPrediction {
    std::string label;
    double confidence = 0.0;
    // Binary only: the single coordinate of the predicted point. Larger
    // means closer to the +1 vertex, the first label in sorted order.
    // Zero for P > 2.
    double score = 0.0;
    std::vector<double> scores;  // inner product with every vertex
};

// ConfigError for regression ensembles.
std::vector<LabelPrediction> predict_labels(const Ensemble& ensemble, const Matrix& x);

// Copy keeping only the first k stages.
Ensemble truncated(const Ensemble& ensemble, std::size_t k);

}  // namespace gwgb
