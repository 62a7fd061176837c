#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gwgb/boosting.hpp"
#include "gwgb/dataset.hpp"
#include "gwgb/matrix.hpp"

namespace gwgb {

/// Area under the ROC curve via the Mann-Whitney statistic with tied scores
/// counted one half. Higher scores must mean "positive". Throws DataError when
/// only one class is present or the lengths differ.
double auc_binary(std::span<const double> scores, const std::vector<bool>& positive);

double rmse(std::span<const double> pred, std::span<const double> truth);
// Over all entries of two equally shaped matrices, i.e. sqrt(sum |y - f|^2 / rows).
double rmse(const Matrix& pred, const Matrix& truth);

double misclassification_rate(const std::vector<std::string>& pred, const std::vector<std::string>& truth);

/// Replaces the labels at round(level * m) uniformly drawn positions with a
/// uniformly drawn different label from the observed label set.
std::vector<std::string> inject_label_noise(const std::vector<std::string>& labels, double level,
                                            std::uint64_t seed);

struct TruncationResult {
    std::size_t best_k = 0;
    double best_rmse = 0.0;
    std::vector<double> rmse_by_k;  // index k = 0..K_max, k = 0 is f0 alone
};

/// RMSE of every prefix ensemble on (x, y), built by adding one stage at a
/// time; best_k is the smallest k attaining the minimum.
TruncationResult best_k_truncation(const Ensemble& ensemble, const Matrix& x, const Matrix& y);

enum class Protocol { imbalance_auc, regression_rmse, noise_accuracy };

const char* to_string(Protocol protocol);
Protocol parse_protocol(const std::string& name);  // ConfigError on unknown names

struct ProtocolSpec {
    Protocol kind = Protocol::imbalance_auc;
    std::size_t folds = 5;
    std::size_t trials = 1;      // repetitions of the whole CV with fresh partitions
    double noise_level = 0.0;    // noise_accuracy only; applied to training folds
    bool stratified = true;      // classification protocols only
    std::optional<FoldPlan> external_folds;  // used instead of generated folds (trials must be 1)

    // Default settings of each protocol.
    static ProtocolSpec imbalance();
    static ProtocolSpec regression();
    static ProtocolSpec noise(double level);
};

// Defaults of the boosting settings each protocol was run with.
BoostConfig protocol_config(Protocol protocol);

struct FoldResult {
    std::size_t trial = 0;
    std::size_t fold = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    double metric = 0.0;
    std::size_t best_k = 0;  // regression_rmse only
};

struct EvalReport {
    Protocol protocol = Protocol::imbalance_auc;
    std::vector<double> per_fold;
    std::vector<FoldResult> folds;
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation; 0 for a single fold
    ProtocolSpec spec;
    BoostConfig config;
    std::uint64_t seed = 0;
    std::string positive_label;  // imbalance_auc only
    std::vector<std::string> warnings;
    std::string metric_name() const;

    std::string to_json() const;
    std::string to_table() const;
    std::string per_fold_csv() const;
};

// Fills mean/stddev from per_fold.
void summarize(EvalReport& report);

/// Runs a whole evaluation protocol.
///
/// imbalance_auc: (stratified) k-fold CV of a binary classifier, AUC per fold
///   with the minority class as positive.
/// regression_rmse: `trials` repetitions of k-fold CV; each fold trains
///   config.iterations stages and reports the RMSE of the best prefix on the
///   held-out fold.
/// noise_accuracy: k-fold CV where training-fold labels are corrupted at
///   noise_level; metric is accuracy (1 - misclassification) on clean test labels.
///
/// Fold partitions and training seeds derive from `seed`, trial and fold.
EvalReport run_protocol(const Dataset& data, const ProtocolSpec& spec, const BoostConfig& config,
                        std::uint64_t seed);

}  // namespace gwgb
