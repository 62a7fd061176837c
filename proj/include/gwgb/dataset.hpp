#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

#include "gwgb/matrix.hpp"

namespace gwgb {

enum class Task { regression, classification };

const char* to_string(Task task);
Task parse_task(const std::string& name);

/// Tabular training data.
///
/// `features` is m x n. `response` is m x d: the regression target (d = 1) or
/// simplex-encoded labels (d = P - 1). For classification data fresh from
/// `load_csv` the response is empty and `raw_labels` holds the label strings.
/// `sample_ids` are the row numbers in the originating file; subsets keep them.
struct Dataset {
    Matrix features;
    Matrix response;
    std::vector<std::string> feature_names;
    std::vector<std::size_t> sample_ids;
    Task task = Task::regression;
    std::vector<std::string> raw_labels;
    std::string label_name;

    std::size_t rows() const noexcept { return features.rows(); }
    std::size_t feature_count() const noexcept { return features.cols(); }

    // Rows `indices` (positions into this dataset) as a new dataset.
    Dataset subset(const std::vector<std::size_t>& indices) const;
};

// Label column given by header name or by zero-based column index.
using ColumnRef = std::variant<std::string, std::size_t>;

/// Reads a comma-separated file whose first row is a header.
///
/// Every column except the label column must be numeric and finite. Throws
/// DataError on a missing file, missing label column, non-numeric or
/// non-finite cell (message names the data row and column), ragged rows, or a
/// file without data rows.
Dataset load_csv(const std::filesystem::path& path, const ColumnRef& label_column, Task task);

/// Reads a feature-only file for prediction. A column named `ignore_column`
/// (typically the training label) is dropped when present.
Dataset load_feature_csv(const std::filesystem::path& path, const std::string& ignore_column);

// Features followed by the label column, numbers in shortest round-trip form.
void write_csv(const Dataset& data, const std::filesystem::path& path);

struct SplitPair {
    std::vector<std::size_t> in_bag;  // ascending
    std::vector<std::size_t> oob;     // ascending
    std::uint64_t seed = 0;
    double fraction = 1.0;
};

/// Uniform sampling without replacement of round(fraction * rows) positions.
/// Throws ConfigError when fraction is outside (0, 1].
SplitPair subsample(std::size_t rows, double fraction, std::uint64_t seed);
SplitPair subsample(const Dataset& data, double fraction, std::uint64_t seed);

struct Fold {
    std::vector<std::size_t> train;  // ascending positions
    std::vector<std::size_t> test;   // ascending positions
};

struct FoldPlan {
    std::vector<Fold> folds;
    std::string warning;  // non-empty when stratification fell back to plain folding
};

/// k-fold partition of the dataset rows.
///
/// Rows are shuffled with `seed` and dealt round-robin to folds. Stratified
/// folding deals each class in turn (classes in sorted label order), so every
/// fold holds each class's count to within one. If some class has fewer than
/// k members the plan falls back to plain folding and sets `warning`.
FoldPlan kfold_indices(const Dataset& data, std::size_t k, std::uint64_t seed, bool stratified);

// Folds from a per-row fold assignment (values 0..k-1, every fold non-empty).
FoldPlan folds_from_assignment(const std::vector<std::size_t>& fold_of_row);

// CSV "sample_id,fold" with one line per row of `data`.
void write_fold_file(const Dataset& data, const FoldPlan& plan, const std::filesystem::path& path);

/// Reads a "sample_id,fold" file and maps it onto `data` rows via sample_ids.
/// Every dataset row must be assigned exactly once.
FoldPlan read_fold_file(const Dataset& data, const std::filesystem::path& path);

}  // namespace gwgb
